#pragma once

#include <cstddef>

#include "artpref/ingest.hpp"
#include "artpref/recommend.hpp"

namespace artpref {

/// A small log plus everything needed to reproduce the evaluation-time
/// training view.
struct OracleInstance {
    EventLog events;
    double splitFraction = 0.01;
    std::size_t minEvents = 2;
    BllParams bll;
    CfParams cf;
};

inline constexpr std::size_t kOracleMaxUsers = 10;
inline constexpr std::size_t kOracleMaxArtists = 30;
inline constexpr std::size_t kOracleMaxEvents = 200;

/// Recomputes a recommender's ranking by direct enumeration over the flat
/// event list: its own temporal split, per-pair similarities, per-artist
/// scans. Shares no code with the recommenders beyond the tie-breaking
/// rules. Throws a data error when the instance exceeds the bounds above.
RecommendationList bruteForceRanking(Algorithm algorithm, const OracleInstance& instance,
                                     UserId user, std::size_t k);

}  // namespace artpref
