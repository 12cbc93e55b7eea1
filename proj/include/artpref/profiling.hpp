#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "artpref/ingest.hpp"
#include "artpref/types.hpp"

namespace artpref {

/// Relative play frequency per artist; values sum to 1 unless empty.
using ArtistDistribution = std::map<ArtistId, double>;

/// Throws a data error for an empty history.
ArtistDistribution userArtistDistribution(const UserHistory& history);

/// Pools every user's plays. Counts are accumulated as integers before the
/// single division, so the result does not depend on user order.
ArtistDistribution globalArtistDistribution(std::span<const UserHistory> histories);

/// Histogram intersection sum_a min(user[a], global[a]), clamped to [0, 1].
double mainstreaminess(const ArtistDistribution& userDist, const ArtistDistribution& globalDist);

struct MainstreaminessScore {
    UserId user;
    double score = 0.0;
};

/// Scores every user with at least `minEvents` listens against the
/// distribution of all supplied histories. Output is ordered by user id.
std::vector<MainstreaminessScore> scoreUsers(std::span<const UserHistory> histories,
                                             std::size_t minEvents, unsigned threads = 1);

enum class Group { Low, Med, High };

inline constexpr std::array<Group, 3> kAllGroups{Group::Low, Group::Med, Group::High};

std::string_view groupName(Group group);  // "LowMS", "MedMS", "HighMS"
Group parseGroup(std::string_view name);

struct GroupAssignment {
    std::vector<UserId> lowMS;
    std::vector<UserId> medMS;
    std::vector<UserId> highMS;

    const std::vector<UserId>& members(Group group) const;
};

/// Sorts by (score, user id): the first G users form LowMS, the last G
/// HighMS, and the G users starting at floor((n - G) / 2) MedMS. Requires
/// n >= 3G and G >= 1. Members are listed in that sort order.
GroupAssignment assignGroups(std::span<const MainstreaminessScore> scores, std::size_t groupSize);

struct GroupStats {
    std::size_t users = 0;
    std::size_t distinctArtists = 0;
    std::uint64_t listeningEvents = 0;
    double avgArtistsPerUser = 0.0;
    double avgMainstreaminess = 0.0;
};

/// `histories` is indexed by user id. Every member needs a score.
GroupStats groupStats(std::span<const UserId> group, std::span<const UserHistory> histories,
                      std::span<const MainstreaminessScore> scores);

}  // namespace artpref
