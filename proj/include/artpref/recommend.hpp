#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "artpref/ingest.hpp"
#include "artpref/split.hpp"
#include "artpref/types.hpp"

namespace artpref {

/// Base-level activation of one artist for one user:
///
///   B = ln( sum_j (refTime - t_j + 1)^(-decay) )
///
/// with ages in seconds. The +1 keeps a listen at refTime finite. Throws
/// on an empty list, a listen after refTime, or decay <= 0.
double bllActivation(std::span<const Timestamp> listens, Timestamp refTime, double decay);

struct BllParams {
    double decay = 0.5;
    /// Shared reference time. When unset each user is scored at their latest
    /// training timestamp + 1.
    std::optional<Timestamp> refTime;
};

struct CfParams {
    std::size_t neighborhoodSize = 20;
};

struct ScoredArtist {
    ArtistId artist;
    double score = 0.0;

    friend bool operator==(const ScoredArtist&, const ScoredArtist&) = default;
};

/// Ranked by score descending, then by each algorithm's tie keys, then by
/// artist id ascending.
struct RecommendationList {
    UserId user;
    std::vector<ScoredArtist> ranked;
    std::size_t k = 0;

    std::vector<ArtistId> artists() const;
};

/// All training listens of one artist, oldest first.
struct ArtistTrace {
    ArtistId artist;
    std::vector<Timestamp> listens;

    std::size_t count() const { return listens.size(); }
    Timestamp lastPlayed() const { return listens.back(); }
};

/// A user's training data reshaped for scoring.
class UserProfile {
public:
    UserProfile() = default;
    UserProfile(UserId user, std::span<const Listen> chronological);

    UserId user() const { return user_; }
    bool empty() const { return traces_.empty(); }
    std::size_t eventCount() const { return eventCount_; }
    Timestamp latest() const { return latest_; }
    /// Sorted by artist id.
    std::span<const ArtistTrace> traces() const { return traces_; }
    /// Sorted distinct artists.
    std::span<const ArtistId> artistSet() const { return artistSet_; }

private:
    UserId user_;
    std::vector<ArtistTrace> traces_;
    std::vector<ArtistId> artistSet_;
    std::size_t eventCount_ = 0;
    Timestamp latest_ = 0;
};

using ArtistCounts = std::map<ArtistId, std::uint64_t>;

/// Training-side view of a split: only train listens ever enter it.
class TrainingSet {
public:
    static TrainingSet fromSplit(const SplitDataset& split);

    /// nullptr when the user has no training data.
    const UserProfile* profile(UserId user) const;
    /// Users with training data, ascending.
    std::span<const UserId> users() const { return users_; }
    std::size_t userSlots() const { return profiles_.size(); }
    /// Total training plays per artist over all users.
    const ArtistCounts& globalCounts() const { return globalCounts_; }

private:
    std::vector<UserProfile> profiles_;
    std::vector<UserId> users_;
    ArtistCounts globalCounts_;
};

RecommendationList recommendBll(const UserProfile& train, const BllParams& params, std::size_t k);

/// Score = play count; ties go to the more recently played artist.
RecommendationList recommendPop(const UserProfile& train, std::size_t k);

/// Score = last-played timestamp; ties go to the more frequently played artist.
RecommendationList recommendTime(const UserProfile& train, std::size_t k);

/// Same list for everyone; `user` is only stamped on the result.
RecommendationList recommendTop(UserId user, const ArtistCounts& globalTrainCounts, std::size_t k);

/// Cosine over binary incidence: |u & v| / sqrt(|u| |v|). Both inputs must
/// be sorted and non-empty.
double userSimilarity(std::span<const ArtistId> u, std::span<const ArtistId> v);

struct Neighbor {
    UserId user;
    double similarity = 0.0;
};

/// Artist -> listeners inverted index over a training set, used to find
/// users sharing at least one artist without scanning everyone.
class CfIndex {
public:
    explicit CfIndex(const TrainingSet& training);

    /// The `size` most similar other users with positive similarity, ordered
    /// by similarity descending then user id ascending.
    std::vector<Neighbor> neighbors(UserId user, std::size_t size) const;

    const TrainingSet& training() const { return *training_; }

private:
    const TrainingSet* training_;
    std::map<ArtistId, std::vector<UserId>> listeners_;
};

/// Sums neighbor similarities per artist. Returns an empty list when the
/// user has no neighbor with positive similarity.
RecommendationList recommendCf(UserId user, const CfIndex& index, const CfParams& params,
                               std::size_t k);

enum class Algorithm { Bll, Top, Pop, Time, Cf };

inline constexpr std::array<Algorithm, 5> kAllAlgorithms{
    Algorithm::Bll, Algorithm::Top, Algorithm::Pop, Algorithm::Time, Algorithm::Cf};

std::string_view algorithmName(Algorithm algorithm);  // "bll", "top", ...
Algorithm parseAlgorithm(std::string_view name);

struct RecommenderParams {
    BllParams bll;
    CfParams cf;
};

/// Uniform entry point used by the evaluator. A recommender only ever sees
/// the TrainingSet it was built from.
class Recommender {
public:
    virtual ~Recommender() = default;
    virtual Algorithm algorithm() const = 0;
    /// Throws a data error for users without training data, except TOP,
    /// which ranks the same artists for everyone.
    virtual RecommendationList recommend(UserId user, std::size_t k) const = 0;
};

/// `training` must outlive the returned object.
std::unique_ptr<Recommender> makeRecommender(Algorithm algorithm, const TrainingSet& training,
                                             const RecommenderParams& params);

}  // namespace artpref
