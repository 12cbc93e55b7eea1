#include "artpref/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "artpref/error.hpp"

namespace artpref {

namespace {

struct Candidate {
    ArtistId artist;
    double score = 0.0;
    // Secondary key, larger first. Zero for algorithms without one.
    double tie = 0.0;
};

bool ranksBefore(const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.tie != b.tie) return a.tie > b.tie;
    return a.artist < b.artist;
}

RecommendationList rankTopK(UserId user, std::vector<Candidate> candidates, std::size_t k) {
    const std::size_t n = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n),
                      candidates.end(), ranksBefore);
    RecommendationList list;
    list.user = user;
    list.k = k;
    list.ranked.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        list.ranked.push_back({candidates[i].artist, candidates[i].score});
    }
    return list;
}

void requireTraining(const UserProfile& train, std::string_view algorithm) {
    if (train.empty()) {
        throw dataError(std::string(algorithm) + ": user " + std::to_string(train.user().value()) +
                        " has no training events");
    }
}

}  // namespace

double bllActivation(std::span<const Timestamp> listens, Timestamp refTime, double decay) {
    if (listens.empty()) throw dataError("BLL activation needs at least one listen");
    if (!(decay > 0.0)) throw usageError("BLL decay must be > 0");
    double sum = 0.0;
    for (Timestamp t : listens) {
        if (t > refTime) {
            throw dataError("listen at " + std::to_string(t) + " lies after reference time " +
                            std::to_string(refTime));
        }
        const auto age = static_cast<double>(refTime - t + 1);
        sum += std::pow(age, -decay);
    }
    return std::log(sum);
}

std::vector<ArtistId> RecommendationList::artists() const {
    std::vector<ArtistId> out;
    out.reserve(ranked.size());
    for (const auto& r : ranked) out.push_back(r.artist);
    return out;
}

UserProfile::UserProfile(UserId user, std::span<const Listen> chronological)
    : user_(user), eventCount_(chronological.size()) {
    std::map<ArtistId, std::vector<Timestamp>> byArtist;
    for (const auto& l : chronological) {
        byArtist[l.artist].push_back(l.timestamp);
        latest_ = std::max(latest_, l.timestamp);
    }
    traces_.reserve(byArtist.size());
    artistSet_.reserve(byArtist.size());
    for (auto& [artist, listens] : byArtist) {
        artistSet_.push_back(artist);
        traces_.push_back({artist, std::move(listens)});
    }
}

TrainingSet TrainingSet::fromSplit(const SplitDataset& split) {
    TrainingSet set;
    std::size_t slots = 0;
    for (const auto& [user, s] : split.perUser) slots = std::max(slots, user.index() + 1);
    set.profiles_.resize(slots);
    for (const auto& [user, s] : split.perUser) {
        if (s.train.empty()) continue;
        set.profiles_[user.index()] = UserProfile(user, s.train);
        set.users_.push_back(user);
        for (const auto& l : s.train) ++set.globalCounts_[l.artist];
    }
    return set;
}

const UserProfile* TrainingSet::profile(UserId user) const {
    if (user.index() >= profiles_.size()) return nullptr;
    const auto& p = profiles_[user.index()];
    return p.empty() ? nullptr : &p;
}

RecommendationList recommendBll(const UserProfile& train, const BllParams& params, std::size_t k) {
    requireTraining(train, "bll");
    const Timestamp ref = params.refTime.value_or(train.latest() + 1);
    std::vector<Candidate> candidates;
    candidates.reserve(train.traces().size());
    for (const auto& trace : train.traces()) {
        candidates.push_back({trace.artist, bllActivation(trace.listens, ref, params.decay)});
    }
    return rankTopK(train.user(), std::move(candidates), k);
}

RecommendationList recommendPop(const UserProfile& train, std::size_t k) {
    requireTraining(train, "pop");
    std::vector<Candidate> candidates;
    candidates.reserve(train.traces().size());
    for (const auto& trace : train.traces()) {
        candidates.push_back({trace.artist, static_cast<double>(trace.count()),
                              static_cast<double>(trace.lastPlayed())});
    }
    return rankTopK(train.user(), std::move(candidates), k);
}

RecommendationList recommendTime(const UserProfile& train, std::size_t k) {
    requireTraining(train, "time");
    std::vector<Candidate> candidates;
    candidates.reserve(train.traces().size());
    for (const auto& trace : train.traces()) {
        candidates.push_back({trace.artist, static_cast<double>(trace.lastPlayed()),
                              static_cast<double>(trace.count())});
    }
    return rankTopK(train.user(), std::move(candidates), k);
}

RecommendationList recommendTop(UserId user, const ArtistCounts& globalTrainCounts,
                                std::size_t k) {
    if (globalTrainCounts.empty()) throw dataError("top: no training plays to rank");
    std::vector<Candidate> candidates;
    candidates.reserve(globalTrainCounts.size());
    for (const auto& [artist, count] : globalTrainCounts) {
        candidates.push_back({artist, static_cast<double>(count)});
    }
    return rankTopK(user, std::move(candidates), k);
}

double userSimilarity(std::span<const ArtistId> u, std::span<const ArtistId> v) {
    if (u.empty() || v.empty()) throw dataError("similarity undefined for an empty artist set");
    std::size_t shared = 0;
    auto a = u.begin();
    auto b = v.begin();
    while (a != u.end() && b != v.end()) {
        if (*a < *b) {
            ++a;
        } else if (*b < *a) {
            ++b;
        } else {
            ++shared;
            ++a;
            ++b;
        }
    }
    return static_cast<double>(shared) /
           std::sqrt(static_cast<double>(u.size()) * static_cast<double>(v.size()));
}

CfIndex::CfIndex(const TrainingSet& training) : training_(&training) {
    for (UserId u : training.users()) {
        for (ArtistId a : training.profile(u)->artistSet()) listeners_[a].push_back(u);
    }
}

std::vector<Neighbor> CfIndex::neighbors(UserId user, std::size_t size) const {
    const UserProfile* self = training_->profile(user);
    if (self == nullptr) {
        throw dataError("cf: user " + std::to_string(user.value()) + " has no training events");
    }

    // Shared-artist counts for every user co-listening at least one artist.
    std::map<UserId, std::size_t> shared;
    for (ArtistId a : self->artistSet()) {
        auto it = listeners_.find(a);
        if (it == listeners_.end()) continue;
        for (UserId v : it->second) {
            if (v != user) ++shared[v];
        }
    }

    const auto selfSize = static_cast<double>(self->artistSet().size());
    std::vector<Neighbor> all;
    all.reserve(shared.size());
    for (const auto& [v, overlap] : shared) {
        const auto otherSize = static_cast<double>(training_->profile(v)->artistSet().size());
        all.push_back({v, static_cast<double>(overlap) / std::sqrt(selfSize * otherSize)});
    }

    const std::size_t n = std::min(size, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                      [](const Neighbor& a, const Neighbor& b) {
                          if (a.similarity != b.similarity) return a.similarity > b.similarity;
                          return a.user < b.user;
                      });
    all.resize(n);
    return all;
}

RecommendationList recommendCf(UserId user, const CfIndex& index, const CfParams& params,
                               std::size_t k) {
    if (params.neighborhoodSize == 0) throw usageError("cf: neighborhood size must be >= 1");

    // Neighbors are visited in rank order so every artist's sum is formed
    // in the same order regardless of how it was reached.
    std::map<ArtistId, double> scores;
    for (const auto& n : index.neighbors(user, params.neighborhoodSize)) {
        for (ArtistId a : index.training().profile(n.user)->artistSet()) {
            scores[a] += n.similarity;
        }
    }

    std::vector<Candidate> candidates;
    candidates.reserve(scores.size());
    for (const auto& [artist, score] : scores) candidates.push_back({artist, score});
    return rankTopK(user, std::move(candidates), k);
}

std::string_view algorithmName(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::Bll: return "bll";
        case Algorithm::Top: return "top";
        case Algorithm::Pop: return "pop";
        case Algorithm::Time: return "time";
        case Algorithm::Cf: return "cf";
    }
    return "?";
}

Algorithm parseAlgorithm(std::string_view name) {
    for (Algorithm a : kAllAlgorithms) {
        if (algorithmName(a) == name) return a;
    }
    throw usageError("unknown algorithm '" + std::string(name) +
                     "' (expected bll, top, pop, time or cf)");
}

namespace {

class ProfileRecommender final : public Recommender {
public:
    ProfileRecommender(Algorithm algorithm, const TrainingSet& training, BllParams bll)
        : algorithm_(algorithm), training_(training), bll_(bll) {}

    Algorithm algorithm() const override { return algorithm_; }

    RecommendationList recommend(UserId user, std::size_t k) const override {
        const UserProfile* profile = training_.profile(user);
        if (profile == nullptr) {
            throw dataError(std::string(algorithmName(algorithm_)) + ": user " +
                            std::to_string(user.value()) + " has no training events");
        }
        switch (algorithm_) {
            case Algorithm::Bll: return recommendBll(*profile, bll_, k);
            case Algorithm::Pop: return recommendPop(*profile, k);
            default: return recommendTime(*profile, k);
        }
    }

private:
    Algorithm algorithm_;
    const TrainingSet& training_;
    BllParams bll_;
};

class TopRecommender final : public Recommender {
public:
    explicit TopRecommender(const TrainingSet& training) : training_(training) {}

    Algorithm algorithm() const override { return Algorithm::Top; }

    RecommendationList recommend(UserId user, std::size_t k) const override {
        return recommendTop(user, training_.globalCounts(), k);
    }

private:
    const TrainingSet& training_;
};

class CfRecommender final : public Recommender {
public:
    CfRecommender(const TrainingSet& training, CfParams params)
        : index_(training), params_(params) {}

    Algorithm algorithm() const override { return Algorithm::Cf; }

    RecommendationList recommend(UserId user, std::size_t k) const override {
        return recommendCf(user, index_, params_, k);
    }

private:
    CfIndex index_;
    CfParams params_;
};

}  // namespace

std::unique_ptr<Recommender> makeRecommender(Algorithm algorithm, const TrainingSet& training,
                                             const RecommenderParams& params) {
    switch (algorithm) {
        case Algorithm::Top: return std::make_unique<TopRecommender>(training);
        case Algorithm::Cf: return std::make_unique<CfRecommender>(training, params.cf);
        case Algorithm::Bll:
        case Algorithm::Pop:
        case Algorithm::Time: break;
    }
    if (!(params.bll.decay > 0.0)) throw usageError("bllDecay must be > 0");
    return std::make_unique<ProfileRecommender>(algorithm, training, params.bll);
}

}  // namespace artpref
