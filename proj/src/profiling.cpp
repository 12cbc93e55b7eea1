#include "artpref/profiling.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <unordered_map>

#include "artpref/error.hpp"
#include "artpref/parallel.hpp"

namespace artpref {

ArtistDistribution userArtistDistribution(const UserHistory& history) {
    if (history.empty()) {
        throw dataError("artist distribution undefined for user " +
                        std::to_string(history.user.value()) + " with no events");
    }
    const auto total = static_cast<double>(history.size());
    ArtistDistribution dist;
    for (const auto& [artist, count] : history.artistCounts) {
        dist.emplace_hint(dist.end(), artist, static_cast<double>(count) / total);
    }
    return dist;
}

ArtistDistribution globalArtistDistribution(std::span<const UserHistory> histories) {
    std::map<ArtistId, std::uint64_t> counts;
    std::uint64_t total = 0;
    for (const auto& h : histories) {
        for (const auto& [artist, count] : h.artistCounts) counts[artist] += count;
        total += h.size();
    }
    if (total == 0) throw dataError("global artist distribution undefined for an empty corpus");

    ArtistDistribution dist;
    for (const auto& [artist, count] : counts) {
        dist.emplace_hint(dist.end(), artist,
                          static_cast<double>(count) / static_cast<double>(total));
    }
    return dist;
}

double mainstreaminess(const ArtistDistribution& userDist, const ArtistDistribution& globalDist) {
    // Merge walk over the two sorted supports; artists missing from either
    // side contribute min(p, 0) = 0.
    double overlap = 0.0;
    auto u = userDist.begin();
    auto g = globalDist.begin();
    while (u != userDist.end() && g != globalDist.end()) {
        if (u->first < g->first) {
            ++u;
        } else if (g->first < u->first) {
            ++g;
        } else {
            overlap += std::min(u->second, g->second);
            ++u;
            ++g;
        }
    }
    return std::clamp(overlap, 0.0, 1.0);
}

std::vector<MainstreaminessScore> scoreUsers(std::span<const UserHistory> histories,
                                             std::size_t minEvents, unsigned threads) {
    const ArtistDistribution global = globalArtistDistribution(histories);

    std::vector<const UserHistory*> eligible;
    for (const auto& h : histories) {
        if (!h.empty() && h.size() >= minEvents) eligible.push_back(&h);
    }
    std::sort(eligible.begin(), eligible.end(),
              [](const UserHistory* a, const UserHistory* b) { return a->user < b->user; });

    std::vector<MainstreaminessScore> scores(eligible.size());
    parallelFor(eligible.size(), threads, [&](std::size_t i) {
        scores[i] = {eligible[i]->user,
                     mainstreaminess(userArtistDistribution(*eligible[i]), global)};
    });
    return scores;
}

std::string_view groupName(Group group) {
    switch (group) {
        case Group::Low: return "LowMS";
        case Group::Med: return "MedMS";
        case Group::High: return "HighMS";
    }
    return "?";
}

Group parseGroup(std::string_view name) {
    for (Group g : kAllGroups) {
        if (groupName(g) == name) return g;
    }
    throw dataError("unknown group '" + std::string(name) + "'");
}

const std::vector<UserId>& GroupAssignment::members(Group group) const {
    switch (group) {
        case Group::Low: return lowMS;
        case Group::Med: return medMS;
        case Group::High: break;
    }
    return highMS;
}

GroupAssignment assignGroups(std::span<const MainstreaminessScore> scores,
                             std::size_t groupSize) {
    const std::size_t n = scores.size();
    if (groupSize == 0) throw usageError("group size must be at least 1");
    if (n < 3 * groupSize) {
        throw dataError("cannot form three disjoint groups of " + std::to_string(groupSize) +
                        " from " + std::to_string(n) + " users (need at least " +
                        std::to_string(3 * groupSize) + ")");
    }

    std::vector<MainstreaminessScore> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.user < b.user;
    });

    auto slice = [&](std::size_t begin) {
        std::vector<UserId> out;
        out.reserve(groupSize);
        for (std::size_t i = begin; i < begin + groupSize; ++i) out.push_back(sorted[i].user);
        return out;
    };

    GroupAssignment groups;
    groups.lowMS = slice(0);
    groups.medMS = slice((n - groupSize) / 2);
    groups.highMS = slice(n - groupSize);
    return groups;
}

GroupStats groupStats(std::span<const UserId> group, std::span<const UserHistory> histories,
                      std::span<const MainstreaminessScore> scores) {
    if (group.empty()) throw dataError("group statistics undefined for an empty group");

    std::unordered_map<UserId, double> scoreOf;
    scoreOf.reserve(scores.size());
    for (const auto& s : scores) scoreOf.emplace(s.user, s.score);

    std::set<UserId> members(group.begin(), group.end());
    std::set<ArtistId> artists;
    GroupStats stats;
    stats.users = members.size();
    double artistSum = 0.0;
    double scoreSum = 0.0;
    for (UserId u : members) {
        if (u.index() >= histories.size()) {
            throw dataError("no history for user " + std::to_string(u.value()));
        }
        const auto& h = histories[u.index()];
        const auto score = scoreOf.find(u);
        if (score == scoreOf.end()) {
            throw dataError("no mainstreaminess score for user " + std::to_string(u.value()));
        }
        stats.listeningEvents += h.size();
        artistSum += static_cast<double>(h.artistCounts.size());
        scoreSum += score->second;
        for (const auto& [artist, count] : h.artistCounts) artists.insert(artist);
    }
    stats.distinctArtists = artists.size();
    stats.avgArtistsPerUser = artistSum / static_cast<double>(stats.users);
    stats.avgMainstreaminess = scoreSum / static_cast<double>(stats.users);
    return stats;
}

}  // namespace artpref
