#include "artpref/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "artpref/error.hpp"

namespace artpref {

namespace {

struct TrainEvent {
    std::size_t user;
    std::size_t artist;
    Timestamp timestamp;
};

struct Row {
    std::size_t artist;
    double score;
    double tie;
};

// Users' training events in chronological order (insertion sort keeps
// equal timestamps in input order).
std::vector<std::vector<TrainEvent>> trainingByUser(const OracleInstance& inst,
                                                    std::size_t users) {
    std::vector<std::vector<TrainEvent>> byUser(users);
    for (const auto& e : inst.events) {
        byUser[e.user.index()].push_back({e.user.index(), e.artist.index(), e.timestamp});
    }
    for (auto& events : byUser) {
        for (std::size_t i = 1; i < events.size(); ++i) {
            for (std::size_t j = i; j > 0 && events[j - 1].timestamp > events[j].timestamp; --j) {
                std::swap(events[j - 1], events[j]);
            }
        }
        const std::size_t n = events.size();
        if (n < 2 || n < inst.minEvents) {
            events.clear();
            continue;
        }
        auto held = static_cast<std::size_t>(
            std::floor(inst.splitFraction * static_cast<double>(n) + 1e-9));
        if (held < 1) held = 1;
        if (held > n - 1) held = n - 1;
        events.resize(n - held);
    }
    return byUser;
}

RecommendationList finish(UserId user, std::vector<Row> rows, std::size_t k) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.tie != b.tie) return a.tie > b.tie;
        return a.artist < b.artist;
    });
    RecommendationList list;
    list.user = user;
    list.k = k;
    for (std::size_t i = 0; i < rows.size() && i < k; ++i) {
        list.ranked.push_back(
            {ArtistId(static_cast<ArtistId::value_type>(rows[i].artist)), rows[i].score});
    }
    return list;
}

}  // namespace

RecommendationList bruteForceRanking(Algorithm algorithm, const OracleInstance& inst,
                                     UserId user, std::size_t k) {
    std::size_t users = 0;
    std::size_t artists = 0;
    for (const auto& e : inst.events) {
        users = std::max(users, e.user.index() + 1);
        artists = std::max(artists, e.artist.index() + 1);
    }
    if (users > kOracleMaxUsers || artists > kOracleMaxArtists ||
        inst.events.size() > kOracleMaxEvents) {
        throw dataError("oracle instance exceeds bounds (" + std::to_string(users) + " users, " +
                        std::to_string(artists) + " artists, " +
                        std::to_string(inst.events.size()) + " events)");
    }
    const auto train = trainingByUser(inst, users);
    const std::size_t u = user.index();
    if (algorithm != Algorithm::Top && (u >= users || train[u].empty())) {
        throw dataError("oracle: user has no training events");
    }

    std::vector<Row> rows;
    switch (algorithm) {
        case Algorithm::Bll: {
            Timestamp ref = 0;
            for (const auto& e : train[u]) ref = std::max(ref, e.timestamp);
            ref = inst.bll.refTime.value_or(ref + 1);
            for (std::size_t a = 0; a < artists; ++a) {
                double sum = 0.0;
                bool seen = false;
                for (const auto& e : train[u]) {
                    if (e.artist != a) continue;
                    seen = true;
                    sum += std::pow(static_cast<double>(ref - e.timestamp + 1), -inst.bll.decay);
                }
                if (seen) rows.push_back({a, std::log(sum), 0.0});
            }
            break;
        }
        case Algorithm::Pop:
        case Algorithm::Time: {
            for (std::size_t a = 0; a < artists; ++a) {
                double count = 0.0;
                Timestamp last = -1;
                for (const auto& e : train[u]) {
                    if (e.artist != a) continue;
                    count += 1.0;
                    last = std::max(last, e.timestamp);
                }
                if (count == 0.0) continue;
                const auto lastD = static_cast<double>(last);
                if (algorithm == Algorithm::Pop) {
                    rows.push_back({a, count, lastD});
                } else {
                    rows.push_back({a, lastD, count});
                }
            }
            break;
        }
        case Algorithm::Top: {
            for (std::size_t a = 0; a < artists; ++a) {
                double count = 0.0;
                for (const auto& events : train) {
                    for (const auto& e : events) count += e.artist == a ? 1.0 : 0.0;
                }
                if (count > 0.0) rows.push_back({a, count, 0.0});
            }
            break;
        }
        case Algorithm::Cf: {
            std::vector<std::vector<bool>> has(users, std::vector<bool>(artists, false));
            std::vector<std::size_t> setSize(users, 0);
            for (std::size_t v = 0; v < users; ++v) {
                for (const auto& e : train[v]) has[v][e.artist] = true;
                for (std::size_t a = 0; a < artists; ++a) setSize[v] += has[v][a] ? 1 : 0;
            }
            struct Pair {
                std::size_t user;
                double sim;
            };
            std::vector<Pair> pairs;
            for (std::size_t v = 0; v < users; ++v) {
                if (v == u || setSize[v] == 0) continue;
                std::size_t shared = 0;
                for (std::size_t a = 0; a < artists; ++a) shared += has[u][a] && has[v][a] ? 1 : 0;
                const double sim =
                    static_cast<double>(shared) /
                    std::sqrt(static_cast<double>(setSize[u]) * static_cast<double>(setSize[v]));
                if (sim > 0.0) pairs.push_back({v, sim});
            }
            std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
                if (a.sim != b.sim) return a.sim > b.sim;
                return a.user < b.user;
            });
            if (pairs.size() > inst.cf.neighborhoodSize) pairs.resize(inst.cf.neighborhoodSize);
            for (std::size_t a = 0; a < artists; ++a) {
                double score = 0.0;
                bool any = false;
                for (const auto& p : pairs) {
                    if (!has[p.user][a]) continue;
                    score += p.sim;
                    any = true;
                }
                if (any) rows.push_back({a, score, 0.0});
            }
            break;
        }
    }
    return finish(user, std::move(rows), k);
}

}  // namespace artpref
