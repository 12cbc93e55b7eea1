#include "artpref/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "artpref/error.hpp"
#include "artpref/parallel.hpp"

namespace artpref {

std::vector<std::uint32_t> hitsAtK(const RecommendationList& ranked,
                                   std::span<const ArtistId> testArtists, std::size_t kMax) {
    if (testArtists.empty()) throw dataError("hits@k undefined for an empty test set");
    std::vector<std::uint32_t> hits(kMax, 0);
    std::uint32_t running = 0;
    for (std::size_t k = 0; k < kMax; ++k) {
        if (k < ranked.ranked.size() &&
            std::binary_search(testArtists.begin(), testArtists.end(), ranked.ranked[k].artist)) {
            ++running;
        }
        hits[k] = running;
    }
    return hits;
}

std::vector<ArtistId> relevantArtists(std::span<const Listen> test) {
    std::vector<ArtistId> artists;
    artists.reserve(test.size());
    for (const auto& l : test) artists.push_back(l.artist);
    std::sort(artists.begin(), artists.end());
    artists.erase(std::unique(artists.begin(), artists.end()), artists.end());
    return artists;
}

std::vector<CurvePoint> recallPrecisionAtK(std::span<const UserResult> userResults,
                                           std::size_t kMax) {
    if (userResults.empty()) throw dataError("no users to average over");
    std::vector<CurvePoint> points(kMax);
    for (const auto& r : userResults) {
        if (r.hitsAtK.size() < kMax || r.testSetSize == 0) {
            throw dataError("malformed result for user " + std::to_string(r.user.value()));
        }
        for (std::size_t k = 0; k < kMax; ++k) {
            const auto hits = static_cast<double>(r.hitsAtK[k]);
            points[k].recall += hits / static_cast<double>(r.testSetSize);
            points[k].precision += hits / static_cast<double>(k + 1);
        }
    }
    const auto users = static_cast<double>(userResults.size());
    for (auto& p : points) {
        p.recall /= users;
        p.precision /= users;
    }
    return points;
}

std::vector<UserResult> evaluateUsers(const SplitDataset& split, const Recommender& recommender,
                                      std::span<const UserId> group, std::size_t kMax,
                                      unsigned threads) {
    if (kMax == 0) throw usageError("kMax must be >= 1");

    std::vector<const UserSplit*> evaluable;
    for (UserId u : group) {
        const UserSplit* s = split.find(u);
        if (s != nullptr && !s->train.empty() && !s->test.empty()) evaluable.push_back(s);
    }
    if (evaluable.empty()) throw dataError("group has no evaluable users");

    std::vector<UserResult> results(evaluable.size());
    parallelFor(evaluable.size(), threads, [&](std::size_t i) {
        const UserSplit& s = *evaluable[i];
        const auto relevant = relevantArtists(s.test);
        // Cold users (empty CF lists) stay in with zero hits.
        results[i] = {s.user, hitsAtK(recommender.recommend(s.user, kMax), relevant, kMax),
                      relevant.size()};
    });
    return results;
}

EvalReport evaluateAlgorithm(const SplitDataset& split, const Recommender& recommender,
                             std::span<const UserId> group, std::string groupName,
                             std::size_t kMax, unsigned threads) {
    auto results = evaluateUsers(split, recommender, group, kMax, threads);
    // Sum in user-id order so the averages do not depend on member order.
    std::sort(results.begin(), results.end(),
              [](const UserResult& a, const UserResult& b) { return a.user < b.user; });
    EvalReport report;
    report.algorithm = std::string(algorithmName(recommender.algorithm()));
    report.group = std::move(groupName);
    report.points = recallPrecisionAtK(results, kMax);
    report.usersEvaluated = results.size();
    return report;
}

std::string formatFixed6(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.6f", value);
    return buffer;
}

void writeReportCsv(std::ostream& out, std::span<const EvalReport> reports) {
    std::vector<const EvalReport*> order;
    for (const auto& r : reports) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(), [](const EvalReport* a, const EvalReport* b) {
        if (a->algorithm != b->algorithm) return a->algorithm < b->algorithm;
        return a->group < b->group;
    });

    out << "algorithm,group,k,recall,precision,users\n";
    for (const EvalReport* r : order) {
        for (std::size_t k = 0; k < r->points.size(); ++k) {
            out << r->algorithm << ',' << r->group << ',' << (k + 1) << ','
                << formatFixed6(r->points[k].recall) << ','
                << formatFixed6(r->points[k].precision) << ',' << r->usersEvaluated << '\n';
        }
    }
}

void emitReport(std::span<const EvalReport> reports, const std::filesystem::path& path) {
    if (reports.empty()) throw dataError("no reports to write");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ioError("cannot write " + path.string());
    writeReportCsv(out, reports);
    out.flush();
    if (!out) throw ioError("write failure on " + path.string());
}

std::vector<std::filesystem::path> emitPlotData(std::span<const EvalReport> reports,
                                                const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw ioError("cannot create " + directory.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    for (const auto& r : reports) {
        const auto path = directory / (r.algorithm + "_" + r.group + ".csv");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw ioError("cannot write " + path.string());
        out << "recall,precision\n";
        for (const auto& p : r.points) {
            out << formatFixed6(p.recall) << ',' << formatFixed6(p.precision) << '\n';
        }
        if (!out) throw ioError("write failure on " + path.string());
        written.push_back(path);
    }
    return written;
}

}  // namespace artpref
