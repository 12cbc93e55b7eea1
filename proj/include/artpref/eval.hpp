#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "artpref/recommend.hpp"
#include "artpref/split.hpp"
#include "artpref/types.hpp"

namespace artpref {

/// Per-user hit counts; hitsAtK[k - 1] holds hits within the first k.
struct UserResult {
    UserId user;
    std::vector<std::uint32_t> hitsAtK;
    std::size_t testSetSize = 0;
};

/// hits[k - 1] = |first k ranked artists & testArtists| for k = 1..kMax.
/// `testArtists` must be sorted and non-empty.
std::vector<std::uint32_t> hitsAtK(const RecommendationList& ranked,
                                   std::span<const ArtistId> testArtists, std::size_t kMax);

/// Sorted distinct artists of a user's test listens.
std::vector<ArtistId> relevantArtists(std::span<const Listen> test);

struct CurvePoint {
    double recall = 0.0;
    double precision = 0.0;
};

struct EvalReport {
    std::string algorithm;
    std::string group;
    std::vector<CurvePoint> points;  // index k - 1
    std::size_t usersEvaluated = 0;
};

/// Macro averages over users: recall@k = hits/testSetSize and
/// precision@k = hits/k, with k as the denominator even for short lists.
std::vector<CurvePoint> recallPrecisionAtK(std::span<const UserResult> userResults,
                                           std::size_t kMax);

/// Scores every group member that has both train and test data. Each user
/// is ranked once at kMax. Results follow the order of `group` whatever the
/// thread count.
std::vector<UserResult> evaluateUsers(const SplitDataset& split, const Recommender& recommender,
                                      std::span<const UserId> group, std::size_t kMax,
                                      unsigned threads = 1);

EvalReport evaluateAlgorithm(const SplitDataset& split, const Recommender& recommender,
                             std::span<const UserId> group, std::string groupName,
                             std::size_t kMax, unsigned threads = 1);

/// CSV `algorithm,group,k,recall,precision,users`, rows sorted by
/// (algorithm, group, k), reals with six decimals.
void writeReportCsv(std::ostream& out, std::span<const EvalReport> reports);
void emitReport(std::span<const EvalReport> reports, const std::filesystem::path& path);

/// One `<algorithm>_<group>.csv` per report holding `recall,precision` rows
/// for k = 1..kMax. Returns the files written.
std::vector<std::filesystem::path> emitPlotData(std::span<const EvalReport> reports,
                                                const std::filesystem::path& directory);

/// printf("%.6f") formatting; glibc rounds the exact binary value, ties to even.
std::string formatFixed6(double value);

}  // namespace artpref
