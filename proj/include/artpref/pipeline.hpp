#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "artpref/eval.hpp"
#include "artpref/ingest.hpp"
#include "artpref/profiling.hpp"
#include "artpref/recommend.hpp"

namespace artpref {

std::string_view artifactVersion();

/// Raw `key = value` settings before validation.
using RawConfig = std::map<std::string, std::string>;

/// Parses a plain-text config: one `key = value` per line, `#` comments,
/// blank lines ignored.
RawConfig parseConfigText(std::string_view text);
RawConfig readConfigFile(const std::filesystem::path& path);

struct RunConfig {
    std::string eventsPath;
    ColumnSchema schema;
    ErrorPolicy onError = ErrorPolicy::FailFast;
    std::size_t groupSize = 1000;
    std::size_t minEvents = 2;
    double splitFraction = 0.01;
    std::size_t kMax = 20;
    double bllDecay = 0.5;
    std::size_t cfNeighbors = 20;
    std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
    std::filesystem::path outputDir = ".";
    std::uint64_t seed = 42;
    unsigned threads = 0;  // 0 = hardware concurrency
    bool plotData = false;

    RecommenderParams recommenderParams() const;

    /// `key = value` lines of every setting that can influence results.
    /// Output location and thread count are left out: they never change
    /// the numbers.
    std::string normalized() const;
};

/// Fills defaults and checks ranges. Throws a usage error naming the key
/// and its legal range, or naming an unknown key.
RunConfig validateConfig(const RawConfig& raw);

/// Loaded log plus chronological per-user histories.
struct Dataset {
    LoadResult log;
    std::vector<UserHistory> histories;
};

Dataset loadDataset(const std::filesystem::path& path, const ColumnSchema& schema,
                    ErrorPolicy policy);

struct UserGroups {
    std::vector<MainstreaminessScore> scores;  // ascending user id
    GroupAssignment groups;
    std::size_t groupSize = 0;
};

/// Largest group size not above `requested` for which three disjoint
/// groups fit into `scoredUsers`. Throws when even size 1 does not fit.
std::size_t effectiveGroupSize(std::size_t requested, std::size_t scoredUsers);

UserGroups profileUsers(const Dataset& data, std::size_t groupSize, std::size_t minEvents,
                        unsigned threads);

/// `user_key,score,group` for every scored user; ungrouped users get "-".
void writeGroupsCsv(const std::filesystem::path& path, const Dataset& data,
                    const UserGroups& groups);
/// Inverse of writeGroupsCsv against a loaded dataset's id map.
UserGroups readGroupsCsv(const std::filesystem::path& path, const Dataset& data);

/// Per-group rows: `group,users,artists,events,artists_per_user,mainstreaminess`.
void writeStatsCsv(std::ostream& out, const Dataset& data, const UserGroups& groups);
void writeStatsCsv(const std::filesystem::path& path, const Dataset& data,
                   const UserGroups& groups);

/// `user_key,n_train,n_test` for the grouped users, in group order.
void writeSplitManifest(const std::filesystem::path& path, const Dataset& data,
                        const UserGroups& groups, const SplitDataset& split);

struct GroupTestEvents {
    Group group;
    std::size_t users = 0;
    std::size_t testEvents = 0;
};

std::vector<GroupTestEvents> groupTestEvents(const UserGroups& groups, const SplitDataset& split);

/// One report per (algorithm, group).
std::vector<EvalReport> evaluateGroups(const SplitDataset& split, const UserGroups& groups,
                                       const RunConfig& config);

struct PipelineOutputs {
    std::filesystem::path groups;
    std::filesystem::path stats;
    std::filesystem::path results;
    std::filesystem::path manifest;
    std::vector<std::filesystem::path> plotData;
    std::vector<EvalReport> reports;
    std::vector<GroupTestEvents> testEvents;
    std::size_t effectiveGroupSize = 0;
};

/// ingest -> profile -> split -> evaluate -> report. Writes groups.csv,
/// stats.csv, results.csv and manifest.txt under config.outputDir. Errors
/// are prefixed with the failing stage; files already written are removed.
PipelineOutputs runPipeline(const RunConfig& config);

std::uint32_t fileCrc32(const std::filesystem::path& path);

}  // namespace artpref
