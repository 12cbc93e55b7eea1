#include "artpref/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include <zlib.h>

#include "artpref/error.hpp"
#include "artpref/split.hpp"

#ifndef ARTPREF_VERSION
#define ARTPREF_VERSION "0.0.0"
#endif

namespace artpref {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> splitOn(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    for (;;) {
        const auto pos = s.find(sep);
        parts.push_back(s.substr(0, pos));
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
    return parts;
}

template <typename T>
T parseInteger(const std::string& key, std::string_view text, T min, const std::string& range) {
    T value{};
    text = trim(text);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || value < min) {
        throw usageError(key + " must be " + range + " (got '" + std::string(text) + "')");
    }
    return value;
}

double parseReal(const std::string& key, std::string_view text, const std::string& range) {
    text = trim(text);
    const std::string copy(text);
    char* end = nullptr;
    const double value = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size() || !std::isfinite(value)) {
        throw usageError(key + " must be " + range + " (got '" + copy + "')");
    }
    return value;
}

std::string realText(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::ofstream openOutput(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ioError("cannot write " + path.string());
    return out;
}

void finishOutput(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw ioError("write failure on " + path.string());
}

// Re-throws artpref errors with the stage name in front of the message.
template <typename Fn>
auto stage(std::string_view name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(name) + ": " + e.what());
    }
}

}  // namespace

std::string_view artifactVersion() { return ARTPREF_VERSION; }

RawConfig parseConfigText(std::string_view text) {
    RawConfig raw;
    std::size_t lineNumber = 0;
    for (std::string_view line : splitOn(text, '\n')) {
        ++lineNumber;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw usageError("config line " + std::to_string(lineNumber) +
                             ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) {
            throw usageError("config line " + std::to_string(lineNumber) + ": empty key");
        }
        raw[key] = std::string(trim(line.substr(eq + 1)));
    }
    return raw;
}

RawConfig readConfigFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ioError("cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parseConfigText(text.str());
}

RecommenderParams RunConfig::recommenderParams() const {
    RecommenderParams params;
    params.bll.decay = bllDecay;
    params.cf.neighborhoodSize = cfNeighbors;
    return params;
}

std::string RunConfig::normalized() const {
    std::string algos;
    for (Algorithm a : algorithms) {
        if (!algos.empty()) algos += ',';
        algos += algorithmName(a);
    }
    std::ostringstream out;
    out << "events = " << eventsPath << '\n'
        << "schema = " << schema.toString() << '\n'
        << "onError = " << (onError == ErrorPolicy::FailFast ? "fail" : "skip") << '\n'
        << "groupSize = " << groupSize << '\n'
        << "minEvents = " << minEvents << '\n'
        << "splitFraction = " << realText(splitFraction) << '\n'
        << "kMax = " << kMax << '\n'
        << "bllDecay = " << realText(bllDecay) << '\n'
        << "cfNeighbors = " << cfNeighbors << '\n'
        << "algorithms = " << algos << '\n'
        << "seed = " << seed << '\n';
    return out.str();
}

RunConfig validateConfig(const RawConfig& raw) {
    RunConfig config;
    for (const auto& [key, value] : raw) {
        if (key == "events") {
            config.eventsPath = value;
        } else if (key == "schema") {
            config.schema = ColumnSchema::parse(value);
        } else if (key == "onError") {
            config.onError = parseErrorPolicy(value);
        } else if (key == "groupSize") {
            config.groupSize = parseInteger<std::size_t>(key, value, 1, "an integer >= 1");
        } else if (key == "minEvents") {
            config.minEvents = parseInteger<std::size_t>(key, value, 2, "an integer >= 2");
        } else if (key == "splitFraction") {
            config.splitFraction = parseReal(key, value, "in (0,1)");
            if (!(config.splitFraction > 0.0 && config.splitFraction < 1.0)) {
                throw usageError("splitFraction must be in (0,1)");
            }
        } else if (key == "kMax") {
            config.kMax = parseInteger<std::size_t>(key, value, 1, "an integer >= 1");
        } else if (key == "bllDecay") {
            config.bllDecay = parseReal(key, value, "> 0");
            if (!(config.bllDecay > 0.0)) throw usageError("bllDecay must be > 0");
        } else if (key == "cfNeighbors") {
            config.cfNeighbors = parseInteger<std::size_t>(key, value, 1, "an integer >= 1");
        } else if (key == "algorithms") {
            config.algorithms.clear();
            for (std::string_view name : splitOn(value, ',')) {
                name = trim(name);
                if (name.empty()) continue;
                const Algorithm a = parseAlgorithm(name);
                if (std::find(config.algorithms.begin(), config.algorithms.end(), a) ==
                    config.algorithms.end()) {
                    config.algorithms.push_back(a);
                }
            }
            if (config.algorithms.empty()) {
                throw usageError("algorithms must name at least one of bll, top, pop, time, cf");
            }
        } else if (key == "outputDir") {
            if (value.empty()) throw usageError("outputDir must not be empty");
            config.outputDir = value;
        } else if (key == "seed") {
            config.seed = parseInteger<std::uint64_t>(key, value, 0, "a non-negative integer");
        } else if (key == "threads") {
            config.threads = parseInteger<unsigned>(key, value, 0, "an integer >= 0");
        } else if (key == "plotData") {
            if (value != "true" && value != "false") {
                throw usageError("plotData must be true or false");
            }
            config.plotData = value == "true";
        } else {
            throw usageError("unknown config key '" + key + "'");
        }
    }
    return config;
}

Dataset loadDataset(const std::filesystem::path& path, const ColumnSchema& schema,
                    ErrorPolicy policy) {
    Dataset data;
    data.log = loadEventsFile(path, schema, policy);
    if (data.log.events.empty()) throw dataError("no valid events in " + path.string());
    data.histories = buildUserHistories(data.log.events, data.log.ids.users.size());
    return data;
}

std::size_t effectiveGroupSize(std::size_t requested, std::size_t scoredUsers) {
    const std::size_t fit = std::min(requested, scoredUsers / 3);
    if (fit == 0) {
        throw dataError("need at least 3 users with enough events to form groups, have " +
                        std::to_string(scoredUsers));
    }
    return fit;
}

UserGroups profileUsers(const Dataset& data, std::size_t groupSize, std::size_t minEvents,
                        unsigned threads) {
    UserGroups out;
    out.scores = scoreUsers(data.histories, minEvents, threads);
    out.groupSize = effectiveGroupSize(groupSize, out.scores.size());
    out.groups = assignGroups(out.scores, out.groupSize);
    return out;
}

void writeGroupsCsv(const std::filesystem::path& path, const Dataset& data,
                    const UserGroups& groups) {
    std::unordered_map<UserId, Group> groupOf;
    for (Group g : kAllGroups) {
        for (UserId u : groups.groups.members(g)) groupOf.emplace(u, g);
    }
    auto out = openOutput(path);
    out << "user_key,score,group\n";
    char score[64];
    for (const auto& s : groups.scores) {
        std::snprintf(score, sizeof score, "%.9f", s.score);
        const auto g = groupOf.find(s.user);
        out << data.log.ids.users.key(s.user) << ',' << score << ','
            << (g == groupOf.end() ? std::string_view("-") : groupName(g->second)) << '\n';
    }
    finishOutput(out, path);
}

UserGroups readGroupsCsv(const std::filesystem::path& path, const Dataset& data) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ioError("cannot open " + path.string());
    UserGroups out;
    std::string line;
    std::size_t lineNumber = 0;
    while (std::getline(in, line)) {
        ++lineNumber;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineNumber == 1) {
            if (line != "user_key,score,group") {
                throw ParseError(lineNumber, "expected header user_key,score,group");
            }
            continue;
        }
        if (line.empty()) continue;
        const auto fields = splitOn(line, ',');
        if (fields.size() != 3) throw ParseError(lineNumber, "expected 3 fields");
        const auto user = data.log.ids.users.find(fields[0]);
        if (!user) {
            throw ParseError(lineNumber, "user '" + std::string(fields[0]) +
                                             "' does not occur in the events file");
        }
        const std::string scoreText(fields[1]);
        char* end = nullptr;
        const double score = std::strtod(scoreText.c_str(), &end);
        if (scoreText.empty() || end != scoreText.c_str() + scoreText.size()) {
            throw ParseError(lineNumber, "bad score '" + scoreText + "'");
        }
        out.scores.push_back({*user, score});
        if (fields[2] != "-") {
            const Group g = parseGroup(fields[2]);
            auto& members = g == Group::Low   ? out.groups.lowMS
                            : g == Group::Med ? out.groups.medMS
                                              : out.groups.highMS;
            members.push_back(*user);
        }
    }
    std::sort(out.scores.begin(), out.scores.end(),
              [](const auto& a, const auto& b) { return a.user < b.user; });
    out.groupSize = out.groups.lowMS.size();
    if (out.groupSize == 0 || out.groups.medMS.size() != out.groupSize ||
        out.groups.highMS.size() != out.groupSize) {
        throw dataError(path.string() + ": groups must be non-empty and of equal size");
    }
    return out;
}

void writeStatsCsv(std::ostream& out, const Dataset& data, const UserGroups& groups) {
    out << "group,users,artists,events,artists_per_user,mainstreaminess\n";
    for (Group g : kAllGroups) {
        const GroupStats s = groupStats(groups.groups.members(g), data.histories, groups.scores);
        out << groupName(g) << ',' << s.users << ',' << s.distinctArtists << ','
            << s.listeningEvents << ',' << formatFixed6(s.avgArtistsPerUser) << ','
            << formatFixed6(s.avgMainstreaminess) << '\n';
    }
}

void writeStatsCsv(const std::filesystem::path& path, const Dataset& data,
                   const UserGroups& groups) {
    auto out = openOutput(path);
    writeStatsCsv(out, data, groups);
    finishOutput(out, path);
}

void writeSplitManifest(const std::filesystem::path& path, const Dataset& data,
                        const UserGroups& groups, const SplitDataset& split) {
    auto out = openOutput(path);
    out << "user_key,n_train,n_test\n";
    for (Group g : kAllGroups) {
        for (UserId u : groups.groups.members(g)) {
            const UserSplit* s = split.find(u);
            if (s == nullptr) continue;
            out << data.log.ids.users.key(u) << ',' << s->train.size() << ',' << s->test.size()
                << '\n';
        }
    }
    finishOutput(out, path);
}

std::vector<GroupTestEvents> groupTestEvents(const UserGroups& groups,
                                             const SplitDataset& split) {
    std::vector<GroupTestEvents> out;
    for (Group g : kAllGroups) {
        GroupTestEvents row{g, 0, 0};
        for (UserId u : groups.groups.members(g)) {
            if (const UserSplit* s = split.find(u)) {
                ++row.users;
                row.testEvents += s->test.size();
            }
        }
        out.push_back(row);
    }
    return out;
}

std::vector<EvalReport> evaluateGroups(const SplitDataset& split, const UserGroups& groups,
                                       const RunConfig& config) {
    const TrainingSet training = TrainingSet::fromSplit(split);
    std::vector<EvalReport> reports;
    for (Algorithm a : config.algorithms) {
        const auto recommender = makeRecommender(a, training, config.recommenderParams());
        for (Group g : kAllGroups) {
            reports.push_back(evaluateAlgorithm(split, *recommender, groups.groups.members(g),
                                                std::string(groupName(g)), config.kMax,
                                                config.threads));
        }
    }
    return reports;
}

std::uint32_t fileCrc32(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ioError("cannot open " + path.string());
    uLong crc = crc32(0L, Z_NULL, 0);
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        const auto n = in.gcount();
        if (n > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(buffer.data()),
                               static_cast<uInt>(n));
    }
    if (in.bad()) throw ioError("read failure on " + path.string());
    return static_cast<std::uint32_t>(crc);
}

PipelineOutputs runPipeline(const RunConfig& config) {
    if (config.eventsPath.empty()) throw usageError("events path is required");

    PipelineOutputs outputs;
    std::vector<std::filesystem::path> written;
    try {
        const std::filesystem::path eventsPath(config.eventsPath);
        if (!std::filesystem::exists(eventsPath)) {
            throw Error(ErrorKind::Io, "ingest: events file not found: " + config.eventsPath);
        }
        std::error_code ec;
        std::filesystem::create_directories(config.outputDir, ec);
        if (ec) throw ioError("cannot create " + config.outputDir.string() + ": " + ec.message());

        const Dataset data = stage("ingest", [&] {
            return loadDataset(eventsPath, config.schema, config.onError);
        });
        const std::uint32_t crc = stage("ingest", [&] { return fileCrc32(eventsPath); });

        const UserGroups groups = stage("profile", [&] {
            return profileUsers(data, config.groupSize, config.minEvents, config.threads);
        });
        outputs.effectiveGroupSize = groups.groupSize;
        outputs.groups = config.outputDir / "groups.csv";
        outputs.stats = config.outputDir / "stats.csv";
        stage("profile", [&] {
            written.push_back(outputs.groups);
            writeGroupsCsv(outputs.groups, data, groups);
            written.push_back(outputs.stats);
            writeStatsCsv(outputs.stats, data, groups);
        });

        const SplitDataset split = stage("split", [&] {
            return splitAll(data.histories, config.splitFraction, config.minEvents);
        });
        outputs.testEvents = groupTestEvents(groups, split);

        outputs.reports = stage("eval", [&] { return evaluateGroups(split, groups, config); });

        outputs.results = config.outputDir / "results.csv";
        stage("report", [&] {
            written.push_back(outputs.results);
            emitReport(outputs.reports, outputs.results);
            if (config.plotData) {
                const auto dir = config.outputDir / "plot-data";
                for (const auto& r : outputs.reports) {
                    written.push_back(dir / (r.algorithm + "_" + r.group + ".csv"));
                }
                outputs.plotData = emitPlotData(outputs.reports, dir);
            }
        });

        outputs.manifest = config.outputDir / "manifest.txt";
        stage("report", [&] {
            written.push_back(outputs.manifest);
            auto out = openOutput(outputs.manifest);
            char crcText[16];
            std::snprintf(crcText, sizeof crcText, "%08x", crc);
            out << "artifactVersion = " << artifactVersion() << '\n'
                << "inputCrc32 = " << crcText << '\n'
                << "inputBytes = " << std::filesystem::file_size(eventsPath) << '\n'
                << config.normalized()
                << "effectiveGroupSize = " << groups.groupSize << '\n'
                << "loadedEvents = " << data.log.events.size() << '\n'
                << "skippedLines = " << data.log.skipped << '\n'
                << "users = " << data.log.ids.users.size() << '\n'
                << "artists = " << data.log.ids.artists.size() << '\n'
                << "scoredUsers = " << groups.scores.size() << '\n';
            for (const auto& t : outputs.testEvents) {
                out << "testEvents." << groupName(t.group) << " = " << t.testEvents << '\n';
            }
            finishOutput(out, outputs.manifest);
        });
    } catch (...) {
        for (const auto& path : written) {
            std::error_code ignored;
            std::filesystem::remove(path, ignored);
        }
        throw;
    }
    return outputs;
}

}  // namespace artpref
