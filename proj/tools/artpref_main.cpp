// artpref: command-line entry point for the listening-preference pipeline.
//
//   artpref synth   --users 500 --artists 2000 --events 200..400 --seed 42 --out synth.tsv
//   artpref ingest  --events synth.tsv
//   artpref profile --events synth.tsv --group-size 166 --out groups.csv
//   artpref stats   --groups groups.csv --events synth.tsv
//   artpref split   --events synth.tsv --groups groups.csv --fraction 0.01
//   artpref eval    --events synth.tsv --groups groups.csv --out results.csv
//   artpref run     --events synth.tsv --out-dir out/
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "artpref/error.hpp"
#include "artpref/eval.hpp"
#include "artpref/pipeline.hpp"
#include "artpref/split.hpp"
#include "artpref/synth.hpp"

namespace {

using artpref::RawConfig;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

/// Flag values collected as text and validated together with the config
/// file, so both routes share one set of range checks.
struct FlagSet {
    std::map<std::string, std::string> values;

    CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& key,
                     const std::string& help) {
        return app->add_option(flag, values[key], help);
    }

    void addCommon(CLI::App* app) {
        add(app, "--events", "events", "Listening-event TSV (optionally gzip-compressed)");
        add(app, "--schema", "schema", "Column schema, e.g. user=0,artist=1,ts=4");
        add(app, "--on-error", "onError", "Malformed lines: fail or skip");
        add(app, "--min-events", "minEvents", "Minimum events for a user to be scored");
        add(app, "--threads", "threads", "Worker threads (0 = all cores)");
    }

    void addEval(CLI::App* app) {
        add(app, "--fraction", "splitFraction", "Most recent fraction of events held out");
        add(app, "--algo", "algorithms", "Comma list of bll,top,pop,time,cf");
        add(app, "--bll-d", "bllDecay", "BLL decay exponent");
        add(app, "--cf-neighbors", "cfNeighbors", "CF neighborhood size");
        add(app, "--k-max", "kMax", "Largest list length evaluated");
    }

    /// Merges non-empty flag values over `base`.
    RawConfig merged(RawConfig base = {}) const {
        for (const auto& [key, value] : values) {
            if (!value.empty()) base[key] = value;
        }
        return base;
    }
};

artpref::RunConfig configFrom(const FlagSet& flags, const std::string& configPath = {}) {
    RawConfig base;
    if (!configPath.empty()) base = artpref::readConfigFile(configPath);
    auto config = artpref::validateConfig(flags.merged(base));
    if (config.eventsPath.empty()) throw artpref::usageError("--events is required");
    return config;
}

artpref::Dataset load(const artpref::RunConfig& config) {
    if (!std::filesystem::exists(config.eventsPath)) {
        throw artpref::ioError("events file not found: " + config.eventsPath);
    }
    return artpref::loadDataset(config.eventsPath, config.schema, config.onError);
}

void printStats(std::ostream& out, const artpref::Dataset& data) {
    out << "events\t" << data.log.events.size() << '\n'
        << "users\t" << data.log.ids.users.size() << '\n'
        << "artists\t" << data.log.ids.artists.size() << '\n'
        << "skipped\t" << data.log.skipped << '\n';
}

std::pair<std::size_t, std::size_t> parseEventRange(const std::string& text) {
    auto number = [&](const std::string& s) -> std::size_t {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != s.size() || s.empty() || s.front() == '-') {
            throw artpref::usageError("--events must be N or MIN..MAX (got '" + text + "')");
        }
        return static_cast<std::size_t>(v);
    };
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const auto n = number(text);
        return {n, n};
    }
    return {number(text.substr(0, dots)), number(text.substr(dots + 2))};
}

int exitCodeFor(artpref::ErrorKind kind) {
    switch (kind) {
        case artpref::ErrorKind::Usage: return kExitUsage;
        case artpref::ErrorKind::Data: return kExitData;
        case artpref::ErrorKind::Io: return kExitIo;
    }
    return kExitData;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Artist preference modeling with base-level activation"};
    app.require_subcommand(1);

    // ingest
    FlagSet ingestFlags;
    auto* ingest = app.add_subcommand("ingest", "Parse an events file and summarize it");
    ingestFlags.addCommon(ingest);
    std::string ingestOut;
    ingest->add_option("--out", ingestOut, "Write user_key,n_events,n_artists,first_ts,last_ts");

    // profile
    FlagSet profileFlags;
    auto* profile = app.add_subcommand("profile", "Score mainstreaminess and form groups");
    profileFlags.addCommon(profile);
    profileFlags.add(profile, "--group-size", "groupSize", "Users per group");
    std::string profileOut = "groups.csv";
    profile->add_option("--out", profileOut, "groups.csv path");

    // stats
    FlagSet statsFlags;
    auto* stats = app.add_subcommand("stats", "Per-group dataset statistics");
    statsFlags.addCommon(stats);
    std::string statsGroups;
    std::string statsOut;
    stats->add_option("--groups", statsGroups, "groups.csv from `profile`")->required();
    stats->add_option("--out", statsOut, "stats.csv path (default: stdout)");

    // split
    FlagSet splitFlags;
    auto* split = app.add_subcommand("split", "Time-based train/test split per group");
    splitFlags.addCommon(split);
    splitFlags.add(split, "--fraction", "splitFraction", "Most recent fraction held out");
    std::string splitGroups;
    std::string splitManifest;
    split->add_option("--groups", splitGroups, "groups.csv from `profile`")->required();
    split->add_option("--manifest", splitManifest, "Write user_key,n_train,n_test");

    // eval
    FlagSet evalFlags;
    auto* eval = app.add_subcommand("eval", "Recall/precision@k per algorithm and group");
    evalFlags.addCommon(eval);
    evalFlags.addEval(eval);
    std::string evalGroups;
    std::string evalOut = "results.csv";
    std::string plotDir;
    eval->add_option("--groups", evalGroups, "groups.csv from `profile`")->required();
    eval->add_option("--out", evalOut, "results.csv path");
    eval->add_option("--plot-data", plotDir, "Directory for per-curve recall,precision files");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic listening log");
    artpref::SynthConfig synthConfig;
    std::string synthEvents = "200..400";
    std::string synthOut;
    unsigned synthThreads = 0;
    synth->add_option("--users", synthConfig.users, "Number of users");
    synth->add_option("--artists", synthConfig.artists, "Number of artists");
    synth->add_option("--events", synthEvents, "Events per user, N or MIN..MAX");
    synth->add_option("--zipf", synthConfig.zipfExponent, "Global popularity exponent");
    synth->add_option("--reconsume", synthConfig.reconsumeProb, "Re-listen probability");
    synth->add_option("--recency", synthConfig.recencyBias, "Power-law exponent over listen age");
    synth->add_option("--time-span", synthConfig.timeSpan, "Seconds covered per user");
    synth->add_option("--start", synthConfig.startTime, "First possible timestamp");
    synth->add_option("--seed", synthConfig.seed, "Generator seed");
    synth->add_option("--threads", synthThreads, "Worker threads (0 = all cores)");
    synth->add_option("--out", synthOut, "Output TSV path")->required();

    // run
    FlagSet runFlags;
    auto* run = app.add_subcommand("run", "Full pipeline: ingest, profile, split, eval, report");
    runFlags.addCommon(run);
    runFlags.addEval(run);
    runFlags.add(run, "--group-size", "groupSize", "Users per group");
    runFlags.add(run, "--out-dir", "outputDir", "Output directory");
    runFlags.add(run, "--seed", "seed", "Recorded seed");
    std::string runConfigPath;
    bool runPlot = false;
    run->add_option("--config", runConfigPath, "key = value config file (flags override it)");
    run->add_flag("--plot-data", runPlot, "Also write per-curve plot files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (*ingest) {
            const auto config = configFrom(ingestFlags);
            const auto data = load(config);
            printStats(std::cout, data);
            if (!ingestOut.empty()) {
                std::ofstream out(ingestOut, std::ios::binary | std::ios::trunc);
                if (!out) throw artpref::ioError("cannot write " + ingestOut);
                out << "user_key,n_events,n_artists,first_ts,last_ts\n";
                for (const auto& h : data.histories) {
                    if (h.empty()) continue;
                    out << data.log.ids.users.key(h.user) << ',' << h.size() << ','
                        << h.artistCounts.size() << ',' << h.events.front().timestamp << ','
                        << h.events.back().timestamp << '\n';
                }
                if (!out) throw artpref::ioError("write failure on " + ingestOut);
            }
        } else if (*profile) {
            const auto config = configFrom(profileFlags);
            const auto data = load(config);
            const auto groups =
                artpref::profileUsers(data, config.groupSize, config.minEvents, config.threads);
            if (groups.groupSize < config.groupSize) {
                std::cerr << "profile: only " << groups.scores.size()
                          << " scored users; group size reduced to " << groups.groupSize << '\n';
            }
            artpref::writeGroupsCsv(profileOut, data, groups);
            std::cout << "scored " << groups.scores.size() << " users into 3 groups of "
                      << groups.groupSize << " -> " << profileOut << '\n';
        } else if (*stats) {
            const auto config = configFrom(statsFlags);
            const auto data = load(config);
            const auto groups = artpref::readGroupsCsv(statsGroups, data);
            if (statsOut.empty()) {
                artpref::writeStatsCsv(std::cout, data, groups);
            } else {
                artpref::writeStatsCsv(statsOut, data, groups);
            }
        } else if (*split) {
            const auto config = configFrom(splitFlags);
            const auto data = load(config);
            const auto groups = artpref::readGroupsCsv(splitGroups, data);
            const auto dataset =
                artpref::splitAll(data.histories, config.splitFraction, config.minEvents);
            std::cout << "group,users,test_events\n";
            for (const auto& row : artpref::groupTestEvents(groups, dataset)) {
                std::cout << artpref::groupName(row.group) << ',' << row.users << ','
                          << row.testEvents << '\n';
            }
            if (!splitManifest.empty()) {
                artpref::writeSplitManifest(splitManifest, data, groups, dataset);
            }
        } else if (*eval) {
            const auto config = configFrom(evalFlags);
            const auto data = load(config);
            const auto groups = artpref::readGroupsCsv(evalGroups, data);
            const auto dataset =
                artpref::splitAll(data.histories, config.splitFraction, config.minEvents);
            const auto reports = artpref::evaluateGroups(dataset, groups, config);
            artpref::emitReport(reports, evalOut);
            if (!plotDir.empty()) artpref::emitPlotData(reports, plotDir);
            std::cout << "wrote " << reports.size() << " curves -> " << evalOut << '\n';
        } else if (*synth) {
            const auto [lo, hi] = parseEventRange(synthEvents);
            synthConfig.minEventsPerUser = lo;
            synthConfig.maxEventsPerUser = hi;
            const auto events = artpref::generateSynthetic(synthConfig, synthThreads);
            std::ofstream out(synthOut, std::ios::binary | std::ios::trunc);
            if (!out) throw artpref::ioError("cannot write " + synthOut);
            artpref::writeSyntheticTsv(out, events);
            out.flush();
            if (!out) throw artpref::ioError("write failure on " + synthOut);
            std::cout << "wrote " << events.size() << " events -> " << synthOut << '\n';
        } else if (*run) {
            if (runPlot) runFlags.values["plotData"] = "true";
            RawConfig base;
            if (!runConfigPath.empty()) base = artpref::readConfigFile(runConfigPath);
            RawConfig raw = runFlags.merged(base);
            if (!raw.contains("outputDir")) {
                if (const char* env = std::getenv("ARTPREF_OUTPUT_DIR"); env && *env) {
                    raw["outputDir"] = env;
                }
            }
            const auto config = artpref::validateConfig(raw);
            if (config.eventsPath.empty()) throw artpref::usageError("--events is required");
            const auto outputs = artpref::runPipeline(config);
            if (outputs.effectiveGroupSize < config.groupSize) {
                std::cerr << "profile: group size reduced to " << outputs.effectiveGroupSize
                          << " to fit the scored users\n";
            }
            std::cout << "group,test_events\n";
            for (const auto& t : outputs.testEvents) {
                std::cout << artpref::groupName(t.group) << ',' << t.testEvents << '\n';
            }
            std::cout << "results -> " << outputs.results.string() << '\n';
        }
    } catch (const artpref::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exitCodeFor(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
