#include "artpref/synth.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "artpref/error.hpp"
#include "artpref/parallel.hpp"

namespace artpref {

namespace {

__extension__ typedef unsigned __int128 Uint128;

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t SplitMix64::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
    state_ += kGolden;
    return mix(state_);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
}

std::uint64_t Xoshiro256::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Xoshiro256::below(std::uint64_t bound) {
    Uint128 m = static_cast<Uint128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = -bound % bound;
        while (low < threshold) {
            m = static_cast<Uint128>(next()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

void SynthConfig::validate() const {
    auto fail = [](const std::string& message) { throw usageError("synth: " + message); };
    if (users < 1) fail("users must be >= 1");
    if (artists < 1) fail("artists must be >= 1");
    if (minEventsPerUser < 1) fail("events per user must be >= 1");
    if (maxEventsPerUser < minEventsPerUser) fail("events range must satisfy min <= max");
    if (!(zipfExponent > 0.0)) fail("zipf exponent must be > 0");
    if (!(reconsumeProb >= 0.0 && reconsumeProb <= 1.0)) fail("reconsume must be in [0,1]");
    if (!(recencyBias > 0.0)) fail("recency bias must be > 0");
    if (timeSpan < 1) fail("time span must be >= 1 second");
    if (startTime < 0) fail("start time must be >= 0");
}

std::uint64_t userSeed(std::uint64_t seed, std::size_t userIndex) {
    return SplitMix64::mix(seed + kGolden * (static_cast<std::uint64_t>(userIndex) + 1));
}

std::vector<SynthEvent> generateSynthetic(const SynthConfig& config, unsigned threads) {
    config.validate();

    // Unnormalized cumulative Zipf weights over popularity ranks.
    std::vector<double> zipfCdf(config.artists);
    double acc = 0.0;
    for (std::size_t r = 0; r < config.artists; ++r) {
        acc += std::pow(static_cast<double>(r + 1), -config.zipfExponent);
        zipfCdf[r] = acc;
    }
    // ageCdf[m] = sum of (a + 1)^-recencyBias over ages a < m.
    std::vector<double> ageCdf(config.maxEventsPerUser + 1, 0.0);
    for (std::size_t a = 0; a < config.maxEventsPerUser; ++a) {
        ageCdf[a + 1] = ageCdf[a] + std::pow(static_cast<double>(a + 1), -config.recencyBias);
    }

    std::vector<std::vector<SynthEvent>> perUser(config.users);
    parallelFor(config.users, threads, [&](std::size_t u) {
        Xoshiro256 rng(userSeed(config.seed, u));
        const std::size_t n =
            config.minEventsPerUser +
            rng.below(config.maxEventsPerUser - config.minEventsPerUser + 1);

        std::vector<Timestamp> times(n);
        for (auto& t : times) {
            t = config.startTime + static_cast<Timestamp>(
                                       rng.below(static_cast<std::uint64_t>(config.timeSpan)));
        }
        std::sort(times.begin(), times.end());

        auto& events = perUser[u];
        events.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t artist = 0;
            const double coin = rng.uniform();
            if (i > 0 && coin < config.reconsumeProb) {
                const double x = rng.uniform() * ageCdf[i];
                const auto it = std::upper_bound(ageCdf.begin() + 1,
                                                 ageCdf.begin() + static_cast<std::ptrdiff_t>(i) + 1, x);
                auto age = static_cast<std::size_t>(it - (ageCdf.begin() + 1));
                age = std::min(age, i - 1);
                artist = events[i - 1 - age].artist;
            } else {
                const double x = rng.uniform() * zipfCdf.back();
                auto rank = static_cast<std::size_t>(
                    std::upper_bound(zipfCdf.begin(), zipfCdf.end(), x) - zipfCdf.begin());
                artist = static_cast<std::uint32_t>(std::min(rank, config.artists - 1));
            }
            events.push_back({static_cast<std::uint32_t>(u), artist, times[i]});
        }
    });

    std::vector<SynthEvent> all;
    for (auto& events : perUser) all.insert(all.end(), events.begin(), events.end());
    return all;
}

void writeSyntheticTsv(std::ostream& out, std::span<const SynthEvent> events) {
    for (const auto& e : events) {
        out << e.user << '\t' << e.artist << "\t0\t0\t" << e.timestamp << '\n';
    }
}

std::string syntheticTsv(std::span<const SynthEvent> events) {
    std::ostringstream out;
    writeSyntheticTsv(out, events);
    return std::move(out).str();
}

LoadResult synthesizeLog(const SynthConfig& config, unsigned threads) {
    std::istringstream in(syntheticTsv(generateSynthetic(config, threads)));
    return loadEvents(in, ColumnSchema{}, ErrorPolicy::FailFast);
}

}  // namespace artpref
