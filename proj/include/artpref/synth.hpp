#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "artpref/ingest.hpp"
#include "artpref/types.hpp"

namespace artpref {

/// SplitMix64 (Steele, Lea, Flood 2014). Used to expand seeds.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();

    /// The SplitMix64 output function applied to a single value.
    static std::uint64_t mix(std::uint64_t value);

private:
    std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman, Vigna), state filled from SplitMix64(seed).
/// Distributions are implemented here rather than via <random> so that a
/// seed yields the same stream on every platform.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, bound), Lemire's multiply-and-reject. bound > 0.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t s_[4];
};

struct SynthConfig {
    std::size_t users = 500;
    std::size_t artists = 2000;
    std::size_t minEventsPerUser = 200;
    std::size_t maxEventsPerUser = 400;
    /// Global artist popularity: P(rank r) proportional to r^-zipfExponent.
    double zipfExponent = 1.1;
    /// Chance that an event repeats an artist from the user's own past.
    double reconsumeProb = 0.7;
    /// A past listen that is `age` events old is repeated with weight
    /// (age + 1)^-recencyBias.
    double recencyBias = 0.8;
    Timestamp startTime = 1104537600;  // 2005-01-01
    Timestamp timeSpan = 4 * 365 * 86400;
    std::uint64_t seed = 42;

    /// Throws a usage error naming the offending field.
    void validate() const;
};

/// One generated record; user and artist are the raw generator indices
/// (artist index = popularity rank, 0 most popular).
struct SynthEvent {
    std::uint32_t user = 0;
    std::uint32_t artist = 0;
    Timestamp timestamp = 0;

    friend bool operator==(const SynthEvent&, const SynthEvent&) = default;
};

/// Sub-seed for one user's stream.
std::uint64_t userSeed(std::uint64_t seed, std::size_t userIndex);

/// Events grouped by user (ascending) and chronological within a user.
/// Each user draws from an independent stream, so the result is the same
/// for any thread count.
std::vector<SynthEvent> generateSynthetic(const SynthConfig& config, unsigned threads = 1);

/// Writes rows `user \t artist \t album \t track \t timestamp` matching the
/// default ColumnSchema. Album and track columns are placeholders.
void writeSyntheticTsv(std::ostream& out, std::span<const SynthEvent> events);
std::string syntheticTsv(std::span<const SynthEvent> events);

/// Generates, serializes and re-loads through the regular ingest path.
LoadResult synthesizeLog(const SynthConfig& config, unsigned threads = 1);

}  // namespace artpref
