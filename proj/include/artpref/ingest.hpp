#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "artpref/types.hpp"

namespace artpref {

/// Which tab-separated columns hold the user key, artist key and timestamp.
/// The default matches the LFM-1b listening-events layout
/// (user, artist, album, track, timestamp).
struct ColumnSchema {
    std::size_t user = 0;
    std::size_t artist = 1;
    std::size_t timestamp = 4;

    /// Parses "user=0,artist=1,ts=4". Unnamed fields keep their defaults.
    static ColumnSchema parse(std::string_view text);
    std::string toString() const;

    std::size_t requiredColumns() const;

    friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};

/// One record with its external keys, before id assignment.
struct RawEvent {
    std::string user;
    std::string artist;
    Timestamp timestamp = 0;
};

struct ListeningEvent {
    UserId user;
    ArtistId artist;
    Timestamp timestamp = 0;

    friend bool operator==(const ListeningEvent&, const ListeningEvent&) = default;
};

using EventLog = std::vector<ListeningEvent>;

/// Bijection between external keys and dense ids, assigned in first-seen order.
template <typename Id>
class KeyIndex {
public:
    Id intern(std::string_view key) {
        auto it = lookup_.find(std::string(key));
        if (it != lookup_.end()) return it->second;
        const Id id(static_cast<typename Id::value_type>(keys_.size()));
        keys_.emplace_back(key);
        lookup_.emplace(keys_.back(), id);
        return id;
    }

    std::optional<Id> find(std::string_view key) const {
        auto it = lookup_.find(std::string(key));
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& key(Id id) const { return keys_.at(id.index()); }
    std::size_t size() const { return keys_.size(); }
    std::span<const std::string> keys() const { return keys_; }

private:
    std::vector<std::string> keys_;
    std::unordered_map<std::string, Id> lookup_;
};

struct IdMaps {
    KeyIndex<UserId> users;
    KeyIndex<ArtistId> artists;
};

enum class ErrorPolicy { FailFast, SkipAndCount };

/// Parses "fail"/"fail-fast" or "skip"/"skip-and-count".
ErrorPolicy parseErrorPolicy(std::string_view text);

struct LoadResult {
    EventLog events;
    IdMaps ids;
    std::size_t skipped = 0;
};

/// Extracts the schema's three fields from one tab-separated line. Throws
/// ParseError carrying `lineNumber` on too few columns, a non-integer or a
/// negative timestamp.
RawEvent parseEventLine(std::string_view line, const ColumnSchema& schema,
                        std::size_t lineNumber = 0);

/// Reads newline-delimited records. Blank lines are ignored. Under
/// FailFast the first malformed line throws; under SkipAndCount it is
/// dropped and counted.
LoadResult loadEvents(std::istream& source, const ColumnSchema& schema, ErrorPolicy policy);

/// Same as loadEvents, reading a file that may be gzip-compressed.
LoadResult loadEventsFile(const std::filesystem::path& path, const ColumnSchema& schema,
                          ErrorPolicy policy);

/// Reads a whole file, transparently inflating gzip input.
std::string readInputFile(const std::filesystem::path& path);

struct Listen {
    ArtistId artist;
    Timestamp timestamp = 0;

    friend bool operator==(const Listen&, const Listen&) = default;
};

/// A user's listens in chronological order (stable on equal timestamps)
/// together with per-artist aggregates.
struct UserHistory {
    UserId user;
    std::vector<Listen> events;
    std::map<ArtistId, std::uint32_t> artistCounts;
    std::map<ArtistId, Timestamp> artistLastPlayed;

    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }
};

/// Builds a history for every user id in [0, userCount); the result is
/// indexed by UserId::index().
std::vector<UserHistory> buildUserHistories(const EventLog& log, std::size_t userCount);

/// Overload sizing the result from the largest user id in the log.
std::vector<UserHistory> buildUserHistories(const EventLog& log);

}  // namespace artpref
