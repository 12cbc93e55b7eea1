#include "artpref/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <streambuf>

#include <zlib.h>

#include "artpref/error.hpp"

namespace artpref {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::size_t parseColumnIndex(std::string_view text, std::string_view field) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw usageError("schema: column for '" + std::string(field) +
                         "' must be a non-negative integer, got '" + std::string(text) + "'");
    }
    return value;
}

// zlib passes non-gzip files through unchanged, so one reader covers both.
class GzStreambuf : public std::streambuf {
public:
    explicit GzStreambuf(const std::filesystem::path& path)
        : path_(path), file_(gzopen(path.c_str(), "rb")) {
        if (file_ == nullptr) throw ioError("cannot open " + path.string());
        gzbuffer(file_, 1 << 17);
    }
    ~GzStreambuf() override { gzclose(file_); }
    GzStreambuf(const GzStreambuf&) = delete;
    GzStreambuf& operator=(const GzStreambuf&) = delete;

protected:
    int_type underflow() override {
        const int n = gzread(file_, buffer_.data(), static_cast<unsigned>(buffer_.size()));
        if (n < 0) {
            int code = 0;
            throw ioError("read failed for " + path_.string() + ": " + gzerror(file_, &code));
        }
        if (n == 0) return traits_type::eof();
        setg(buffer_.data(), buffer_.data(), buffer_.data() + n);
        return traits_type::to_int_type(buffer_[0]);
    }

private:
    std::filesystem::path path_;
    gzFile file_;
    std::array<char, 1 << 16> buffer_{};
};

}  // namespace

ColumnSchema ColumnSchema::parse(std::string_view text) {
    ColumnSchema schema;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view item = trim(text.substr(0, comma));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        if (item.empty()) continue;

        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw usageError("schema: expected name=column, got '" + std::string(item) + "'");
        }
        const std::string_view name = trim(item.substr(0, eq));
        const std::size_t column = parseColumnIndex(trim(item.substr(eq + 1)), name);
        if (name == "user") {
            schema.user = column;
        } else if (name == "artist") {
            schema.artist = column;
        } else if (name == "ts" || name == "timestamp") {
            schema.timestamp = column;
        } else {
            throw usageError("schema: unknown field '" + std::string(name) +
                             "' (expected user, artist or ts)");
        }
    }
    if (schema.user == schema.artist || schema.user == schema.timestamp ||
        schema.artist == schema.timestamp) {
        throw usageError("schema: user, artist and ts must use distinct columns");
    }
    return schema;
}

std::string ColumnSchema::toString() const {
    return "user=" + std::to_string(user) + ",artist=" + std::to_string(artist) +
           ",ts=" + std::to_string(timestamp);
}

std::size_t ColumnSchema::requiredColumns() const {
    return std::max({user, artist, timestamp}) + 1;
}

ErrorPolicy parseErrorPolicy(std::string_view text) {
    if (text == "fail" || text == "fail-fast") return ErrorPolicy::FailFast;
    if (text == "skip" || text == "skip-and-count") return ErrorPolicy::SkipAndCount;
    throw usageError("onError must be one of fail, skip (got '" + std::string(text) + "')");
}

RawEvent parseEventLine(std::string_view line, const ColumnSchema& schema,
                        std::size_t lineNumber) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    // Only the columns the schema needs are materialized.
    const std::size_t needed = schema.requiredColumns();
    std::vector<std::string_view> columns;
    columns.reserve(needed);
    std::size_t start = 0;
    while (columns.size() < needed) {
        const auto tab = line.find('\t', start);
        columns.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    if (columns.size() < needed) {
        throw ParseError(lineNumber, "wrong column count: expected at least " +
                                         std::to_string(needed) + ", got " +
                                         std::to_string(columns.size()));
    }

    const std::string_view tsField = columns[schema.timestamp];
    Timestamp ts = 0;
    auto [ptr, ec] = std::from_chars(tsField.data(), tsField.data() + tsField.size(), ts);
    if (tsField.empty() || ec != std::errc() || ptr != tsField.data() + tsField.size()) {
        throw ParseError(lineNumber,
                         "non-integer timestamp '" + std::string(tsField) + "'");
    }
    if (ts < 0) throw ParseError(lineNumber, "negative timestamp " + std::to_string(ts));

    const std::string_view user = columns[schema.user];
    const std::string_view artist = columns[schema.artist];
    if (user.empty()) throw ParseError(lineNumber, "empty user key");
    if (artist.empty()) throw ParseError(lineNumber, "empty artist key");

    return RawEvent{std::string(user), std::string(artist), ts};
}

LoadResult loadEvents(std::istream& source, const ColumnSchema& schema, ErrorPolicy policy) {
    LoadResult result;
    std::string line;
    std::size_t lineNumber = 0;
    while (std::getline(source, line)) {
        ++lineNumber;
        if (line.empty() || line == "\r") continue;
        RawEvent raw;
        try {
            raw = parseEventLine(line, schema, lineNumber);
        } catch (const ParseError&) {
            if (policy == ErrorPolicy::FailFast) throw;
            ++result.skipped;
            continue;
        }
        result.events.push_back(ListeningEvent{result.ids.users.intern(raw.user),
                                               result.ids.artists.intern(raw.artist),
                                               raw.timestamp});
    }
    if (source.bad()) throw ioError("read failure at line " + std::to_string(lineNumber + 1));
    return result;
}

std::string readInputFile(const std::filesystem::path& path) {
    GzStreambuf buffer(path);
    std::ostringstream out;
    out << &buffer;
    return std::move(out).str();
}

LoadResult loadEventsFile(const std::filesystem::path& path, const ColumnSchema& schema,
                          ErrorPolicy policy) {
    GzStreambuf buffer(path);
    std::istream in(&buffer);
    return loadEvents(in, schema, policy);
}

std::vector<UserHistory> buildUserHistories(const EventLog& log, std::size_t userCount) {
    std::vector<UserHistory> histories(userCount);
    for (std::size_t u = 0; u < userCount; ++u) {
        histories[u].user = UserId(static_cast<UserId::value_type>(u));
    }
    for (const auto& e : log) {
        if (e.user.index() >= userCount) {
            throw dataError("event references user id " + std::to_string(e.user.value()) +
                            " outside the id map");
        }
        histories[e.user.index()].events.push_back(Listen{e.artist, e.timestamp});
    }
    for (auto& h : histories) {
        std::stable_sort(h.events.begin(), h.events.end(),
                         [](const Listen& a, const Listen& b) { return a.timestamp < b.timestamp; });
        for (const auto& l : h.events) {
            ++h.artistCounts[l.artist];
            // Chronological order makes the last write the latest timestamp.
            h.artistLastPlayed[l.artist] = l.timestamp;
        }
    }
    return histories;
}

std::vector<UserHistory> buildUserHistories(const EventLog& log) {
    std::size_t userCount = 0;
    for (const auto& e : log) userCount = std::max(userCount, e.user.index() + 1);
    return buildUserHistories(log, userCount);
}

}  // namespace artpref
