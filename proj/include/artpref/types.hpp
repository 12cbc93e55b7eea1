#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace artpref {

/// Dense, zero-based index for a user or an artist. The tag keeps the two
/// id spaces from being mixed up.
template <typename Tag>
class DenseId {
public:
    using value_type = std::uint32_t;

    constexpr DenseId() = default;
    constexpr explicit DenseId(value_type v) : value_(v) {}

    constexpr value_type value() const { return value_; }
    constexpr std::size_t index() const { return value_; }

    friend constexpr bool operator==(const DenseId&, const DenseId&) = default;
    friend constexpr auto operator<=>(const DenseId&, const DenseId&) = default;

private:
    value_type value_ = 0;
};

using UserId = DenseId<struct UserTag>;
using ArtistId = DenseId<struct ArtistTag>;

/// Unix epoch seconds.
using Timestamp = std::int64_t;

}  // namespace artpref

template <typename Tag>
struct std::hash<artpref::DenseId<Tag>> {
    std::size_t operator()(const artpref::DenseId<Tag>& id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value());
    }
};
