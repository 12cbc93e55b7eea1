#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "artpref/ingest.hpp"
#include "artpref/types.hpp"

namespace artpref {

/// Number of most recent events held out: max(1, floor(fraction * n)),
/// capped at n - 1 so training is never empty.
std::size_t testEventCount(std::size_t n, double fraction);

struct UserSplit {
    UserId user;
    std::vector<Listen> train;
    std::vector<Listen> test;
};

/// Puts the last testEventCount(n, fraction) listens (in the history's
/// stable chronological order) into test. Needs at least two events and
/// 0 < fraction < 1.
UserSplit timeSplit(const UserHistory& history, double fraction);

struct SplitDataset {
    double fraction = 0.0;
    std::map<UserId, UserSplit> perUser;
    /// Requested users left out because they had fewer than two events.
    std::size_t dropped = 0;

    const UserSplit* find(UserId user) const;
    std::size_t testEvents() const;
    std::size_t trainEvents() const;
};

/// Splits the listed users; `histories` is indexed by user id. Users that
/// cannot be split are dropped and counted. Throws when nobody remains.
SplitDataset splitGroup(std::span<const UserHistory> histories, std::span<const UserId> users,
                        double fraction);

/// Splits every user with at least `minEvents` (and never fewer than two)
/// events.
SplitDataset splitAll(std::span<const UserHistory> histories, double fraction,
                      std::size_t minEvents = 2);

}  // namespace artpref
