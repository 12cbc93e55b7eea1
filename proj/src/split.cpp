#include "artpref/split.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "artpref/error.hpp"

namespace artpref {

namespace {

void checkFraction(double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw usageError("splitFraction must be in (0,1)");
    }
}

}  // namespace

std::size_t testEventCount(std::size_t n, double fraction) {
    checkFraction(fraction);
    if (n < 2) return 0;
    // The small epsilon keeps products such as 0.29 * 100 from flooring to 28.
    const double raw = std::floor(fraction * static_cast<double>(n) + 1e-9);
    const auto held = static_cast<std::size_t>(raw);
    return std::clamp<std::size_t>(held, 1, n - 1);
}

UserSplit timeSplit(const UserHistory& history, double fraction) {
    checkFraction(fraction);
    const std::size_t n = history.size();
    if (n < 2) {
        throw dataError("user " + std::to_string(history.user.value()) + " has " +
                        std::to_string(n) + " event(s); a split needs at least 2");
    }
    const std::size_t nTest = testEventCount(n, fraction);
    const auto cut = history.events.begin() + static_cast<std::ptrdiff_t>(n - nTest);

    UserSplit split;
    split.user = history.user;
    split.train.assign(history.events.begin(), cut);
    split.test.assign(cut, history.events.end());
    return split;
}

const UserSplit* SplitDataset::find(UserId user) const {
    auto it = perUser.find(user);
    return it == perUser.end() ? nullptr : &it->second;
}

std::size_t SplitDataset::testEvents() const {
    std::size_t total = 0;
    for (const auto& [user, s] : perUser) total += s.test.size();
    return total;
}

std::size_t SplitDataset::trainEvents() const {
    std::size_t total = 0;
    for (const auto& [user, s] : perUser) total += s.train.size();
    return total;
}

SplitDataset splitGroup(std::span<const UserHistory> histories, std::span<const UserId> users,
                        double fraction) {
    checkFraction(fraction);
    SplitDataset dataset;
    dataset.fraction = fraction;
    for (UserId u : users) {
        if (u.index() >= histories.size() || histories[u.index()].size() < 2) {
            ++dataset.dropped;
            continue;
        }
        dataset.perUser.emplace(u, timeSplit(histories[u.index()], fraction));
    }
    if (dataset.perUser.empty()) throw dataError("no user in the group has enough events to split");
    return dataset;
}

SplitDataset splitAll(std::span<const UserHistory> histories, double fraction,
                      std::size_t minEvents) {
    std::vector<UserId> users;
    for (const auto& h : histories) {
        if (h.size() >= std::max<std::size_t>(2, minEvents)) users.push_back(h.user);
    }
    return splitGroup(histories, users, fraction);
}

}  // namespace artpref
