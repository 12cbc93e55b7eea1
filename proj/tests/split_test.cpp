#include <gtest/gtest.h>

#include <random>

#include "artpref/error.hpp"
#include "artpref/split.hpp"

using namespace artpref;

namespace {

UserHistory historyOfSize(std::size_t n, UserId user = UserId(0), Timestamp step = 1) {
    EventLog log;
    for (std::size_t i = 0; i < n; ++i) {
        log.push_back({UserId(0), ArtistId(static_cast<std::uint32_t>(i % 5)),
                       static_cast<Timestamp>(i) * step});
    }
    auto h = buildUserHistories(log).front();
    h.user = user;
    return h;
}

}  // namespace

TEST(TestEventCount, FloorsWithMinimumOne) {
    EXPECT_EQ(testEventCount(250, 0.01), 2u);
    EXPECT_EQ(testEventCount(50, 0.01), 1u);
    EXPECT_EQ(testEventCount(100, 0.01), 1u);
    EXPECT_EQ(testEventCount(1000, 0.01), 10u);
    EXPECT_EQ(testEventCount(2, 0.01), 1u);
    EXPECT_EQ(testEventCount(4, 0.5), 2u);
    EXPECT_EQ(testEventCount(100, 0.29), 29u);
    EXPECT_EQ(testEventCount(2, 0.99), 1u);  // training keeps at least one
    EXPECT_THROW(testEventCount(10, 0.0), Error);
    EXPECT_THROW(testEventCount(10, 1.0), Error);
}

TEST(TimeSplit, TakesMostRecentEvents) {
    const auto h = historyOfSize(250);
    const auto s = timeSplit(h, 0.01);
    EXPECT_EQ(s.train.size(), 248u);
    ASSERT_EQ(s.test.size(), 2u);
    EXPECT_EQ(s.test[0].timestamp, 248);
    EXPECT_EQ(s.test[1].timestamp, 249);
}

TEST(TimeSplit, StableUnderTies) {
    const auto h = historyOfSize(100, UserId(0), 0);  // all timestamps 0
    const auto s = timeSplit(h, 0.01);
    ASSERT_EQ(s.test.size(), 1u);
    EXPECT_EQ(s.test[0], h.events.back());
    EXPECT_EQ(s.test[0].artist, ArtistId(99 % 5));
}

TEST(TimeSplit, RejectsTooShortHistory) {
    EXPECT_THROW(timeSplit(historyOfSize(1), 0.01), Error);
    EXPECT_THROW(timeSplit(UserHistory{}, 0.01), Error);
}

TEST(SplitGroup, SumsTestEventsAndDropsShortHistories) {
    std::vector<UserHistory> hs{historyOfSize(100, UserId(0)), historyOfSize(250, UserId(1)),
                                historyOfSize(1, UserId(2))};
    const std::vector<UserId> group{UserId(0), UserId(1), UserId(2)};
    const auto split = splitGroup(hs, group, 0.01);
    EXPECT_EQ(split.testEvents(), 3u);
    EXPECT_EQ(split.trainEvents(), 347u);
    EXPECT_EQ(split.dropped, 1u);
    EXPECT_EQ(split.find(UserId(2)), nullptr);

    const std::vector<UserId> onlyShort{UserId(2)};
    EXPECT_THROW(splitGroup(hs, onlyShort, 0.01), Error);
}

TEST(SplitGroup, HalfSplit) {
    std::vector<UserHistory> hs{historyOfSize(4)};
    const std::vector<UserId> group{UserId(0)};
    const auto s = splitGroup(hs, group, 0.5);
    EXPECT_EQ(s.find(UserId(0))->train.size(), 2u);
    EXPECT_EQ(s.find(UserId(0))->test.size(), 2u);
}

TEST(TimeSplit, ConservationOrderingMonotonicity) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 400;
        EventLog log;
        for (std::size_t i = 0; i < n; ++i) {
            log.push_back({UserId(0), ArtistId(static_cast<std::uint32_t>(rng() % 9)),
                           static_cast<Timestamp>(rng() % 100)});
        }
        const auto h = buildUserHistories(log).front();
        const double f = 0.001 + 0.99 * static_cast<double>(rng() % 1000) / 1000.0;
        const auto s = timeSplit(h, f);
        ASSERT_EQ(s.train.size() + s.test.size(), n);
        ASSERT_FALSE(s.test.empty());
        ASSERT_FALSE(s.train.empty());
        for (const auto& tr : s.train) {
            for (const auto& te : s.test) ASSERT_LE(tr.timestamp, te.timestamp);
        }
        EXPECT_LE(testEventCount(n, f), testEventCount(n, std::min(0.999, f + 0.05)));
    }
}
