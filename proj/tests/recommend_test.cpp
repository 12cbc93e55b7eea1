#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "artpref/error.hpp"
#include "artpref/recommend.hpp"

using namespace artpref;

namespace {

ArtistId A(std::uint32_t i) { return ArtistId(i); }
UserId U(std::uint32_t i) { return UserId(i); }

UserProfile profileOf(UserId user, std::vector<Listen> listens) {
    std::stable_sort(listens.begin(), listens.end(),
                     [](const Listen& a, const Listen& b) { return a.timestamp < b.timestamp; });
    return UserProfile(user, listens);
}

// A training set in which each user's listens are all train data.
SplitDataset trainOnly(const std::vector<std::vector<Listen>>& perUser) {
    SplitDataset split;
    split.fraction = 0.01;
    for (std::size_t u = 0; u < perUser.size(); ++u) {
        UserSplit s;
        s.user = U(static_cast<std::uint32_t>(u));
        s.train = perUser[u];
        split.perUser.emplace(s.user, s);
    }
    return split;
}

std::vector<Listen> setOf(std::initializer_list<std::uint32_t> artists) {
    std::vector<Listen> out;
    Timestamp t = 0;
    for (auto a : artists) out.push_back({A(a), t++});
    return out;
}

}  // namespace

TEST(BllActivation, WorkedExamples) {
    const std::vector<Timestamp> one{100};
    EXPECT_DOUBLE_EQ(bllActivation(one, 100, 0.5), 0.0);

    // Ages after the +1 shift: {1, 4}.
    const std::vector<Timestamp> two{100, 97};
    EXPECT_NEAR(bllActivation(two, 100, 0.5), 0.405465108108164382, 1e-12);

    const std::vector<Timestamp> three{100, 100, 100};
    EXPECT_NEAR(bllActivation(three, 100, 0.5), 1.098612288668109691, 1e-12);
}

TEST(BllActivation, Errors) {
    EXPECT_THROW(bllActivation(std::vector<Timestamp>{}, 10, 0.5), Error);
    EXPECT_THROW(bllActivation(std::vector<Timestamp>{11}, 10, 0.5), Error);
    EXPECT_THROW(bllActivation(std::vector<Timestamp>{1}, 10, 0.0), Error);
}

TEST(RecommendBll, FrequencyCanOutweighRecency) {
    // refTime = latest + 1 = 1001. Ages (ref - t + 1): a {10, 20, 30}, b {5}.
    const auto p = profileOf(U(0), {{A(0), 992}, {A(0), 982}, {A(0), 972}, {A(1), 997}});
    BllParams params;
    params.refTime = 1001;
    const auto list = recommendBll(p, params, 5);
    ASSERT_EQ(list.ranked.size(), 2u);
    EXPECT_EQ(list.ranked[0].artist, A(0));
    EXPECT_NEAR(list.ranked[0].score, -0.325164165100726614, 1e-12);
    EXPECT_NEAR(list.ranked[1].score, -0.804718956217050187, 1e-12);
}

TEST(RecommendBll, RecencyAndTies) {
    const auto recent = profileOf(U(0), {{A(0), 10}, {A(1), 1000}});
    EXPECT_EQ(recommendBll(recent, {}, 2).ranked[0].artist, A(1));

    const auto tied = profileOf(U(0), {{A(5), 10}, {A(2), 10}, {A(5), 20}, {A(2), 20}});
    const auto list = recommendBll(tied, {}, 2);
    EXPECT_EQ(list.artists(), (std::vector<ArtistId>{A(2), A(5)}));

    EXPECT_THROW(recommendBll(UserProfile{}, {}, 3), Error);
}

TEST(RecommendBll, DefaultReferenceIsLatestPlusOne) {
    const auto p = profileOf(U(0), {{A(0), 50}});
    EXPECT_DOUBLE_EQ(recommendBll(p, {}, 1).ranked[0].score, std::log(std::pow(2.0, -0.5)));
}

TEST(RecommendPop, CountsThenRecency) {
    auto p = profileOf(U(0), {{A(0), 1}, {A(0), 2}, {A(0), 3}, {A(0), 4}, {A(0), 5},
                              {A(1), 6}, {A(1), 7}});
    EXPECT_EQ(recommendPop(p, 5).artists(), (std::vector<ArtistId>{A(0), A(1)}));

    p = profileOf(U(0), {{A(0), 1}, {A(1), 2}, {A(0), 3}, {A(1), 9}});
    EXPECT_EQ(recommendPop(p, 5).artists(), (std::vector<ArtistId>{A(1), A(0)}));

    p = profileOf(U(0), {{A(0), 1}, {A(1), 2}, {A(1), 3}, {A(2), 4}});
    EXPECT_EQ(recommendPop(p, 1).artists(), std::vector<ArtistId>{A(1)});
}

TEST(RecommendTime, LastPlayedThenCount) {
    auto p = profileOf(U(0), {{A(1), 90}, {A(0), 100}});
    EXPECT_EQ(recommendTime(p, 5).artists(), (std::vector<ArtistId>{A(0), A(1)}));

    p = profileOf(U(0), {{A(1), 10}, {A(1), 20}, {A(1), 30}, {A(1), 50}, {A(0), 50}});
    EXPECT_EQ(recommendTime(p, 5).artists(), (std::vector<ArtistId>{A(1), A(0)}));

    p = profileOf(U(0), {{A(3), 1}});
    EXPECT_EQ(recommendTime(p, 20).ranked.size(), 1u);
}

TEST(RecommendTop, CountsAndTieRule) {
    ArtistCounts counts{{A(0), 10}, {A(2), 7}, {A(1), 7}};
    EXPECT_EQ(recommendTop(U(0), counts, 3).artists(),
              (std::vector<ArtistId>{A(0), A(1), A(2)}));
    EXPECT_EQ(recommendTop(U(4), counts, 100).ranked.size(), 3u);

    // Brute-force re-rank after boosting a non-top artist.
    counts[A(9)] = 1;
    EXPECT_EQ(recommendTop(U(0), counts, 2).artists(), (std::vector<ArtistId>{A(0), A(1)}));
    counts[A(9)] = 8;
    EXPECT_EQ(recommendTop(U(0), counts, 2).artists(), (std::vector<ArtistId>{A(0), A(9)}));

    EXPECT_THROW(recommendTop(U(0), ArtistCounts{}, 3), Error);
}

TEST(UserSimilarity, BinaryCosine) {
    const std::vector<ArtistId> ab{A(0), A(1)};
    const std::vector<ArtistId> bcd{A(1), A(2), A(3)};
    const std::vector<ArtistId> xy{A(8), A(9)};
    EXPECT_DOUBLE_EQ(userSimilarity(ab, ab), 1.0);
    EXPECT_DOUBLE_EQ(userSimilarity(ab, xy), 0.0);
    EXPECT_NEAR(userSimilarity(ab, bcd), 0.408248290463863016, 1e-15);
    EXPECT_THROW(userSimilarity(ab, std::vector<ArtistId>{}), Error);
}

TEST(RecommendCf, ThreeUserExample) {
    // u = {a, b}; v1 = {a, b, c}; v2 = {b, d}. a=0 b=1 c=2 d=3.
    const auto split = trainOnly({setOf({0, 1}), setOf({0, 1, 2}), setOf({1, 3})});
    const auto training = TrainingSet::fromSplit(split);
    const CfIndex index(training);

    const auto neighbors = index.neighbors(U(0), 2);
    ASSERT_EQ(neighbors.size(), 2u);
    EXPECT_EQ(neighbors[0].user, U(1));
    EXPECT_NEAR(neighbors[0].similarity, 0.816496580927726033, 1e-15);
    EXPECT_DOUBLE_EQ(neighbors[1].similarity, 0.5);

    const auto list = recommendCf(U(0), index, CfParams{2}, 4);
    EXPECT_EQ(list.artists(), (std::vector<ArtistId>{A(1), A(0), A(2), A(3)}));
    EXPECT_NEAR(list.ranked[0].score, 1.316496580927726033, 1e-15);
    EXPECT_NEAR(list.ranked[1].score, 0.816496580927726033, 1e-15);
    EXPECT_EQ(list.ranked[1].score, list.ranked[2].score);
    EXPECT_DOUBLE_EQ(list.ranked[3].score, 0.5);

    const auto single = recommendCf(U(0), index, CfParams{1}, 10);
    EXPECT_EQ(single.artists(), (std::vector<ArtistId>{A(0), A(1), A(2)}));
}

TEST(RecommendCf, ClonesAndColdUsers) {
    const auto split = trainOnly({setOf({3, 4, 5}), setOf({5, 4, 3}), setOf({9})});
    const auto training = TrainingSet::fromSplit(split);
    const CfIndex index(training);

    const auto list = recommendCf(U(0), index, CfParams{}, 10);
    ASSERT_EQ(list.ranked.size(), 3u);
    for (const auto& r : list.ranked) EXPECT_DOUBLE_EQ(r.score, 1.0);

    EXPECT_TRUE(recommendCf(U(2), index, CfParams{}, 10).ranked.empty());
    EXPECT_THROW(recommendCf(U(0), index, CfParams{0}, 10), Error);
}

TEST(TrainingSet, HoldsOnlyTrainListens) {
    SplitDataset split;
    UserSplit s;
    s.user = U(1);
    s.train = {{A(0), 1}, {A(1), 2}};
    s.test = {{A(7), 3}};
    split.perUser.emplace(s.user, s);
    const auto training = TrainingSet::fromSplit(split);
    ASSERT_NE(training.profile(U(1)), nullptr);
    EXPECT_EQ(training.profile(U(0)), nullptr);
    EXPECT_EQ(training.profile(U(1))->eventCount(), 2u);
    EXPECT_EQ(training.profile(U(1))->latest(), 2);
    EXPECT_FALSE(training.globalCounts().contains(A(7)));
}

TEST(BllProperties, MonotoneInRecencyAndFrequency) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
        const double d = 0.05 + 0.95 * static_cast<double>(rng() % 1000) / 1000.0;
        const Timestamp ref = 1'000'000;
        std::vector<Timestamp> ts(1 + rng() % 20);
        for (auto& t : ts) t = ref - static_cast<Timestamp>(rng() % 100000);
        const double base = bllActivation(ts, ref, d);

        auto newer = ts;
        auto& pick = newer[rng() % newer.size()];
        if (pick < ref) {
            pick += 1 + static_cast<Timestamp>(rng() % static_cast<std::uint64_t>(ref - pick));
            EXPECT_GT(bllActivation(newer, ref, d), base);
        }
        auto more = ts;
        more.push_back(ref - static_cast<Timestamp>(rng() % 100000));
        EXPECT_GT(bllActivation(more, ref, d), base);
    }
}

TEST(BllProperties, SmallDecayMatchesPopOrdering) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        // Strictly different counts per artist.
        std::vector<std::uint32_t> counts{1, 2, 3, 4, 5, 6};
        std::shuffle(counts.begin(), counts.end(), rng);
        std::vector<Listen> listens;
        for (std::uint32_t a = 0; a < counts.size(); ++a) {
            for (std::uint32_t c = 0; c < counts[a]; ++c) {
                listens.push_back({A(a), static_cast<Timestamp>(rng() % 10'000'000)});
            }
        }
        const auto p = profileOf(U(0), listens);
        BllParams params;
        params.decay = 1e-6;
        EXPECT_EQ(recommendBll(p, params, 6).artists(), recommendPop(p, 6).artists());
    }
}

TEST(Recommender, FactoryAndNames) {
    for (Algorithm a : kAllAlgorithms) EXPECT_EQ(parseAlgorithm(algorithmName(a)), a);
    EXPECT_THROW(parseAlgorithm("svd"), Error);

    const auto split = trainOnly({setOf({0, 1, 1}), setOf({1, 2})});
    const auto training = TrainingSet::fromSplit(split);
    for (Algorithm a : kAllAlgorithms) {
        const auto r = makeRecommender(a, training, {});
        EXPECT_EQ(r->algorithm(), a);
        const auto first = r->recommend(U(0), 5);
        const auto second = r->recommend(U(0), 5);
        EXPECT_EQ(first.ranked, second.ranked);
        EXPECT_LE(first.ranked.size(), 5u);
    }
    EXPECT_THROW(makeRecommender(Algorithm::Bll, training, {})->recommend(U(9), 5), Error);
    EXPECT_NO_THROW(makeRecommender(Algorithm::Top, training, {})->recommend(U(9), 5));
}
