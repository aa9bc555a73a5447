#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "instance.hpp"
#include "oracle.hpp"
#include "properties.hpp"
#include "trustrec/recommend.hpp"

namespace trustrec {
namespace {

using testkit::RawInstance;

constexpr UserId U0{0}, U1{1}, U2{2};
constexpr ItemId I0{0};

RawInstance instance(std::size_t users, std::size_t items, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                     std::map<std::pair<std::uint32_t, std::uint32_t>, double> ratings) {
    RawInstance r;
    r.users = users;
    r.items = items;
    r.edges = std::move(edges);
    r.ratings = std::move(ratings);
    return r;
}

const RatingScale kFive(1, 5, 1);

TEST(PredictRandom, StaysOnTheScaleWithMeanThree) {
    Rng rng(5);
    double sum = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const auto p = predict_random(kFive, rng);
        ASSERT_TRUE(kFive.contains(p.value));
        EXPECT_FALSE(p.fallback);
        sum += p.value;
    }
    EXPECT_NEAR(sum / n, 3.0, 0.02);
}

TEST(PredictRandom, HalfStepScaleHasEightOutcomes) {
    const RatingScale film(0.5, 4.0, 0.5);
    Rng rng(6);
    std::map<double, int> seen;
    for (int k = 0; k < 4000; ++k) ++seen[predict_random(film, rng).value];
    EXPECT_EQ(seen.size(), 8u);
    EXPECT_EQ(seen.begin()->first, 0.5);
    EXPECT_EQ(seen.rbegin()->first, 4.0);
}

TEST(PredictUniversalRandom, FollowsTheItemDistribution) {
    const auto t = testkit::build_table(instance(3, 1, {}, {{{0, 0}, 5}, {{1, 0}, 5}, {{2, 0}, 4}}));
    Rng rng(7);
    int fives = 0;
    const int n = 30000;
    for (int k = 0; k < n; ++k) {
        const auto v = predict_universal_random(t, I0, rng).value;
        ASSERT_TRUE(v == 4.0 || v == 5.0);
        fives += v == 5.0;
    }
    EXPECT_NEAR(static_cast<double>(fives) / n, 2.0 / 3, 0.015);
}

TEST(PredictUniversalRandom, SingleRatingAndGlobalFallback) {
    const auto single = testkit::build_table(instance(2, 2, {}, {{{0, 0}, 2}, {{1, 1}, 5}}));
    Rng rng(8);
    for (int k = 0; k < 50; ++k) EXPECT_EQ(predict_universal_random(single, I0, rng).value, 2.0);

    const auto global = testkit::build_table(instance(2, 3, {}, {{{0, 0}, 1}, {{1, 1}, 3}}));
    int ones = 0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) {
        const auto p = predict_universal_random(global, ItemId{2}, rng);
        ASSERT_TRUE(p.value == 1.0 || p.value == 3.0);
        EXPECT_FALSE(p.fallback);
        ones += p.value == 1.0;
    }
    EXPECT_NEAR(static_cast<double>(ones) / n, 0.5, 0.02);

    const RatingsTable empty(kFive, 1, 1);
    EXPECT_TRUE(predict_universal_random(empty, I0, rng).fallback);
}

TEST(PredictNeighborCentral, Examples) {
    Rng rng(9);
    const auto pair = instance(3, 1, {{0, 1}, {0, 2}}, {{{1, 0}, 4}, {{2, 0}, 5}});
    const auto g = testkit::build_graph(pair);
    const auto t = testkit::build_table(pair);
    EXPECT_EQ(predict_neighbor_central(g, t, U0, I0, CentralStat::Mean, rng).value, 4.5);
    EXPECT_EQ(predict_neighbor_central(g, t, U0, I0, CentralStat::Median, rng).value, 4.5);

    const auto triple = instance(4, 1, {{0, 1}, {0, 2}, {0, 3}}, {{{1, 0}, 2}, {{2, 0}, 2}, {{3, 0}, 5}});
    const auto g3 = testkit::build_graph(triple);
    const auto t3 = testkit::build_table(triple);
    const auto mode = predict_neighbor_central(g3, t3, U0, I0, CentralStat::Mode, rng);
    EXPECT_EQ(mode.value, 2.0);
    EXPECT_FALSE(mode.fallback);
    EXPECT_EQ(predict_neighbor_central(g3, t3, U0, I0, CentralStat::Median, rng).value, 2.0);
    EXPECT_EQ(predict_neighbor_central(g3, t3, U0, I0, CentralStat::Mean, rng).value, 3.0);

    // in-edges do not count: U1 has no out-neighbours
    EXPECT_TRUE(predict_neighbor_central(g, t, U1, I0, CentralStat::Mean, rng).fallback);
}

TEST(PredictNeighborCentral, TiedModeFallsBack) {
    Rng rng(10);
    const auto r = instance(3, 1, {{0, 1}, {0, 2}}, {{{1, 0}, 4}, {{2, 0}, 2}});
    const auto p =
        predict_neighbor_central(testkit::build_graph(r), testkit::build_table(r), U0, I0, CentralStat::Mode, rng);
    EXPECT_TRUE(p.fallback);
    EXPECT_TRUE(kFive.contains(p.value));
}

TEST(PredictNeighborCentral, WritebackInsertsTheSnappedValue) {
    Rng rng(11);
    const auto r = instance(3, 1, {{0, 1}, {0, 2}}, {{{1, 0}, 4}, {{2, 0}, 5}});
    const auto g = testkit::build_graph(r);
    auto t = testkit::build_table(r);
    const auto p = predict_neighbor_central(g, t, U0, I0, CentralStat::Mean, rng, true);
    EXPECT_EQ(p.value, 4.5);
    EXPECT_EQ(t.rating(U0, I0), 5.0);

    auto untouched = testkit::build_table(r);
    predict_neighbor_central(g, untouched, U0, I0, CentralStat::Mean, rng, false);
    EXPECT_FALSE(untouched.rating(U0, I0).has_value());
}

TEST(PredictJaccardWeightedNeighbors, SingleNeighbourAndFallback) {
    Rng rng(12);
    const auto r = instance(3, 1, {{0, 1}, {1, 2}}, {{{1, 0}, 3}});
    const auto g = testkit::build_graph(r);
    const auto t = testkit::build_table(r);
    const auto p = predict_jaccard_weighted_neighbors(g, t, U0, I0, rng);
    EXPECT_EQ(p.value, 3.0);
    EXPECT_FALSE(p.fallback);
    EXPECT_TRUE(predict_jaccard_weighted_neighbors(g, t, U2, I0, rng).fallback);
}

TEST(PredictMCRandomWalk, ImmediateHit) {
    Rng rng(13);
    const auto r = instance(2, 1, {{0, 1}}, {{{0, 0}, 2}, {{1, 0}, 5}});
    const auto p = predict_mc_random_walk(testkit::build_graph(r), testkit::build_table(r), U0, I0,
                                          WalkParams{50, 0.3, false}, rng);
    EXPECT_EQ(p.value, 2.0);
    EXPECT_FALSE(p.fallback);
}

TEST(PredictMCRandomWalk, IsolatedUserAveragesUniformDraws) {
    Rng rng(14);
    const auto r = instance(2, 1, {}, {{{1, 0}, 5}});
    const auto p = predict_mc_random_walk(testkit::build_graph(r), testkit::build_table(r), U0, I0,
                                          WalkParams{10000, 0.05, false}, rng);
    EXPECT_NEAR(p.value, 3.0, 0.05);
    EXPECT_TRUE(p.fallback);
}

TEST(PredictMCRandomWalk, ChainWithoutJumpsIsDeterministic) {
    Rng rng(15);
    const auto r = instance(3, 1, {{0, 1}}, {{{1, 0}, 4}, {{2, 0}, 1}});
    for (bool weighted : {false, true}) {
        const auto p = predict_mc_random_walk(testkit::build_graph(r), testkit::build_table(r), U0, I0,
                                              WalkParams{200, 0.0, weighted}, rng);
        EXPECT_EQ(p.value, 4.0);
        EXPECT_FALSE(p.fallback);
    }
}

TEST(PredictMCRandomWalk, RejectsBadParameters) {
    Rng rng(16);
    const auto r = instance(2, 1, {{0, 1}}, {});
    const auto g = testkit::build_graph(r);
    const auto t = testkit::build_table(r);
    EXPECT_THROW(predict_mc_random_walk(g, t, U0, I0, WalkParams{0, 0.1, false}, rng), std::invalid_argument);
    EXPECT_THROW(predict_mc_random_walk(g, t, U0, I0, WalkParams{10, 1.5, false}, rng), std::invalid_argument);
}

TEST(RatingBuckets, WeightedAverageExamples) {
    RatingBuckets wa(kFive);
    wa.add(2, 0.2);
    wa.add(5, 0.6);
    EXPECT_DOUBLE_EQ(*wa.weighted_average(), 4.25);

    RatingBuckets intra(kFive);
    intra.add(2, 0.5);
    intra.add(5, 0.25);
    EXPECT_DOUBLE_EQ(*intra.weighted_average(), 3.0);

    RatingBuckets cross(kFive);
    cross.add(4, 0.5 * 0.4);
    cross.add(2, 0.25 * 0.8);
    EXPECT_DOUBLE_EQ(*cross.weighted_average(), 3.0);

    RatingBuckets none(kFive);
    none.add(3, 0.0);
    EXPECT_FALSE(none.weighted_average().has_value());
    EXPECT_FALSE(none.argmax().has_value());
}

TEST(RatingBuckets, ArgmaxExamples) {
    RatingBuckets b(kFive);
    b.add(1, 0.5);
    b.add(3, 0.9);
    b.add(5, 0.7);
    EXPECT_EQ(b.argmax(), 3.0);

    RatingBuckets tie(kFive);
    tie.add(2, 0.5);
    tie.add(4, 0.5);
    EXPECT_EQ(tie.argmax(), 2.0);

    RatingBuckets four(kFive);
    four.add(4, 0.6);
    four.add(5, 0.4);
    EXPECT_EQ(four.argmax(), 4.0);
}

TEST(PredictWA, SingleRaterAndZeroSimilarity) {
    Rng rng(17);
    const auto r = instance(3, 1, {{0, 1}}, {{{1, 0}, 4}, {{2, 0}, 1}});
    const auto g = testkit::build_graph(r);
    const auto t = testkit::build_table(r);
    const auto jm = UserSimilaritySpec::of(UserMetric::JaccardModified);
    // U2 is disconnected, so only U1 carries mass
    EXPECT_EQ(predict_wa(g, t, U0, I0, jm, rng).value, 4.0);
    EXPECT_EQ(predict_mom(g, t, U0, I0, jm, rng).value, 4.0);

    const auto lonely = instance(3, 1, {{1, 2}}, {{{1, 0}, 4}, {{2, 0}, 1}});
    const auto p = predict_wa(testkit::build_graph(lonely), testkit::build_table(lonely), U0, I0, jm, rng);
    EXPECT_TRUE(p.fallback);
}

TEST(PredictIntraItemWA, Examples) {
    Rng rng(18);
    // U1 rated only item 1; J_II(0, 1) = |{2}| / |{1, 2}| = 0.5
    const auto r = instance(3, 2, {{0, 1}}, {{{1, 1}, 3}, {{2, 0}, 5}, {{2, 1}, 1}});
    const auto g = testkit::build_graph(r);
    const auto t = testkit::build_table(r);
    const auto p = predict_intra_item_wa(g, t, U0, I0, ItemSimilaritySpec{ItemMetric::IntraItemJaccard}, rng);
    EXPECT_EQ(p.value, 3.0);
    EXPECT_FALSE(p.fallback);
    EXPECT_TRUE(predict_intra_item_wa(g, t, U2, I0, ItemSimilaritySpec{ItemMetric::IntraItemJaccard}, rng).fallback);
}

TEST(PredictJaccardIntraItemWA, SingleContributorAndFallback) {
    Rng rng(19);
    const auto r = instance(3, 2, {{0, 1}}, {{{1, 1}, 4}, {{2, 0}, 2}, {{2, 1}, 2}});
    const auto g = testkit::build_graph(r);
    const auto t = testkit::build_table(r);
    // U2 has J' = 0 with U0; U1 contributes rating 4 through item 1
    EXPECT_EQ(predict_jaccard_intra_item_wa(g, t, U0, I0, rng).value, 4.0);

    const auto cut = instance(3, 2, {}, {{{1, 1}, 4}, {{2, 0}, 2}, {{2, 1}, 2}});
    EXPECT_TRUE(predict_jaccard_intra_item_wa(testkit::build_graph(cut), testkit::build_table(cut), U0, I0, rng)
                    .fallback);
}

TEST(PredictAllCombined, Examples) {
    Rng rng(20);
    const auto single = instance(2, 2, {{0, 1}}, {{{1, 0}, 5}, {{1, 1}, 5}});
    EXPECT_EQ(predict_all_combined(testkit::build_graph(single), testkit::build_table(single), U0, I0, rng).value,
              5.0);

    // U1 and U2 are mirror images of each other as seen from U0
    const auto mirror = instance(3, 1, {{0, 1}, {0, 2}}, {{{1, 0}, 2}, {{2, 0}, 4}});
    EXPECT_DOUBLE_EQ(
        predict_all_combined(testkit::build_graph(mirror), testkit::build_table(mirror), U0, I0, rng).value, 3.0);

    const auto alone = instance(1, 1, {}, {});
    EXPECT_TRUE(predict_all_combined(testkit::build_graph(alone), testkit::build_table(alone), U0, I0, rng).fallback);
}

TEST(RecommenderSpec, Validation) {
    RecommenderSpec s = named_recommender("mc_random_walk");
    EXPECT_NO_THROW(s.validate());
    s.k_samples = 0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = named_recommender("mc_random_walk");
    s.alpha = -0.1;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = named_recommender("jaccard_wa");
    s.writeback = true;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    EXPECT_THROW(named_recommender("nope"), std::invalid_argument);
}

TEST(Roster, EveryNameResolvesAndValidates) {
    EXPECT_EQ(algorithm_names().size(), 21u);
    for (const auto& name : algorithm_names()) {
        const auto s = named_recommender(name);
        EXPECT_EQ(s.name, name);
        EXPECT_NO_THROW(s.validate()) << name;
    }
    EXPECT_TRUE(named_recommender("neighbor_mode").writeback);
    EXPECT_FALSE(named_recommender("jmom").writeback);
}

TEST(Predict, DispatchMatchesDirectCalls) {
    const auto r = instance(4, 2, {{0, 1}, {1, 2}, {2, 0}, {0, 3}},
                            {{{1, 0}, 4}, {{2, 0}, 2}, {{3, 0}, 5}, {{0, 1}, 3}, {{3, 1}, 1}});
    const auto g = testkit::build_graph(r);
    const auto t = testkit::build_table(r);
    const PredictionContext ctx{g, t};
    for (const auto& name : algorithm_names()) {
        const auto spec = named_recommender(name);
        Rng a = Rng::derive(3, {1, 0, 0});
        Rng b = Rng::derive(3, {1, 0, 0});
        const auto p = predict(spec, ctx, U0, I0, a);
        const auto q = predict(spec, ctx, U0, I0, b);
        EXPECT_EQ(p.value, q.value) << name;
        EXPECT_EQ(p.fallback, q.fallback) << name;
    }
    Rng rng(1);
    Rng same(1);
    EXPECT_EQ(predict(named_recommender("jaccard_wa"), ctx, U0, I0, rng).value,
              predict_wa(g, t, U0, I0, UserSimilaritySpec::of(UserMetric::JaccardModified), same).value);
}

std::vector<UserSimilaritySpec> wa_metrics() {
    using M = UserMetric;
    return {UserSimilaritySpec::of(M::Jaccard),
            UserSimilaritySpec::of(M::JaccardModified),
            UserSimilaritySpec::of(M::JaccardItem),
            UserSimilaritySpec::of(M::RatingDifference),
            UserSimilaritySpec::additive(0.5),
            UserSimilaritySpec::additive(0.3),
            UserSimilaritySpec::of(M::MaxCombo),
            UserSimilaritySpec::of(M::ProductCombo),
            UserSimilaritySpec::of(M::AllCombinedUserSim),
            UserSimilaritySpec::of(M::WeightedRatingDifference),
            UserSimilaritySpec::of(M::JaccardPlusWeightedRatingDifference)};
}

void expect_wa(const Prediction& p, const std::vector<testkit::oracle::Vote>& votes, const std::string& what) {
    const auto want = testkit::oracle::weighted_mean(votes);
    ASSERT_EQ(p.fallback, !want.has_value()) << what;
    if (want) {
        EXPECT_NEAR(p.value, *want, 1e-9) << what;
    }
}

TEST(RecommendOracle, MassVotingMatchesBruteForce) {
    std::mt19937_64 gen(404);
    for (int trial = 0; trial < 150; ++trial) {
        const auto r = testkit::random_instance(gen, testkit::InstanceShape{.half_steps = trial % 3 == 0});
        const auto g = testkit::build_graph(r);
        const auto t = testkit::build_table(r);
        for (std::uint32_t u = 0; u < r.users; ++u)
            for (std::uint32_t i = 0; i < r.items; ++i) {
                const UserId uid{u};
                const ItemId iid{i};
                Rng rng(trial);
                const std::string at = "trial " + std::to_string(trial) + " u" + std::to_string(u) + " i" +
                                       std::to_string(i);
                for (const auto& m : wa_metrics()) {
                    const auto votes = testkit::oracle::wa_votes(r, m, u, i);
                    expect_wa(predict_wa(g, t, uid, iid, m, rng), votes, at + " wa");
                    const auto mom = predict_mom(g, t, uid, iid, m, rng);
                    const auto cands = testkit::oracle::argmax_candidates(votes, 1e-12);
                    ASSERT_EQ(mom.fallback, cands.empty()) << at;
                    if (!cands.empty()) {
                        EXPECT_NE(std::find(cands.begin(), cands.end(), mom.value), cands.end()) << at << " mom";
                    }
                }
                for (auto im : {ItemMetric::IntraItemJaccard, ItemMetric::PearsonSigmoid})
                    expect_wa(predict_intra_item_wa(g, t, uid, iid, ItemSimilaritySpec{im}, rng),
                              testkit::oracle::intra_item_votes(r, ItemSimilaritySpec{im}, u, i), at + " intra");
                expect_wa(predict_jaccard_intra_item_wa(g, t, uid, iid, rng),
                          testkit::oracle::jaccard_intra_item_votes(r, u, i), at + " jii");
                expect_wa(predict_all_combined(g, t, uid, iid, rng), testkit::oracle::all_combined_votes(r, u, i),
                          at + " all");
                const auto jn = predict_jaccard_weighted_neighbors(g, t, uid, iid, rng);
                const auto cands = testkit::oracle::argmax_candidates(testkit::oracle::jaccard_neighbor_votes(r, u, i),
                                                                      1e-12);
                ASSERT_EQ(jn.fallback, cands.empty()) << at;
                if (!cands.empty()) {
                    EXPECT_NE(std::find(cands.begin(), cands.end(), jn.value), cands.end()) << at;
                }
            }
    }
}

TEST(RecommendProperties, PredictionBounds) {
    EXPECT_EQ(testkit::prop_prediction_bounds(41, 40), testkit::Failures{});
}
TEST(RecommendProperties, Determinism) {
    EXPECT_EQ(testkit::prop_prediction_determinism(42, 20), testkit::Failures{});
}
TEST(RecommendProperties, PositiveScaling) {
    EXPECT_EQ(testkit::prop_positive_scaling(43, 1000), testkit::Failures{});
}
TEST(RecommendProperties, WalkConvergence) {
    EXPECT_EQ(testkit::prop_walk_convergence(44, 4), testkit::Failures{});
}

}  // namespace
}  // namespace trustrec
