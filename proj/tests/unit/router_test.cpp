#include <gtest/gtest.h>

#include "docroute/errors.hpp"
#include "docroute/router.hpp"
#include "index_fixture.hpp"
#include "test_support.hpp"

using namespace docroute;
using docroute::testing::hand_index;
using docroute::testing::vec;

namespace {

Query q(std::initializer_list<double> xs) { return Query{"q", vec(xs)}; }

// Member of cluster (1,0) whose cosine with (1,0) is `c`.
EmbeddingVector at_cos(double c) { return vec({c, std::sqrt(1.0 - c * c)}); }

}  // namespace

TEST(Route, SingleClusterAlwaysSelected) {
  const auto index = hand_index({{{"a", vec({0, 1})}}});
  Router router(index, RouterConfig{3, 5});
  InstrumentationCounters counters;
  const auto picked = router.route(vec({1, 0}), counters);
  ASSERT_EQ(picked.size(), 1u);
  EXPECT_EQ(picked[0].cluster_id, 0u);
  EXPECT_EQ(counters.centroid_comparisons, 1u);
}

TEST(Route, ExactMatch) {
  const auto index = hand_index({{{"a", vec({1, 0})}}, {{"b", vec({0, 1})}}});
  Router router(index, RouterConfig{1, 5});
  InstrumentationCounters counters;
  const auto picked = router.route(vec({1, 0}), counters);
  ASSERT_EQ(picked.size(), 1u);
  EXPECT_EQ(picked[0].cluster_id, 0u);
  EXPECT_NEAR(picked[0].score, 1.0, 1e-7);
}

TEST(Route, BruteForceCosines) {
  const auto index = hand_index({{{"a", vec({1, 0})}}, {{"b", vec({0, 1})}}, {{"c", vec({0.707, 0.707})}}});
  Router router(index, RouterConfig{2, 5});
  InstrumentationCounters counters;
  const auto picked = router.route(vec({0.6, 0.8}), counters);
  ASSERT_EQ(picked.size(), 2u);
  EXPECT_EQ(picked[0].cluster_id, 2u);
  EXPECT_NEAR(picked[0].score, 0.9899, 1e-4);
  EXPECT_EQ(picked[1].cluster_id, 1u);
  EXPECT_NEAR(picked[1].score, 0.8, 1e-6);
  EXPECT_EQ(counters.centroid_comparisons, 3u);
}

TEST(Route, TiesGoToLowerId) {
  const auto index = hand_index({{{"a", vec({1, 0})}}, {{"b", vec({0, 1})}}});
  Router router(index, RouterConfig{1, 5});
  InstrumentationCounters counters;
  EXPECT_EQ(router.route(vec({1, 1}), counters)[0].cluster_id, 0u);
}

TEST(RetrieveWithin, PExceedsSize) {
  const auto index = hand_index({{{"a", vec({1, 0})}, {"b", vec({1, 0.1})}, {"c", vec({1, 0.2})}}});
  Router router(index, RouterConfig{1, 5});
  InstrumentationCounters counters;
  const auto got = router.retrieve_within(vec({1, 0}), 0, 5, counters);
  EXPECT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].chunk_id, "a#0");
  EXPECT_NEAR(got[0].score, 1.0, 1e-7);
  EXPECT_EQ(counters.member_comparisons, 3u);
}

TEST(RetrieveWithin, PlantedScoresSorted) {
  const auto index = hand_index({{{"s9", at_cos(0.9)}, {"s5", at_cos(0.5)}, {"s7", at_cos(0.7)}}});
  Router router(index, RouterConfig{1, 2});
  InstrumentationCounters counters;
  const auto got = router.retrieve_within(vec({1, 0}), 0, 2, counters);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].chunk_id, "s9#0");
  EXPECT_NEAR(got[0].score, 0.9, 1e-6);
  EXPECT_EQ(got[1].chunk_id, "s7#0");
  EXPECT_NEAR(got[1].score, 0.7, 1e-6);
}

TEST(Answer, TwoClusterIndex) {
  std::vector<docroute::testing::PlantedChunk> left, right;
  for (int i = 0; i < 7; ++i) left.push_back({"l" + std::to_string(i), vec({1, 0.05 * i, 0})});
  for (int i = 0; i < 7; ++i) right.push_back({"r" + std::to_string(i), vec({0, 0.05 * i, 1})});
  const auto index = hand_index({left, right});
  Router router(index, RouterConfig{2, 5});
  const auto result = router.answer(q({1, 0.1, 0.2}));
  EXPECT_LE(result.chunks.size(), 10u);
  EXPECT_EQ(result.chunks.size(), 10u);
  EXPECT_EQ(result.counters.centroid_comparisons, 2u);
  EXPECT_EQ(result.counters.member_comparisons, 14u);
  EXPECT_EQ(result.selected_clusters.size(), 2u);
  for (std::size_t i = 1; i < result.chunks.size(); ++i) EXPECT_GE(result.chunks[i - 1].score, result.chunks[i].score);
  EXPECT_EQ(result.context_chunks, result.chunks.size());
  EXPECT_EQ(result.context.rfind("[l2#0]\n", 0), 0u) << result.context;
}

TEST(Answer, BlankQueryRejectedBeforeEmbedding) {
  const auto index = hand_index({{{"a", vec({1, 0})}}});
  Router router(index, RouterConfig{});
  for (const char* text : {"", "   "}) {
    try {
      router.answer(Query{text, vec({1, 0})});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
    }
  }
}

TEST(Answer, PlantedIndexNeedsVectors) {
  const auto index = hand_index({{{"a", vec({1, 0})}}});
  Router router(index, RouterConfig{});
  EXPECT_THROW(router.answer("text only"), Error);
}

TEST(Answer, BudgetSmallerThanFirstChunk) {
  const auto index = hand_index({{{"a", vec({1, 0}), "one two three four"}, {"b", vec({1, 0.1}), "five six"}}});
  RouterConfig cfg{1, 5};
  cfg.context_token_budget = 3;
  Router router(index, cfg);
  const auto result = router.answer(q({1, 0}));
  EXPECT_EQ(result.chunks.size(), 2u);
  EXPECT_EQ(result.context_chunks, 0u);
  EXPECT_TRUE(result.context.empty());
}

TEST(Answer, BudgetStopsAtFirstOverflow) {
  const auto index = hand_index({{{"a", vec({1, 0}), "one two"}, {"b", vec({1, 0.1}), "three four five"},
                                  {"c", vec({1, 0.2}), "six"}}});
  RouterConfig cfg{1, 5};
  cfg.context_token_budget = 4;
  Router router(index, cfg);
  const auto result = router.answer(q({1, 0}));
  EXPECT_EQ(result.context_chunks, 1u);
  EXPECT_EQ(result.context, "[a#0]\none two");
}

TEST(Answer, ProviderMismatchRejected) {
  ProviderSpec built;
  built.dim = 16;
  ProviderSpec other = built;
  other.seed = 4;
  EXPECT_THROW(check_provider_matches(built, other), Error);
  other = built;
  other.batch_size = 1;
  EXPECT_NO_THROW(check_provider_matches(built, other));
}

TEST(Answer, QueryDimensionChecked) {
  const auto index = hand_index({{{"a", vec({1, 0})}}});
  Router router(index, RouterConfig{});
  EXPECT_THROW(router.answer(Query{"q", vec({1, 0, 0})}), Error);
}
