#include <gtest/gtest.h>

#include "docroute/config.hpp"
#include "docroute/errors.hpp"
#include "test_support.hpp"

using namespace docroute;

namespace {

ErrorKind config_error(const std::string& text) {
  CliConfig cfg;
  try {
    parse_config(text, cfg);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorKind::kInvalidArgument;
}

}  // namespace

TEST(Config, Defaults) {
  const CliConfig cfg;
  EXPECT_EQ(cfg.chunking.window_size, 300u);
  EXPECT_DOUBLE_EQ(cfg.chunking.overlap_fraction, 0.15);
  EXPECT_EQ(cfg.router.m, 2u);
  EXPECT_EQ(cfg.router.p, 5u);
  EXPECT_EQ(cfg.baseline.k, 10u);
  EXPECT_EQ(cfg.runs, 3u);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ParsesSections) {
  CliConfig cfg;
  parse_config(R"(
# experiment manifest
seed = 7

[chunking]
window-size = 120
overlap-fraction = 0.25

[embedding]
provider = "deterministic-local"
dim = 256

[router]
top-clusters = 3
context-budget = 500

[baseline]
reranker = "fixed-cost-mock"
rerank-unit-cost-ms = 2.5

[bench]
parallel = true
)",
               cfg);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.chunking.window_size, 120u);
  EXPECT_DOUBLE_EQ(cfg.chunking.overlap_fraction, 0.25);
  EXPECT_EQ(cfg.provider.dim, 256u);
  EXPECT_EQ(cfg.router.m, 3u);
  EXPECT_EQ(cfg.router.context_token_budget.value(), 500u);
  EXPECT_EQ(cfg.baseline.context_token_budget.value(), 500u);
  EXPECT_EQ(cfg.baseline.reranker, RerankerKind::kFixedCostMock);
  EXPECT_EQ(cfg.baseline.rerank_unit_cost, std::chrono::microseconds(2500));
  EXPECT_TRUE(cfg.parallel);
  EXPECT_TRUE(cfg.is_explicit("embedding"));
  EXPECT_FALSE(cfg.is_explicit("clustering"));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(config_error("[router]\nbogus = 1\n"), ErrorKind::kConfig);
  EXPECT_EQ(config_error("[nowhere]\ndim = 1\n"), ErrorKind::kConfig);
  EXPECT_EQ(config_error("dim = 3\n"), ErrorKind::kConfig);
  EXPECT_EQ(config_error("[embedding]\ndim = many\n"), ErrorKind::kConfig);
  EXPECT_EQ(config_error("[embedding]\nprovider = \"gpu\"\n"), ErrorKind::kConfig);
  EXPECT_EQ(config_error("[bench]\nparallel = maybe\n"), ErrorKind::kConfig);
}

TEST(Config, FlagNamesMatchKeys) {
  for (const Setting& s : settings()) {
    EXPECT_EQ(find_setting(s.qualified()), &s);
    EXPECT_EQ(s.key.find('_'), std::string::npos) << s.key;
    EXPECT_FALSE(s.help.empty()) << s.key;
  }
  EXPECT_EQ(find_setting("router.top-clusters")->short_flag, "-m");
  EXPECT_EQ(find_setting("router.chunks-per-cluster")->short_flag, "-p");
}

TEST(Config, DumpRoundTrips) {
  CliConfig cfg;
  cfg.seed = 11;
  cfg.provider.model_name = "m";
  cfg.clustering.min_samples = 3;
  cfg.baseline.reranker = RerankerKind::kNone;
  CliConfig back;
  parse_config(dump_config(cfg), back);
  EXPECT_EQ(dump_config(back), dump_config(cfg));
  EXPECT_EQ(back.clustering.min_samples.value(), 3u);
  EXPECT_EQ(back.seed, 11u);
}

TEST(Config, ValidateMapsToConfigError) {
  CliConfig cfg;
  cfg.router.m = 0;
  try {
    cfg.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}
