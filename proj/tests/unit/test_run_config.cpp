#include <gtest/gtest.h>

#include <fstream>

#include "genresrc/error.hpp"
#include "run_config.hpp"
#include "test_support.hpp"

using namespace genresrc;
using genresrc::cli::RunConfig;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a genresrc::Error";
  return ErrorCode::UsageError;
}

}  // namespace

TEST(RunConfig, Defaults) {
  const RunConfig cfg;
  EXPECT_EQ(cfg.get("window_len_s"), "0.1");
  EXPECT_EQ(cfg.get("hop_fraction"), "0.5");
  EXPECT_EQ(cfg.get("dim"), "35");
  EXPECT_EQ(cfg.get("folds"), "5");
  EXPECT_EQ(cfg.get("keep_k"), "64");
  EXPECT_EQ(cfg.get("snr"), "40,20,10,0,-10");
  EXPECT_EQ(cfg.get("sizes"), "1,10,20,30,40,50,70,80,99");
  EXPECT_EQ(cfg.get("mode"), "both");
}

TEST(RunConfig, EmitParseRoundTripDefaults) {
  const RunConfig cfg;
  EXPECT_EQ(RunConfig::parse(cfg.emit()), cfg);
  for (const auto& key : RunConfig::keys()) EXPECT_NE(cfg.emit().find(key + " = "), std::string::npos) << key;
}

TEST(RunConfig, EmitParseRoundTripEdited) {
  RunConfig cfg;
  cfg.set("window_len_s", "0.0465");
  cfg.set("hop-fraction", "0.25");
  cfg.set("second_fft_len", "2048");
  cfg.set("drop_dc", "false");
  cfg.set("concat_short_term", "yes");
  cfg.set("feature_mode", "stage2_only");
  cfg.set("solver", "ista");
  cfg.set("lambda", "0.003");
  cfg.set("measurement_mode", "coordinate_subsample");
  cfg.set("seed", "987654321");
  cfg.set("snr", "30, -5.5");
  cfg.set("sizes", "1,2,3");
  cfg.set("mode", "stage2_only");
  cfg.set("tol", "1e-300");
  const RunConfig back = RunConfig::parse(cfg.emit());
  EXPECT_EQ(back, cfg);
  EXPECT_EQ(back.feature.frame.window_len_s, 0.0465);
  EXPECT_EQ(back.classifier.tol, 1e-300);
  EXPECT_EQ(back.snr_list, (std::vector<double>{30.0, -5.5}));
  EXPECT_EQ(back.feature.mode, FeatureMode::Stage2Only);
  EXPECT_EQ(back.classifier.seed, 987654321u);
  EXPECT_EQ(back.harness.seed, 987654321u);
  EXPECT_EQ(back.corpus.seed, 987654321u);
}

TEST(RunConfig, CommentsAndWhitespace) {
  const auto cfg = RunConfig::parse("# header\n\n  dim = 20   # trailing\nkeep_k=8\r\n");
  EXPECT_EQ(cfg.classifier.m, 20u);
  EXPECT_EQ(cfg.feature.keep_k, 8u);
}

TEST(RunConfig, LaterLinesOverrideEarlier) {
  RunConfig cfg = RunConfig::parse("dim = 20\ndim = 12\n");
  EXPECT_EQ(cfg.classifier.m, 12u);
  cfg.apply("folds = 3");
  EXPECT_EQ(cfg.harness.folds, 3u);
  EXPECT_EQ(cfg.classifier.m, 12u);
}

TEST(RunConfig, Errors) {
  EXPECT_EQ(code_of([] { RunConfig::parse("nonsense = 1"); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { RunConfig::parse("dim 35"); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { RunConfig::parse("dim = -3"); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { RunConfig::parse("dim = 3.5"); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { RunConfig::parse("tol = abc"); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { RunConfig::parse("drop_dc = maybe"); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { RunConfig::parse("jobs = 0"); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { RunConfig::parse("sizes = 1,,2"); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { RunConfig::parse("mode = sideways"); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { RunConfig::load("/nonexistent/cfg.txt"); }), ErrorCode::IoError);
}

TEST(RunConfig, LoadFromFile) {
  genresrc::testing::TempDir dir("runcfg");
  const auto path = dir / "run.cfg";
  std::ofstream(path) << "dim = 21\nseed = 4\n";
  const auto cfg = RunConfig::load(path.string());
  EXPECT_EQ(cfg.classifier.m, 21u);
  EXPECT_EQ(cfg.harness.seed, 4u);
}
