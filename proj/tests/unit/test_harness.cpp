#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "nonclassic/harness/commands.hpp"
#include "nonclassic/harness/config.hpp"
#include "nonclassic/harness/output.hpp"

using namespace nonclassic;
using namespace nonclassic::harness;

namespace {

RunConfig small_config(const std::string& process = "five_wave_mixing") {
  return parse_config(json{{"process", process}, {"g", 1e-3}, {"alpha_sq", 1.0},
                           {"times", {{"values", {0.25, 0.5, 1.0}}}}, {"workers", 1}});
}

} // namespace

TEST(Config, Defaults) {
  const auto c = parse_config(json::object());
  EXPECT_EQ(c.process.preset, "five_wave_mixing");
  EXPECT_EQ(c.g, 1e-3);
  EXPECT_EQ(c.alpha_sq, 1.0);
  EXPECT_FALSE(c.cutoffs.has_value());
  EXPECT_EQ(c.l_max, 3);
  EXPECT_EQ(c.modes.size(), 2u);
  EXPECT_EQ(c.method, Method::EigenDecomposition);
  EXPECT_EQ(c.times.resolve(), (std::vector<double>{0.125, 0.25, 0.5, 1.0}));
}

TEST(Config, Presets) {
  const auto thg = parse_config(json{{"process", "third_harmonic"}});
  EXPECT_EQ(thg.process.spec(0.1).n, 1);
  EXPECT_EQ(thg.process.spec(0.1).name, "third_harmonic");
  const auto obj = parse_config(json{{"process", {{"preset", "third_harmonic"}, {"omega1", 2.0}}}});
  EXPECT_DOUBLE_EQ(obj.process.spec(0.1).omega2, 6.0);
  const auto custom = parse_config(json{{"process", {{"m", 2}, {"n", 1}}}});
  EXPECT_TRUE(custom.process.preset.empty());
  EXPECT_DOUBLE_EQ(custom.process.omega2, 2.0);
  EXPECT_TRUE(custom.process.spec(0.1).is_resonant());
}

TEST(Config, TimeGrids) {
  const auto lin = parse_config(json{{"times", {{"start", 0.0}, {"stop", 1.0}, {"count", 5}, {"spacing", "linear"}}}});
  EXPECT_EQ(lin.times.resolve(), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  const auto log = parse_config(json{{"times", {{"start", 0.01}, {"stop", 1.0}, {"count", 3}}}});
  const auto t = log.times.resolve();
  EXPECT_NEAR(t[1], 0.1, 1e-15);
  EXPECT_EQ(t.back(), 1.0);
}

TEST(Config, RejectsBadInput) {
  const json bad[] = {
      json{{"gee", 1.0}},
      json{{"g", -1.0}},
      json{{"g", "big"}},
      json{{"alpha_sq", -0.5}},
      json{{"process", "four_wave"}},
      json{{"process", {{"preset", "third_harmonic"}, {"m", 2}}}},
      json{{"process", {{"m", 9}, {"n", 1}}}},
      json{{"times", {{"values", {1.0, 0.5}}}}},
      json{{"times", {{"start", 0.0}, {"stop", 1.0}, {"count", 3}, {"spacing", "log"}}}},
      json{{"times", {{"spacing", "cubic"}}}},
      json{{"cutoffs", {{"max_a", 0}, {"max_b", 4}}}},
      json{{"cutoffs", "big"}},
      json{{"l_max", 8}},
      json{{"l_max", 0}},
      json{{"modes", {"C"}}},
      json{{"modes", json::array()}},
      json{{"method", "rk4"}},
      json{{"tolerance", 0.0}},
      json{{"order_window", {3.0, 2.0}}},
      json{{"outputs", {{"pdf", "x"}}}},
      json::array(),
  };
  for (const auto& j : bad) EXPECT_THROW((void)parse_config(j), ConfigError) << j.dump();
  EXPECT_THROW((void)parse_config_text("{ not json"), ConfigError);
}

TEST(Config, CommentsAllowedInText) {
  const auto c = parse_config_text("{\n // coupling\n \"g\": 0.002\n}");
  EXPECT_EQ(c.g, 0.002);
}

TEST(Config, AutoCutoffs) {
  const auto fwm = auto_cutoffs(1.0, 3, 2);
  EXPECT_EQ(fwm.max_a(), suggest_max_a(1.0) + 3);
  EXPECT_EQ(fwm.max_b(), 18);
  auto c = small_config();
  EXPECT_EQ(resolve_cutoffs(c, c.process.spec(c.g)), fwm);
  c = parse_config(json{{"cutoffs", {{"max_a", 30}, {"max_b", 9}}}});
  EXPECT_EQ(resolve_cutoffs(c, c.process.spec(c.g)), FockCutoffs(30, 9));
}

TEST(Config, ResolvedJsonExpandsAuto) {
  const auto c = small_config();
  const auto j = resolved_json(c, {c.process.spec(c.g)});
  EXPECT_EQ(j["cutoffs"]["requested"], "auto");
  EXPECT_EQ(j["cutoffs"]["resolved"]["five_wave_mixing"]["max_b"], 18);
  EXPECT_EQ(j["times"]["values"].size(), 3u);
}

TEST(Format, RealsAndUndefined) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(-2.0), "-2");
  EXPECT_EQ(format_optional(std::nullopt), "undefined");
  EXPECT_FALSE(safe_ratio(1.0, 0.0).has_value());
  EXPECT_EQ(*safe_ratio(-4.0, -2.0), 2.0);
}

TEST(Format, PowerLawFit) {
  std::vector<double> x{1, 2, 4, 8}, y;
  for (double v : x) y.push_back(3 * v * v * v);
  EXPECT_NEAR(*fit_power_law(x, y), 3.0, 1e-12);
  EXPECT_FALSE(fit_power_law({1.0}, {1.0}).has_value());
  EXPECT_FALSE(fit_power_law({1.0, 2.0}, {0.0, 0.0}).has_value());
}

TEST(Commands, CriteriaLayout) {
  const auto out = run_command("criteria", small_config());
  EXPECT_EQ(out.exit_code, kSuccess) << out.summary;
  EXPECT_EQ(out.csv.rfind("time,mode,d1,d2,d3,D1,D2,leakage\n", 0), 0u);
  EXPECT_EQ(std::count(out.csv.begin(), out.csv.end(), '\n'), 1 + 3 * 2);
  EXPECT_NE(out.summary.find("mode A: every criterion negative at t>0: yes"), std::string::npos);
}

TEST(Commands, CompareRecordsAndFits) {
  const auto c = small_config();
  const auto spec = c.process.spec(c.g);
  const auto r = compare_against_closed_forms(spec, resolve_cutoffs(c, spec), 1.0, 1e-3, c.times.resolve(), 2.5, 3.5);
  ASSERT_EQ(r.records.size(), 9u);
  for (const auto& rec : r.records) {
    ASSERT_TRUE(rec.rel_deviation.has_value());
    EXPECT_LT(*rec.rel_deviation, 0.02);
  }
  ASSERT_EQ(r.fits.size(), 3u);
  for (const auto& f : r.fits) EXPECT_NEAR(*f.order, 4.0, 0.1);
}

TEST(Commands, CompareRejectsCustomProcess) {
  auto c = parse_config(json{{"process", {{"m", 2}, {"n", 1}}}});
  EXPECT_EQ(run_command("compare", c).exit_code, kConfigError);
}

TEST(Commands, CompareUndefinedRelativeDeviationAtZeroTime) {
  auto c = parse_config(json{{"times", {{"values", {0.0, 0.5, 1.0}}}}, {"workers", 1}});
  const auto out = run_command("compare", c);
  EXPECT_NE(out.csv.find("0,d1,0,0,0,undefined,"), std::string::npos) << out.csv;
}

TEST(Commands, DepthDegenerate) {
  auto c = parse_config(json{{"alpha_sq", 0.0}, {"times", {{"values", {0.5, 1.0}}}}, {"workers", 1}});
  const auto out = run_command("depth", c);
  EXPECT_EQ(out.exit_code, kSuccess) << out.summary;
  EXPECT_NE(out.csv.find("undefined"), std::string::npos);
  ASSERT_FALSE(out.warnings.empty());
}

TEST(Commands, DepthFiveWaveDeeper) {
  const auto out = run_command("depth", small_config());
  EXPECT_EQ(out.exit_code, kSuccess) << out.summary;
  EXPECT_EQ(out.csv.rfind("time,quantity,fwm_closed,thg_closed,closed_ratio,fwm_exact,thg_exact,exact_ratio\n", 0), 0u);
}

TEST(Commands, SelftestPasses) {
  const auto out = run_command("selftest", small_config());
  EXPECT_EQ(out.exit_code, kSuccess) << out.summary;
  EXPECT_EQ(out.csv.find(",false,"), std::string::npos);
}

TEST(Commands, LeakageCeiling) {
  auto c = parse_config(json{{"g", 0.5}, {"cutoffs", {{"max_a", 12}, {"max_b", 3}}}, {"times", {{"values", {1.0, 2.0}}}}});
  EXPECT_EQ(run_command("criteria", c).exit_code, kNumericalFailure);
}

TEST(Commands, UnknownSubcommand) { EXPECT_EQ(run_command("plot", small_config()).exit_code, kConfigError); }

TEST(Commands, Deterministic) {
  for (const char* name : {"criteria", "compare", "depth", "selftest"}) {
    const auto a = run_command(name, small_config("third_harmonic"));
    const auto b = run_command(name, small_config("third_harmonic"));
    EXPECT_EQ(a.csv, b.csv) << name;
    EXPECT_FALSE(a.csv.empty()) << name;
  }
}

TEST(Output, FilesCarryMetadata) {
  const auto dir = std::filesystem::temp_directory_path() / "nonclassic_harness_test";
  std::filesystem::remove_all(dir);
  auto c = parse_config(json{{"outputs", {{"plot_script", "plot.gp"}}}, {"times", {{"values", {1.0}}}}});
  const auto out = run_command("criteria", c);
  const auto files = write_outputs("criteria", c, out, dir);
  std::ifstream f(files.csv);
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text.rfind("# nonclassic criteria\n# generated: ", 0), 0u);
  EXPECT_NE(text.find("\"requested\": \"auto\""), std::string::npos);
  EXPECT_EQ(csv_body(text), out.csv);
  EXPECT_TRUE(std::filesystem::exists(files.summary));
  EXPECT_TRUE(std::filesystem::exists(dir / "plot.gp"));
  std::filesystem::remove_all(dir);
}
