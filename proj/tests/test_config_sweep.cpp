#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "rfso/sweep.hpp"

using namespace rfso;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

const char* kMinimal = R"({
  "name": "t",
  "rf": {"n_antennas": 2, "m_sr": 2},
  "fso": {"detection": "heterodyne"},
  "hpa": {"kind": "sel", "ibo_db": 4},
  "iq": {"ilr_db": -15},
  "sweep": {"start_db": 0, "stop_db": 20, "step_db": 10},
  "mc": {"seed": 7, "trials": 2000, "chunk": 500, "workers": 1}
})";

}  // namespace

TEST(Config, ParsesAndResolvesDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.r, 1);
  EXPECT_EQ(c.modulation.name, "bpsk");
  EXPECT_EQ(c.hpa.kind, imp::HpaKind::sel);
  ASSERT_TRUE(c.ilr_db.has_value());
  EXPECT_EQ(*c.ilr_db, -15.0);
  EXPECT_EQ(c.sweep.points(), (std::vector<double>{0.0, 10.0, 20.0}));
  EXPECT_EQ(c.mc.seed, 7u);
}

TEST(Config, EchoRoundTripsThroughTheParser) {
  const auto c = parse_config(kMinimal);
  const auto echo = nlohmann::json::parse(config_to_json(c));
  EXPECT_EQ(echo["name"], "t");
  EXPECT_EQ(echo["rf"]["sweep_variable"], "mean_snr_db");
}

TEST(Config, ErrorsNameTheOffendingField) {
  EXPECT_EQ(field_of(R"({"rf": {"m_sr": 0}})"), "rf.m_sr");
  EXPECT_EQ(field_of(R"({"rf": {"bogus": 1}})"), "rf.bogus");
  EXPECT_EQ(field_of(R"({"rf": {"interferers": [{"m": 1, "inr_db": 0}, {"m": -1, "inr_db": 0}]}})"),
            "rf.interferers[1].m");
  EXPECT_EQ(field_of(R"({"fso": {"detection": "coherent"}})"), "fso.detection");
  EXPECT_EQ(field_of(R"({"hpa": {"kind": "klystron"}})"), "hpa.kind");
  EXPECT_EQ(field_of(R"({"fso": {"malaga": {"alpha": -1, "beta": 2, "g": 0.1, "omega_prime": 1}}})"),
            "fso.malaga.alpha");
  EXPECT_EQ(field_of(R"({"iq": {"ilr_db": 3}})"), "iq.ilr_db");
  EXPECT_EQ(field_of(R"({"modulation": {"name": "bpsk"}})"), "modulation.name");
  EXPECT_EQ(field_of(R"({"threshold_db": "high"})"), "threshold_db");
  EXPECT_EQ(field_of("{not json"), "<root>");
}

TEST(Config, EmptySweepIsRejected) {
  EXPECT_EQ(field_of(R"({"sweep": {"start_db": 10, "stop_db": 0, "step_db": 5}})"), "sweep");
  EXPECT_EQ(field_of(R"({"sweep": {"start_db": 0, "stop_db": 10, "step_db": 0}})"), "sweep");
}

TEST(Config, ModulationMustMatchDetection) {
  EXPECT_EQ(field_of(R"({"fso": {"detection": "imdd"}, "modulation": {"name": "qam", "order": 16}})"),
            "modulation.name");
  EXPECT_NO_THROW(parse_config(R"({"fso": {"detection": "heterodyne"}, "modulation": {"name": "qam", "order": 16}})"));
}

TEST(Sweep, EmptyGridThrowsBeforeAnyWork) {
  auto bad = parse_config(kMinimal);
  bad.sweep.stop_db = -10.0;
  EXPECT_THROW(Scenario{bad}, ConfigError);
}

TEST(Sweep, CsvHasHashHeaderAndOneRowPerPoint) {
  const auto c = parse_config(kMinimal);
  const Scenario sc(c);
  auto opt = sweep::options_from_config(c);
  opt.metric = sweep::Metric::outage;
  const auto rows = sweep::run_sweep(sc, opt);
  ASSERT_EQ(rows.size(), 3u);
  const std::string hash = sweep::config_hash(c);
  EXPECT_EQ(hash.size(), 16u);
  const std::string csv = sweep::to_csv(rows, hash);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "# config_hash=" + hash);
  std::getline(is, line);
  EXPECT_EQ(line, "sweep_db,metric,mc,mc_ci95,analytic,quadrature,flags");
  int n = 0;
  while (std::getline(is, line)) ++n;
  EXPECT_EQ(n, 3);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.mc && r.analytic && r.quadrature);
    EXPECT_NEAR(*r.analytic, *r.quadrature, 1e-7);
  }
}

TEST(Sweep, MissingEngineValuesAreFlagged) {
  const auto c = parse_config(kMinimal);
  auto opt = sweep::options_from_config(c);
  opt.engine = sweep::Engine::mc;
  const auto rows = sweep::run_sweep(Scenario(c), opt);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.analytic.has_value());
    EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "null:analytic:engine=mc"), r.flags.end());
  }
}

TEST(Sweep, HashDependsOnContentOnly) {
  auto a = parse_config(kMinimal);
  auto b = parse_config(kMinimal);
  EXPECT_EQ(sweep::config_hash(a), sweep::config_hash(b));
  b.hpa.ibo_db = 5.0;
  EXPECT_NE(sweep::config_hash(a), sweep::config_hash(b));
}

TEST(Sweep, SidecarRecordsSeedAndFormulaBranch) {
  const auto c = parse_config(kMinimal);
  const auto opt = sweep::options_from_config(c);
  const auto j = nlohmann::json::parse(sweep::sidecar_json(c, opt, sweep::config_hash(c)));
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["trials"], 2000);
  EXPECT_EQ(j["decisions"]["bussgang_branch"], "corrected");
  EXPECT_EQ(j["config_hash"], sweep::config_hash(c));
}

TEST(Sweep, MetricAndEngineNames) {
  for (auto m : {sweep::Metric::outage, sweep::Metric::ber, sweep::Metric::capacity})
    EXPECT_EQ(sweep::metric_from_string(sweep::to_string(m)), m);
  for (auto e : {sweep::Engine::mc, sweep::Engine::analytic, sweep::Engine::both})
    EXPECT_EQ(sweep::engine_from_string(sweep::to_string(e)), e);
  EXPECT_THROW(sweep::metric_from_string("snr"), std::invalid_argument);
}

TEST(Config, ShippedExamplesLoad) {
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(RFSO_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(Scenario{load_config(e.path().string())}) << e.path();
    ++n;
  }
  EXPECT_GE(n, 4);
}
