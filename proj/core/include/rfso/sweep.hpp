#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfso/montecarlo.hpp"
#include "rfso/scenario.hpp"

namespace rfso::sweep {

enum class Metric { outage, ber, capacity };
enum class Engine { mc, analytic, both };

Metric metric_from_string(const std::string& s);
Engine engine_from_string(const std::string& s);
std::string to_string(Metric m);
std::string to_string(Engine e);

/// One CSV row. Missing values are std::nullopt and come with a "null:<column>:<reason>" flag.
struct CurvePoint {
  double sweep_db = 0.0;
  Metric metric = Metric::outage;
  std::optional<double> mc;
  std::optional<double> mc_ci95;
  std::optional<double> analytic;
  std::optional<double> quadrature;
  std::vector<std::string> flags;
};

struct SweepOptions {
  Metric metric = Metric::outage;
  Engine engine = Engine::both;
  std::uint64_t trials = 1'000'000;
  mc::RngPolicy policy;
  /// Skip the closed forms that need a 3-D contour integral (BER/capacity with interference).
  bool skip_slow_closed_forms = false;
};

SweepOptions options_from_config(const ScenarioConfig& cfg);

std::vector<CurvePoint> run_sweep(const Scenario& sc, const SweepOptions& opt);

/// 64-bit FNV-1a of the resolved configuration echo, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

/// CSV text: a "# config_hash=..." comment line, the column header, then one row per point.
std::string to_csv(const std::vector<CurvePoint>& rows, const std::string& hash);

/// JSON sidecar with the resolved configuration, seed, trial count and the formula branches in use.
std::string sidecar_json(const ScenarioConfig& cfg, const SweepOptions& opt, const std::string& hash);

/// Rows of (I_a, L, exact pdf, truncated pdf, |error|, error bound) for the turbulence set in cfg.
std::string truncation_table_csv(const fso::MalagaParams& p, const std::vector<int>& orders,
                                 const std::vector<double>& irradiance);

}  // namespace rfso::sweep
