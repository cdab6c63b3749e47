#include "rfso/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <boost/version.hpp>
#include <json.hpp>

#include "rfso/analytic.hpp"

namespace rfso::sweep {
namespace {

using json = nlohmann::json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string null_flag(const char* column, const std::string& reason) {
  std::string r = reason;
  for (char& c : r)
    if (c == ' ' || c == ',' || c == ';') c = '_';
  return std::string("null:") + column + ":" + r;
}

analytic::Value closed_form(Metric m, const ScenarioPoint& p, bool skip_slow) {
  switch (m) {
    case Metric::outage:
      return analytic::outage_closed_form(p, p.threshold);
    case Metric::ber:
      if (skip_slow && p.interference.active()) return {analytic::kNaN, false, "3-D contour skipped"};
      return analytic::ber_closed_form(p);
    case Metric::capacity:
      if (skip_slow && p.interference.active()) return {analytic::kNaN, false, "3-D contour skipped"};
      return analytic::capacity_closed_form(p);
  }
  return {};
}

double quadrature(Metric m, const ScenarioPoint& p) {
  switch (m) {
    case Metric::outage:
      return analytic::outage_quadrature(p, p.threshold);
    case Metric::ber:
      return analytic::ber_quadrature(p);
    case Metric::capacity:
      return analytic::capacity_quadrature(p);
  }
  return analytic::kNaN;
}

mc::EstimateWithCi simulate(Metric m, const ScenarioPoint& p, std::uint64_t n, const mc::RngPolicy& pol) {
  switch (m) {
    case Metric::outage:
      return mc::estimate_outage(p, n, pol);
    case Metric::ber:
      return mc::estimate_ber(p, n, pol);
    case Metric::capacity:
      return mc::estimate_capacity(p, n, pol);
  }
  return {};
}

}  // namespace

Metric metric_from_string(const std::string& s) {
  if (s == "outage") return Metric::outage;
  if (s == "ber") return Metric::ber;
  if (s == "capacity") return Metric::capacity;
  throw std::invalid_argument("unknown metric '" + s + "' (outage, ber, capacity)");
}

Engine engine_from_string(const std::string& s) {
  if (s == "mc") return Engine::mc;
  if (s == "analytic") return Engine::analytic;
  if (s == "both") return Engine::both;
  throw std::invalid_argument("unknown engine '" + s + "' (mc, analytic, both)");
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::outage:
      return "outage";
    case Metric::ber:
      return "ber";
    case Metric::capacity:
      return "capacity";
  }
  return "?";
}

std::string to_string(Engine e) {
  switch (e) {
    case Engine::mc:
      return "mc";
    case Engine::analytic:
      return "analytic";
    case Engine::both:
      return "both";
  }
  return "?";
}

SweepOptions options_from_config(const ScenarioConfig& cfg) {
  SweepOptions o;
  o.trials = cfg.mc.trials;
  o.policy.seed = cfg.mc.seed;
  o.policy.chunk = cfg.mc.chunk;
  o.policy.workers = cfg.mc.workers;
  return o;
}

std::vector<CurvePoint> run_sweep(const Scenario& sc, const SweepOptions& opt) {
  const auto grid = sc.config().sweep.points();
  if (grid.empty()) throw ConfigError("sweep", "empty sweep grid");
  const bool want_mc = opt.engine != Engine::analytic;
  const bool want_an = opt.engine != Engine::mc;

  // Saturation levels, used only to flag rows that sit on them.
  std::optional<double> floor;
  std::optional<double> ceiling;
  const ScenarioPoint first = sc.at(grid.front());
  if (want_an && !first.ideal_hardware()) {
    if (opt.metric == Metric::outage) floor = analytic::outage_floor(sc, first.threshold).value;
    if (opt.metric == Metric::capacity) {
      const auto c = analytic::capacity_ceilings(first);
      if (!(c.inf_unbounded && c.max_unbounded)) ceiling = c.min();
    }
  }

  std::vector<CurvePoint> rows;
  rows.reserve(grid.size());
  for (double db : grid) {
    const ScenarioPoint p = sc.at(db);
    CurvePoint row;
    row.sweep_db = db;
    row.metric = opt.metric;
    if (opt.metric == Metric::outage && p.rho2 > 0.0 && p.threshold * p.rho2 >= 1.0)
      row.flags.push_back("threshold_at_or_above_inverse_rho2");

    if (want_mc) {
      const auto e = simulate(opt.metric, p, opt.trials, opt.policy);
      row.mc = e.value;
      row.mc_ci95 = e.ci95;
    } else {
      row.flags.push_back(null_flag("mc", "engine=analytic"));
    }

    if (want_an) {
      const auto v = closed_form(opt.metric, p, opt.skip_slow_closed_forms);
      if (v.available && std::isfinite(v.value)) row.analytic = v.value;
      else row.flags.push_back(null_flag("analytic", v.note.empty() ? "non-finite" : v.note));
      row.quadrature = quadrature(opt.metric, p);
    } else {
      row.flags.push_back(null_flag("analytic", "engine=mc"));
      row.flags.push_back(null_flag("quadrature", "engine=mc"));
    }

    const std::optional<double> ref = row.analytic ? row.analytic : row.quadrature;
    if (row.mc && ref && std::abs(*ref - *row.mc) > *row.mc_ci95 + 1e-3) row.flags.push_back("mismatch");
    if (floor && ref && *floor > 0.0 && std::abs(*ref - *floor) <= 0.05 * *floor) row.flags.push_back("floor_reached");
    if (ceiling && ref && *ref >= 0.98 * *ceiling) row.flags.push_back("ceiling_reached");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string text = config_to_json(cfg, -1);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string to_csv(const std::vector<CurvePoint>& rows, const std::string& hash) {
  std::ostringstream os;
  os << "# config_hash=" << hash << "\n";
  os << "sweep_db,metric,mc,mc_ci95,analytic,quadrature,flags\n";
  for (const auto& r : rows) {
    std::string flags;
    for (std::size_t i = 0; i < r.flags.size(); ++i) flags += (i ? ";" : "") + r.flags[i];
    os << num(r.sweep_db) << ',' << to_string(r.metric) << ',' << opt_num(r.mc) << ',' << opt_num(r.mc_ci95) << ','
       << opt_num(r.analytic) << ',' << opt_num(r.quadrature) << ',' << flags << "\n";
  }
  return os.str();
}

std::string sidecar_json(const ScenarioConfig& cfg, const SweepOptions& opt, const std::string& hash) {
  json j;
  j["config_hash"] = hash;
  j["config"] = json::parse(config_to_json(cfg, -1));
  j["metric"] = to_string(opt.metric);
  j["engine"] = to_string(opt.engine);
  j["seed"] = opt.policy.seed;
  j["trials"] = opt.trials;
  j["chunk"] = opt.policy.chunk;
  j["rng"] = "mt19937_64 per chunk, seeded from splitmix64(seed, chunk index)";
  j["versions"] = {{"rfso", "0.1.0"}, {"boost", BOOST_LIB_VERSION}, {"compiler", __VERSION__}};
  const auto b = imp::bussgang_params(cfg.hpa, cfg.bussgang_branch);
  j["decisions"] = {
      {"bussgang_branch", cfg.bussgang_branch == imp::BussgangBranch::corrected ? "corrected" : "printed"},
      {"bussgang_formula", b.formula},
      {"pointing_xi2", "w_zeq^2 / (4 sigma_s^2)"},
      {"malaga_g_override", cfg.malaga.g_override},
      {"outage_closed_form", "Mellin-Barnes contour integral, single aperture"},
      {"ber_capacity_closed_form", "Fox-H star integral, single aperture and rho2 = 0"},
      {"quadrature", "exp-sinh / tanh-sinh over the conditional first-hop CDF"}};
  return j.dump(2);
}

std::string truncation_table_csv(const fso::MalagaParams& p, const std::vector<int>& orders,
                                 const std::vector<double>& irradiance) {
  std::ostringstream os;
  os << "ia,L,exact_pdf,truncated_pdf,abs_error,error_bound\n";
  for (int L : orders) {
    for (double ia : irradiance) {
      const double exact = fso::malaga_pdf(ia, p);
      const double trunc = fso::malaga_pdf_truncated(ia, p, L);
      os << num(ia) << ',' << L << ',' << num(exact) << ',' << num(trunc) << ',' << num(std::abs(exact - trunc)) << ','
         << num(fso::truncation_error_bound(ia, p, L)) << "\n";
    }
  }
  return os.str();
}

}  // namespace rfso::sweep
