#include "rfso/scenario.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rfso/specfun.hpp"

namespace rfso {

using nlohmann::json;

double Modulation::conditional_ber(double gamma) const {
  if (gamma < 0.0) gamma = 0.0;
  double s = 0.0;
  for (double ql : q) s += boost::math::gamma_q(tau, ql * gamma);
  return 0.5 * delta * s;
}

Modulation modulation_preset(const std::string& name, int order) {
  Modulation m;
  m.name = name;
  m.order = order;
  m.tau = 0.5;
  if (name == "ook") {
    m.delta = 1.0;
    m.q = {0.5};
    m.imdd = true;
    m.order = 2;
  } else if (name == "bpsk") {
    m.delta = 1.0;
    m.q = {1.0};
    m.order = 2;
  } else if (name == "psk") {
    if (order < 2 || (order & (order - 1)) != 0) throw std::invalid_argument("psk order must be a power of two");
    const double lb = std::log2(static_cast<double>(order));
    m.delta = 2.0 / std::max(lb, 2.0);
    const int v = std::max(order / 4, 1);
    m.q.clear();
    for (int l = 1; l <= v; ++l) {
      const double s = std::sin((2.0 * l - 1.0) * std::numbers::pi / order);
      m.q.push_back(s * s);
    }
  } else if (name == "qam") {
    const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    if (order < 4 || root * root != order || (order & (order - 1)) != 0)
      throw std::invalid_argument("qam order must be an even power of two");
    const double lb = std::log2(static_cast<double>(order));
    m.delta = 4.0 / lb * (1.0 - 1.0 / root);
    m.q.clear();
    for (int l = 1; l <= root / 2; ++l) m.q.push_back(3.0 * (2.0 * l - 1.0) * (2.0 * l - 1.0) / (2.0 * (order - 1.0)));
  } else {
    throw std::invalid_argument("unknown modulation: " + name);
  }
  return m;
}

std::vector<double> SweepGrid::points() const {
  std::vector<double> p;
  if (!(step_db > 0.0) || stop_db < start_db) return p;
  const auto n = static_cast<long>(std::floor((stop_db - start_db) / step_db + 1e-9));
  for (long i = 0; i <= n; ++i) p.push_back(start_db + i * step_db);
  return p;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items())
      if (!ok.count(k)) throw ConfigError(sub(k), "unknown field");
  }
  bool has(const char* k) const { return j_.contains(k) && !j_.at(k).is_null(); }
  Reader child(const char* k) const { return Reader(j_.at(k), sub(k)); }
  const json& raw(const char* k) const { return j_.at(k); }
  std::string sub(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  double num(const char* k, double def) const { return has(k) ? num(k) : def; }
  double num(const char* k) const {
    if (!has(k)) throw ConfigError(sub(k), "required field missing");
    const auto& v = j_.at(k);
    if (!v.is_number()) throw ConfigError(sub(k), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(sub(k), "must be finite");
    return d;
  }
  int integer(const char* k, int def) const {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_number_integer()) throw ConfigError(sub(k), "expected an integer");
    return v.get<int>();
  }
  std::uint64_t u64(const char* k, std::uint64_t def) const {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError(sub(k), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  bool boolean(const char* k, bool def) const {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_boolean()) throw ConfigError(sub(k), "expected true or false");
    return v.get<bool>();
  }
  std::string str(const char* k, const std::string& def) const {
    if (!has(k)) return def;
    const auto& v = j_.at(k);
    if (!v.is_string()) throw ConfigError(sub(k), "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
};

fso::MalagaParams parse_malaga(const Reader& m) {
  m.allow({"alpha", "beta", "g", "omega_prime", "generators"});
  const double alpha = m.num("alpha", 2.1);
  const int beta = m.integer("beta", 2);
  if (!(alpha > 0.0)) throw ConfigError(m.sub("alpha"), "must be positive");
  if (beta < 1) throw ConfigError(m.sub("beta"), "must be a positive integer");
  try {
    if (m.has("generators")) {
      const Reader gr = m.child("generators");
      gr.allow({"rho", "b0", "omega", "phase"});
      fso::MalagaGenerators gen{gr.num("rho"), gr.num("b0"), gr.num("omega"), gr.num("phase", 0.0)};
      if (gen.rho < 0.0 || gen.rho > 1.0) throw ConfigError(gr.sub("rho"), "must lie in [0, 1]");
      if (gen.b0 <= 0.0 || gen.omega < 0.0) throw ConfigError(gr.sub("b0"), "scatter and LOS powers must be positive");
      auto p = m.has("g") ? fso::MalagaParams::from_generators_with_g(alpha, beta, gen, m.num("g"))
                          : fso::MalagaParams::from_generators(alpha, beta, gen);
      if (m.has("omega_prime")) {
        const double op = m.num("omega_prime");
        if (std::abs(op - p.omega_prime) > 1e-9 * std::max(1.0, p.omega_prime))
          throw ConfigError(m.sub("omega_prime"), "inconsistent with generators (implied " +
                                                      std::to_string(p.omega_prime) + ")");
      }
      return p;
    }
    fso::MalagaParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.g = m.num("g");
    p.omega_prime = m.num("omega_prime");
    p.validate();
    return p;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(m.sub("alpha"), e.what());
  }
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  const Reader r(root, "");
  r.allow({"name", "weather", "rf", "fso", "hpa", "iq", "modulation", "threshold_db", "sweep", "mc", "$schema"});
  ScenarioConfig c;
  c.name = r.str("name", c.name);
  c.weather = r.str("weather", c.weather);
  try {
    (void)fso::weather_preset(c.weather);
    c.budget = rf::rf_preset(c.weather);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("weather", e.what());
  }

  if (r.has("rf")) {
    const Reader rf = r.child("rf");
    rf.allow({"n_antennas", "m_sr", "sweep_variable", "budget", "interferers"});
    c.n_antennas = rf.integer("n_antennas", c.n_antennas);
    c.m_sr = rf.integer("m_sr", c.m_sr);
    const std::string sv = rf.str("sweep_variable", "mean_snr_db");
    if (sv != "mean_snr_db" && sv != "ps_dbm") throw ConfigError(rf.sub("sweep_variable"), "mean_snr_db or ps_dbm");
    c.ps_sweep = sv == "ps_dbm";
    if (rf.has("budget")) {
      const Reader b = rf.child("budget");
      b.allow({"g_tx_dbi", "g_rx_dbi", "frequency_ghz", "alpha_ox_db_per_km", "alpha_rain_db_per_km", "distance_km",
               "bandwidth_mhz", "n0_dbm_per_mhz", "noise_figure_db"});
      auto& bb = c.budget;
      bb.g_tx_dbi = b.num("g_tx_dbi", bb.g_tx_dbi);
      bb.g_rx_dbi = b.num("g_rx_dbi", bb.g_rx_dbi);
      if (b.has("frequency_ghz")) bb.wavelength_m = 299792458.0 / (b.num("frequency_ghz") * 1e9);
      bb.alpha_ox_db_per_km = b.num("alpha_ox_db_per_km", bb.alpha_ox_db_per_km);
      bb.alpha_rain_db_per_km = b.num("alpha_rain_db_per_km", bb.alpha_rain_db_per_km);
      bb.distance_km = b.num("distance_km", bb.distance_km);
      bb.bandwidth_mhz = b.num("bandwidth_mhz", bb.bandwidth_mhz);
      bb.n0_dbm_per_mhz = b.num("n0_dbm_per_mhz", bb.n0_dbm_per_mhz);
      bb.noise_figure_db = b.num("noise_figure_db", bb.noise_figure_db);
    }
    if (rf.has("interferers")) {
      const auto& arr = rf.raw("interferers");
      if (!arr.is_array()) throw ConfigError(rf.sub("interferers"), "expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const Reader it(arr[i], rf.sub("interferers[" + std::to_string(i) + "]"));
        it.allow({"m", "inr_db"});
        c.interferers.push_back({it.num("m"), it.num("inr_db")});
        if (!(c.interferers.back().m > 0.0)) throw ConfigError(it.sub("m"), "must be positive");
      }
    }
  }

  if (r.has("fso")) {
    const Reader f = r.child("fso");
    f.allow({"malaga", "pointing", "distance_km", "theta_rad", "wavelength_m", "apply_weather_loss", "mu_offset_db",
             "detection", "apertures", "truncation_L"});
    if (f.has("malaga")) c.malaga = parse_malaga(f.child("malaga"));
    c.fso_distance_km = f.num("distance_km", c.fso_distance_km);
    c.fso_theta_rad = f.num("theta_rad", c.fso_theta_rad);
    c.wavelength_m = f.num("wavelength_m", c.wavelength_m);
    c.apply_weather_loss = f.boolean("apply_weather_loss", false);
    c.mu_offset_db = f.num("mu_offset_db", 0.0);
    const std::string det = f.str("detection", "imdd");
    if (det == "imdd") c.r = 2;
    else if (det == "heterodyne") c.r = 1;
    else throw ConfigError(f.sub("detection"), "imdd or heterodyne");
    c.apertures = f.integer("apertures", c.apertures);
    c.truncation_L = f.integer("truncation_L", c.truncation_L);
    c.pointing.beam_waist_m = c.fso_theta_rad * c.fso_distance_km * 1000.0;
    if (f.has("pointing")) {
      const Reader p = f.child("pointing");
      p.allow({"enabled", "aperture_radius_m", "beam_waist_m", "jitter_sigma_m", "xi2"});
      c.pointing.enabled = p.boolean("enabled", true);
      c.pointing.aperture_radius_m = p.num("aperture_radius_m", c.pointing.aperture_radius_m);
      c.pointing.beam_waist_m = p.num("beam_waist_m", c.pointing.beam_waist_m);
      c.pointing.jitter_sigma_m = p.num("jitter_sigma_m", 0.0);
      if (p.has("xi2")) c.pointing.xi2 = p.num("xi2");
      if (c.pointing.enabled && !c.pointing.xi2 && !(c.pointing.jitter_sigma_m > 0.0))
        throw ConfigError(p.sub("jitter_sigma_m"), "jitter_sigma_m or xi2 required when pointing is enabled");
    }
  }

  if (r.has("hpa")) {
    const Reader h = r.child("hpa");
    h.allow({"kind", "ibo_db", "phase_max_rad", "bussgang_branch"});
    try {
      c.hpa.kind = imp::hpa_kind_from_string(h.str("kind", "none"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(h.sub("kind"), e.what());
    }
    c.hpa.ibo_db = h.num("ibo_db", 0.0);
    c.hpa.phase_max = h.num("phase_max_rad", 0.0);
    const std::string br = h.str("bussgang_branch", "corrected");
    if (br == "corrected") c.bussgang_branch = imp::BussgangBranch::corrected;
    else if (br == "printed") c.bussgang_branch = imp::BussgangBranch::printed;
    else throw ConfigError(h.sub("bussgang_branch"), "corrected or printed");
  }

  if (r.has("iq")) {
    const Reader q = r.child("iq");
    q.allow({"ilr_db", "zeta", "theta_rad"});
    if (q.has("ilr_db")) c.ilr_db = q.num("ilr_db");
    c.iq_zeta = q.num("zeta", 1.0);
    c.iq_theta = q.num("theta_rad", 0.0);
  }

  if (r.has("modulation")) {
    const Reader m = r.child("modulation");
    m.allow({"name", "order"});
    try {
      c.modulation = modulation_preset(m.str("name", "bpsk"), m.integer("order", 2));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(m.sub("name"), e.what());
    }
  } else {
    c.modulation = modulation_preset(c.r == 2 ? "ook" : "bpsk");
  }

  c.threshold_db = r.num("threshold_db", 0.0);

  if (r.has("sweep")) {
    const Reader s = r.child("sweep");
    s.allow({"start_db", "stop_db", "step_db"});
    c.sweep.start_db = s.num("start_db");
    c.sweep.stop_db = s.num("stop_db");
    c.sweep.step_db = s.num("step_db");
  }
  if (r.has("mc")) {
    const Reader m = r.child("mc");
    m.allow({"seed", "trials", "chunk", "workers"});
    c.mc.seed = m.u64("seed", c.mc.seed);
    c.mc.trials = m.u64("trials", c.mc.trials);
    c.mc.chunk = m.u64("chunk", c.mc.chunk);
    c.mc.workers = m.integer("workers", 0);
  }
  validate_config(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ScenarioConfig& c) {
  if (c.n_antennas < 1) throw ConfigError("rf.n_antennas", "must be >= 1");
  if (c.m_sr < 1) throw ConfigError("rf.m_sr", "must be an integer >= 1");
  if (c.r != 1 && c.r != 2) throw ConfigError("fso.detection", "r must be 1 or 2");
  if (c.apertures < 1) throw ConfigError("fso.apertures", "must be >= 1");
  if (c.truncation_L < 1) throw ConfigError("fso.truncation_L", "must be >= 1");
  if (!(c.fso_distance_km > 0.0)) throw ConfigError("fso.distance_km", "must be positive");
  if (c.modulation.imdd != (c.r == 2))
    throw ConfigError("modulation.name", c.modulation.name + " is incompatible with the detection mode");
  if (c.sweep.points().empty()) throw ConfigError("sweep", "empty sweep grid");
  if (c.mc.trials == 0) throw ConfigError("mc.trials", "must be positive");
  if (c.mc.chunk == 0) throw ConfigError("mc.chunk", "must be positive");
  if (c.mc.workers < 0) throw ConfigError("mc.workers", "must be >= 0");
  if (c.ilr_db && !(*c.ilr_db < 0.0)) throw ConfigError("iq.ilr_db", "leakage ratio must be below 0 dB");
  if (!(c.iq_zeta > 0.0)) throw ConfigError("iq.zeta", "must be positive");
  if (c.hpa.kind != imp::HpaKind::none && !(c.hpa.ibo() > 0.0)) throw ConfigError("hpa.ibo_db", "must be finite");
}

// ---------------------------------------------------------------------------
// Resolution

Scenario::Scenario(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
  validate_config(cfg_);
  channel_ = std::make_shared<fso::CompositeChannel>(cfg_.malaga, fso::pointing_model(cfg_.pointing));
}

namespace {

// Sum of independent Gamma interferers. Equal rates add exactly; otherwise the
// first two moments are matched.
rf::InterferenceModel aggregate(const std::vector<Interferer>& list) {
  if (list.empty()) return {};
  double mean = 0.0, var = 0.0;
  bool same_rate = true;
  const double rate0 = list.front().m / rf::db_to_lin(list.front().inr_db);
  for (const auto& it : list) {
    const double inr = rf::db_to_lin(it.inr_db);
    mean += inr;
    var += inr * inr / it.m;
    same_rate = same_rate && std::abs(it.m / inr - rate0) <= 1e-12 * rate0;
  }
  rf::InterferenceModel im;
  im.count = static_cast<int>(list.size());
  if (same_rate) {
    im.m_r = 0.0;
    for (const auto& it : list) im.m_r += it.m;
    im.beta_r = rate0;
  } else {
    im.m_r = mean * mean / var;
    im.beta_r = mean / var;
  }
  return im;
}

}  // namespace

ScenarioPoint Scenario::at(double sweep_db) const {
  ScenarioPoint p;
  p.sweep_db = sweep_db;
  const double mean_snr = cfg_.ps_sweep ? rf::rf_mean_snr(cfg_.budget, sweep_db, cfg_.n_antennas)
                                        : rf::db_to_lin(sweep_db);
  p.fading = {cfg_.n_antennas, cfg_.m_sr, mean_snr};
  p.interference = aggregate(cfg_.interferers);
  p.channel = channel_;
  p.r = cfg_.r;
  p.apertures = cfg_.apertures;
  p.mu = rf::db_to_lin(rf::lin_to_db(mean_snr) + cfg_.mu_offset_db);
  if (cfg_.apply_weather_loss) {
    const double sigma = fso::weather_preset(cfg_.weather).fso_sigma_db_per_km * std::log(10.0) / 10.0;
    p.mu *= std::pow(std::exp(-sigma * cfg_.fso_distance_km), cfg_.r);
  }
  p.bussgang = imp::bussgang_params(cfg_.hpa, cfg_.bussgang_branch);
  p.rho1 = imp::rho1(p.bussgang, cfg_.hpa.varrho2, mean_snr, p.interference.mean());
  p.iota = imp::clipping_factor(cfg_.hpa);
  p.iq = cfg_.ilr_db ? imp::iq_from_ilr(rf::db_to_lin(*cfg_.ilr_db)) : imp::iq_coefficients(cfg_.iq_zeta, cfg_.iq_theta);
  p.rho2 = p.iq.rho2;
  p.mean_inv_interf = rf::mean_inverse_one_plus(p.interference);
  p.mean_eff_sinr = mean_snr * p.mean_inv_interf;
  p.varpi = cfg_.r == 1 ? 1.0 : std::numbers::e / (2.0 * std::numbers::pi);
  p.threshold = rf::db_to_lin(cfg_.threshold_db);
  p.modulation = cfg_.modulation;
  return p;
}

std::string config_to_json(const ScenarioConfig& c, int indent) {
  json j;
  j["name"] = c.name;
  j["weather"] = c.weather;
  json rf;
  rf["n_antennas"] = c.n_antennas;
  rf["m_sr"] = c.m_sr;
  rf["sweep_variable"] = c.ps_sweep ? "ps_dbm" : "mean_snr_db";
  rf["budget"] = {{"g_tx_dbi", c.budget.g_tx_dbi},
                  {"g_rx_dbi", c.budget.g_rx_dbi},
                  {"wavelength_m", c.budget.wavelength_m},
                  {"alpha_ox_db_per_km", c.budget.alpha_ox_db_per_km},
                  {"alpha_rain_db_per_km", c.budget.alpha_rain_db_per_km},
                  {"distance_km", c.budget.distance_km},
                  {"bandwidth_mhz", c.budget.bandwidth_mhz},
                  {"n0_dbm_per_mhz", c.budget.n0_dbm_per_mhz},
                  {"noise_figure_db", c.budget.noise_figure_db},
                  {"power_gain_db", rf::rf_power_gain_db(c.budget)},
                  {"noise_variance_dbm", rf::rf_noise_variance_dbm(c.budget)}};
  json ints = json::array();
  for (const auto& it : c.interferers)
    ints.push_back({{"m", it.m}, {"inr_db", it.inr_db}, {"inr_linear", rf::db_to_lin(it.inr_db)}});
  rf["interferers"] = ints;
  j["rf"] = rf;

  json f;
  f["malaga"] = {{"alpha", c.malaga.alpha},         {"beta", c.malaga.beta},
                 {"g", c.malaga.g},                 {"omega_prime", c.malaga.omega_prime},
                 {"xi", c.malaga.xi()},             {"g_override", c.malaga.g_override},
                 {"alpha_nudged", c.malaga.alpha_nudged}};
  const auto pm = fso::pointing_model(c.pointing);
  f["pointing"] = {{"enabled", pm.enabled},
                   {"aperture_radius_m", c.pointing.aperture_radius_m},
                   {"beam_waist_m", c.pointing.beam_waist_m},
                   {"jitter_sigma_m", c.pointing.jitter_sigma_m},
                   {"a0", pm.a0},
                   {"w_zeq_m", pm.w_zeq},
                   {"xi2", pm.enabled ? json(pm.xi2) : json(nullptr)}};
  f["distance_km"] = c.fso_distance_km;
  f["theta_rad"] = c.fso_theta_rad;
  f["wavelength_m"] = c.wavelength_m;
  f["apply_weather_loss"] = c.apply_weather_loss;
  f["mu_offset_db"] = c.mu_offset_db;
  f["r"] = c.r;
  f["apertures"] = c.apertures;
  f["truncation_L"] = c.truncation_L;
  const auto w = fso::weather_preset(c.weather);
  f["pathloss"] = fso::fso_pathloss(c.pointing.aperture_radius_m, c.fso_theta_rad, c.fso_distance_km,
                                    w.fso_sigma_db_per_km);
  f["rytov_variance"] = fso::rytov_variance(w.cn2, c.wavelength_m, c.fso_distance_km * 1000.0);
  j["fso"] = f;

  const auto b = imp::bussgang_params(c.hpa, c.bussgang_branch);
  j["hpa"] = {{"kind", imp::to_string(c.hpa.kind)},
              {"ibo_db", c.hpa.ibo_db},
              {"ibo_linear", c.hpa.ibo()},
              {"phase_max_rad", c.hpa.phase_max},
              {"bussgang_branch", c.bussgang_branch == imp::BussgangBranch::corrected ? "corrected" : "printed"},
              {"bussgang_formula", b.formula},
              {"epsilon", b.epsilon},
              {"sigma_d2", b.sigma_d2},
              {"clipping_factor", imp::clipping_factor(c.hpa)}};
  const auto iq = c.ilr_db ? imp::iq_from_ilr(rf::db_to_lin(*c.ilr_db)) : imp::iq_coefficients(c.iq_zeta, c.iq_theta);
  j["iq"] = {{"zeta", iq.zeta}, {"theta_rad", iq.theta}, {"rho2", iq.rho2}};
  j["modulation"] = {{"name", c.modulation.name},
                     {"order", c.modulation.order},
                     {"delta", c.modulation.delta},
                     {"tau", c.modulation.tau},
                     {"q", c.modulation.q}};
  j["threshold_db"] = c.threshold_db;
  j["threshold_linear"] = rf::db_to_lin(c.threshold_db);
  j["sweep"] = {{"start_db", c.sweep.start_db}, {"stop_db", c.sweep.stop_db}, {"step_db", c.sweep.step_db}};
  j["mc"] = {{"seed", c.mc.seed}, {"trials", c.mc.trials}, {"chunk", c.mc.chunk}};
  return j.dump(indent);
}

}  // namespace rfso
