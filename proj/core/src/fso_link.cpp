// FSO second hop: pathloss, pointing errors, weather presets, the composite
// (turbulence x pointing) gain distribution and the series SNR CDF.

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <spdlog/spdlog.h>
#include <stdexcept>

#include "rfso/channel_fso.hpp"
#include "rfso/specfun.hpp"

namespace rfso::fso {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

PointingModel pointing_model(const PointingParams& p) {
  PointingModel m;
  if (!p.enabled) {
    m.xi2 = kInf;
    return m;
  }
  if (!(p.aperture_radius_m > 0.0) || !(p.beam_waist_m > 0.0))
    throw std::invalid_argument("pointing: aperture radius and beam waist must be positive");
  const double v = std::sqrt(kPi / 2.0) * p.aperture_radius_m / p.beam_waist_m;
  const double erf_v = specfun::erf(v);
  m.a0 = erf_v * erf_v;
  m.w_zeq = p.beam_waist_m * std::sqrt(std::sqrt(kPi) * erf_v / (2.0 * v * std::exp(-v * v)));
  if (p.xi2) {
    if (!(*p.xi2 > 0.0)) throw std::invalid_argument("pointing: xi2 must be positive");
    m.xi2 = *p.xi2;
  } else {
    if (!(p.jitter_sigma_m > 0.0)) throw std::invalid_argument("pointing: jitter deviation must be positive");
    m.xi2 = m.w_zeq * m.w_zeq / (4.0 * p.jitter_sigma_m * p.jitter_sigma_m);
  }
  m.enabled = std::isfinite(m.xi2);
  return m;
}

double pointing_pdf(double ip, const PointingModel& m) {
  if (!m.enabled) throw std::domain_error("pointing_pdf: pointing errors disabled");
  if (ip <= 0.0 || ip > m.a0) return 0.0;
  return m.xi2 / std::pow(m.a0, m.xi2) * std::pow(ip, m.xi2 - 1.0);
}

double rytov_variance(double cn2, double wavelength_m, double distance_m) {
  if (!(cn2 > 0.0) || !(wavelength_m > 0.0) || !(distance_m > 0.0))
    throw std::invalid_argument("rytov_variance: inputs must be positive");
  const double k = 2.0 * kPi / wavelength_m;
  return 1.23 * cn2 * std::pow(k, 7.0 / 6.0) * std::pow(distance_m, 11.0 / 6.0);
}

double fso_pathloss(double aperture_radius_m, double theta_rad, double distance_km, double sigma_db_per_km) {
  if (!(aperture_radius_m > 0.0) || !(theta_rad > 0.0) || !(distance_km > 0.0) || sigma_db_per_km < 0.0)
    throw std::invalid_argument("fso_pathloss: inputs must be positive");
  const double spread = theta_rad * distance_km * 1000.0;
  const double sigma = sigma_db_per_km * std::log(10.0) / 10.0;
  return kPi * aperture_radius_m * aperture_radius_m / (spread * spread) * std::exp(-sigma * distance_km);
}

WeatherPreset weather_preset(const std::string& name) {
  if (name == "clear_air") return {name, 0.43, 0.0, 5e-14};
  if (name == "moderate_fog") return {name, 42.2, 0.0, 2e-15};
  if (name == "moderate_rain") return {name, 5.8, 5.6, 5e-15};
  throw std::invalid_argument("unknown weather preset: " + name);
}

// ---------------------------------------------------------------------------
// Composite channel

// Piecewise Chebyshev interpolant of ln F_Z and ln(1 - F_Z) in u = ln(delta*z).
struct CompositeChannel::Table {
  static constexpr double kLo = -60.0;
  static constexpr double kHi = 10.0;
  static constexpr double kWidth = 1.0;
  static constexpr int kNodes = 16;
  std::vector<std::array<double, kNodes>> log_cdf;
  std::vector<std::array<double, kNodes>> log_ccdf;
  // Set when the tail beyond the table is below e^-200, so it is returned as zero.
  bool negligible_tail = false;
  // Below the table ln F_Z is continued linearly in u (the leading power law).
  double lo_log_cdf = 0.0;
  double lo_slope = 0.0;

  static double eval(const std::array<double, kNodes>& c, double x) {
    double b1 = 0.0, b2 = 0.0;
    for (int j = kNodes - 1; j >= 1; --j) {
      const double t = 2.0 * x * b1 - b2 + c[j];
      b2 = b1;
      b1 = t;
    }
    return x * b1 - b2 + 0.5 * c[0];
  }

  template <class F>
  static std::array<double, kNodes> fit(double u0, F&& f) {
    std::array<double, kNodes> vals{}, c{};
    for (int k = 0; k < kNodes; ++k) {
      const double x = std::cos(kPi * (k + 0.5) / kNodes);
      vals[k] = f(u0 + 0.5 * kWidth * (x + 1.0));
    }
    for (int j = 0; j < kNodes; ++j) {
      double s = 0.0;
      for (int k = 0; k < kNodes; ++k) s += vals[k] * std::cos(kPi * j * (k + 0.5) / kNodes);
      c[j] = 2.0 * s / kNodes;
    }
    return c;
  }

  // Returns false outside the tabulated range.
  bool lookup(const std::vector<std::array<double, kNodes>>& t, double u, double& out) const {
    if (!(u >= kLo && u <= kHi)) return false;
    const int i = std::min(static_cast<int>((u - kLo) / kWidth), static_cast<int>(t.size()) - 1);
    const double u0 = kLo + i * kWidth;
    out = std::exp(eval(t[i], 2.0 * (u - u0) / kWidth - 1.0));
    return true;
  }
};

CompositeChannel::CompositeChannel(MalagaParams malaga, PointingModel pointing)
    : malaga_(std::move(malaga)), pointing_(pointing) {
  malaga_.validate();
  if (pointing_.enabled && !(pointing_.xi2 > 0.0)) throw std::invalid_argument("composite: xi2 must be positive");
  norm_ = malaga_.mean();
  if (pointing_.enabled) norm_ *= pointing_.xi2 / (1.0 + pointing_.xi2);
  auto t = std::make_shared<Table>();
  const double delta = malaga_.delta();
  const int panels = static_cast<int>(std::lround((Table::kHi - Table::kLo) / Table::kWidth));
  for (int i = 0; i < panels; ++i) {
    const double u0 = Table::kLo + i * Table::kWidth;
    t->log_cdf.push_back(Table::fit(u0, [&](double u) { return std::log(cdf_z_direct(std::exp(u) / delta)); }));
    t->log_ccdf.push_back(Table::fit(u0, [&](double u) { return std::log(ccdf_z_direct(std::exp(u) / delta)); }));
  }
  t->negligible_tail = std::log(ccdf_z_direct(std::exp(Table::kHi) / delta)) < -200.0;
  const double du = 0.25;
  t->lo_log_cdf = Table::eval(t->log_cdf.front(), -1.0);
  t->lo_slope = (Table::eval(t->log_cdf.front(), -1.0 + 2.0 * du / Table::kWidth) - t->lo_log_cdf) / du;
  table_ = std::move(t);
}

double CompositeChannel::cdf_z_direct(double z) const {
  if (!pointing_.enabled) return malaga_cdf(z, malaga_);
  if (!(z > 0.0)) return 0.0;
  if (std::isinf(z)) return 1.0;
  // U = exp(-E/xi2), E ~ Exp(1):  F_Z(z) = int_0^inf e^{-s} F_a(z e^{s/xi2}) ds.
  thread_local boost::math::quadrature::exp_sinh<double> q;
  const double k = 1.0 / pointing_.xi2;
  auto f = [&](double s) { return std::exp(-s) * malaga_cdf(z * std::exp(s * k), malaga_); };
  return std::clamp(q.integrate(f, 1e-13), 0.0, 1.0);
}

double CompositeChannel::ccdf_z_direct(double z) const {
  if (!pointing_.enabled) return malaga_ccdf(z, malaga_);
  if (!(z > 0.0)) return 1.0;
  if (std::isinf(z)) return 0.0;
  thread_local boost::math::quadrature::exp_sinh<double> q;
  const double k = 1.0 / pointing_.xi2;
  auto f = [&](double s) { return std::exp(-s) * malaga_ccdf(z * std::exp(s * k), malaga_); };
  return std::clamp(q.integrate(f, 1e-13), 0.0, 1.0);
}

double CompositeChannel::cdf_z(double z) const {
  if (!(z > 0.0)) return 0.0;
  double v;
  const double u = std::log(malaga_.delta() * z);
  if (table_->lookup(table_->log_cdf, u, v)) return std::min(v, 1.0);
  if (u > Table::kHi && table_->negligible_tail) return 1.0;
  if (u < Table::kLo) return std::exp(table_->lo_log_cdf + table_->lo_slope * (u - Table::kLo));
  return cdf_z_direct(z);
}

double CompositeChannel::ccdf_z(double z) const {
  if (!(z > 0.0)) return 1.0;
  double v;
  const double u = std::log(malaga_.delta() * z);
  if (table_->lookup(table_->log_ccdf, u, v)) return std::min(v, 1.0);
  if (u > Table::kHi && table_->negligible_tail) return 0.0;
  if (u < Table::kLo) return -std::expm1(table_->lo_log_cdf + table_->lo_slope * (u - Table::kLo));
  return ccdf_z_direct(z);
}

double CompositeChannel::cdf_w(double w) const { return cdf_z(w * norm_); }
double CompositeChannel::ccdf_w(double w) const { return ccdf_z(w * norm_); }

double CompositeChannel::pdf_w(double w) const {
  if (!(w > 0.0)) return 0.0;
  const double z = w * norm_;
  if (!pointing_.enabled) return norm_ * malaga_pdf(z, malaga_);
  boost::math::quadrature::exp_sinh<double> q;
  const double k = 1.0 / pointing_.xi2;
  auto f = [&](double s) {
    const double e = std::exp(s * k);
    if (!std::isfinite(z * e)) return 0.0;
    return std::exp(-s) * e * malaga_pdf(z * e, malaga_);
  };
  return norm_ * q.integrate(f, 1e-12);
}

double CompositeChannel::moment_w(double q) const {
  double m = malaga_moment(malaga_, q);
  if (pointing_.enabled) {
    if (!(pointing_.xi2 + q > 0.0)) throw std::domain_error("moment_w: order below -xi2");
    m *= pointing_.xi2 / (pointing_.xi2 + q);
  }
  return m / std::pow(norm_, q);
}

double CompositeChannel::snr_cdf(double gamma, double mu, int r, int apertures) const {
  if (!(gamma > 0.0)) return 0.0;
  if (std::isinf(gamma)) return 1.0;
  const double w = std::pow(gamma / mu, 1.0 / r);
  return std::pow(cdf_w(w), apertures);
}

double CompositeChannel::snr_ccdf(double gamma, double mu, int r, int apertures) const {
  if (!(gamma > 0.0)) return 1.0;
  if (std::isinf(gamma)) return 0.0;
  const double w = std::pow(gamma / mu, 1.0 / r);
  const double c = ccdf_w(w);
  if (apertures == 1) return c;
  if (c > 0.5) return 1.0 - std::pow(cdf_w(w), apertures);
  return -std::expm1(apertures * std::log1p(-c));
}

double CompositeChannel::mean_max_w_r(int r, int apertures) const {
  if (apertures == 1) return moment_w(r);
  boost::math::quadrature::exp_sinh<double> q;
  auto f = [&](double w) {
    if (!(w > 0.0)) return 0.0;
    const double c = ccdf_w(w);
    const double tail = (c > 0.5) ? 1.0 - std::pow(cdf_w(w), apertures) : -std::expm1(apertures * std::log1p(-c));
    return r * std::pow(w, r - 1) * tail;
  };
  return q.integrate(f, 1e-11);
}

// ---------------------------------------------------------------------------
// Series SNR distribution

namespace {

struct PreparedSeries {
  LatticeSeries single;
  int L = 0;
};


void check_model(const FsoSnrModel& m) {
  if (m.r != 1 && m.r != 2) throw std::invalid_argument("fso series: detection mode r must be 1 or 2");
  if (m.apertures < 1) throw std::invalid_argument("fso series: aperture count must be >= 1");
  if (m.L < 1) throw std::invalid_argument("fso series: L must be >= 1");
  if (!(m.mu > 0.0)) throw std::invalid_argument("fso series: mu must be positive");
}

constexpr int kMaxSeriesL = 240;
constexpr double kSeriesTarget = 1e-10;

PreparedSeries prepare_series(double z, const FsoSnrModel& m, const MalagaParams& p, const PointingModel& pm) {
  check_model(m);
  int L = m.L;
  // The turbulence-only truncation bound serves as the escalation trigger.
  while (L < kMaxSeriesL && truncation_error_bound(z, p, L) > kSeriesTarget) L *= 2;
  PreparedSeries s;
  s.L = L;
  s.single = composite_cdf_series(p, pm, L);
  return s;
}

double series_norm(const MalagaParams& p, const PointingModel& pm) {
  return p.mean() * (pm.enabled ? pm.xi2 / (1.0 + pm.xi2) : 1.0);
}

// Relative round-off of the long double series sum is about abs_sum * 1e-18.
bool ill_conditioned(const LatticeSeries::Eval& e) { return e.abs_sum > 1e12 * std::abs(e.value); }

}  // namespace

// The selection-combined CDF is the M-th power of the single-aperture series.
// Raising the summed series to the power M equals summing the expanded product
// (expand_cdf_coefficients) term by term, but it avoids the much larger
// cancellation of the expanded form at large gamma.
SeriesValue fso_snr_cdf_series(double gamma, const FsoSnrModel& m, const MalagaParams& p, const PointingModel& pm) {
  SeriesValue out;
  if (!(gamma > 0.0)) return out;
  const double z = series_norm(p, pm) * std::pow(gamma / m.mu, 1.0 / m.r);
  const auto s = prepare_series(z, m, p, pm);
  const auto e = s.single.evaluate(z);
  out.value = std::pow(e.value, m.apertures);
  out.L_used = s.L;
  out.ill_conditioned = ill_conditioned(e);
  if (out.ill_conditioned) spdlog::debug("fso series CDF ill-conditioned at gamma={}", gamma);
  return out;
}

SeriesValue fso_snr_pdf_series(double gamma, const FsoSnrModel& m, const MalagaParams& p, const PointingModel& pm) {
  SeriesValue out;
  if (!(gamma > 0.0)) return out;
  const double z = series_norm(p, pm) * std::pow(gamma / m.mu, 1.0 / m.r);
  const auto s = prepare_series(z, m, p, pm);
  const auto e = s.single.evaluate(z);
  // d/dz F^M = M F^{M-1} F'; dz/dgamma = z / (r * gamma)
  out.value = m.apertures * std::pow(e.value, m.apertures - 1) * e.derivative * z / (m.r * gamma);
  out.L_used = s.L;
  out.ill_conditioned = ill_conditioned(e);
  return out;
}

FsoSnrSeries::FsoSnrSeries(const FsoSnrModel& m, const MalagaParams& p, const PointingModel& pm) : model_(m) {
  check_model(m);
  norm_ = series_norm(p, pm);
  for (int L = m.L;; L *= 2) {
    Level lv;
    lv.L = L;
    // The bound grows with z, so the accepted range of each level is an interval (0, z_max].
    double lo = std::log(1e-12), hi = std::log(1e6);
    if (truncation_error_bound(std::exp(lo), p, L) > kSeriesTarget) hi = lo;
    for (int it = 0; it < 60 && hi > lo; ++it) {
      const double mid = 0.5 * (lo + hi);
      (truncation_error_bound(std::exp(mid), p, L) > kSeriesTarget ? hi : lo) = mid;
    }
    lv.z_max = std::exp(lo);
    const auto series = composite_cdf_series(p, pm, L);
    for (const auto& [k, c] : series.terms()) lv.terms.emplace_back(series.exponent_l(k), c);
    levels_.push_back(std::move(lv));
    if (L >= kMaxSeriesL) break;
  }
}

const FsoSnrSeries::Level& FsoSnrSeries::level_for(double z) const {
  for (const auto& lv : levels_)
    if (z <= lv.z_max) return lv;
  return levels_.back();
}

namespace {
LatticeSeries::Eval evaluate_terms(const std::vector<std::pair<long double, long double>>& terms, double z) {
  LatticeSeries::Eval e;
  const long double lz = std::log(static_cast<long double>(z));
  long double v = 0.0L, d = 0.0L, a = 0.0L;
  for (const auto& [ex, c] : terms) {
    const long double t = c * std::exp(ex * lz);
    v += t;
    a += std::abs(t);
    d += t * ex / z;
  }
  e.value = static_cast<double>(v);
  e.derivative = static_cast<double>(d);
  e.abs_sum = static_cast<double>(a);
  return e;
}
}  // namespace

SeriesValue FsoSnrSeries::cdf(double gamma) const {
  SeriesValue out;
  if (!(gamma > 0.0)) return out;
  const double z = norm_ * std::pow(gamma / model_.mu, 1.0 / model_.r);
  const auto& lv = level_for(z);
  const auto e = evaluate_terms(lv.terms, z);
  out.value = std::pow(e.value, model_.apertures);
  out.L_used = lv.L;
  out.ill_conditioned = ill_conditioned(e);
  return out;
}

SeriesValue FsoSnrSeries::pdf(double gamma) const {
  SeriesValue out;
  if (!(gamma > 0.0)) return out;
  const double z = norm_ * std::pow(gamma / model_.mu, 1.0 / model_.r);
  const auto& lv = level_for(z);
  const auto e = evaluate_terms(lv.terms, z);
  out.value = model_.apertures * std::pow(e.value, model_.apertures - 1) * e.derivative * z / (model_.r * gamma);
  out.L_used = lv.L;
  out.ill_conditioned = ill_conditioned(e);
  return out;
}

}  // namespace rfso::fso
