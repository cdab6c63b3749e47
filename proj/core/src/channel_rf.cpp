#include "rfso/channel_rf.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rfso/specfun.hpp"

namespace rfso::rf {

double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

InterferenceModel InterferenceModel::identical(int count, double m, double inr) {
  if (count < 0) throw std::invalid_argument("interference: negative interferer count");
  InterferenceModel im;
  im.count = count;
  if (count == 0) return im;
  if (!(m > 0.0) || !(inr > 0.0)) throw std::invalid_argument("interference: shape and INR must be positive");
  // Each interferer is Gamma(m, inr/m); the sum of identical rates is Gamma(count*m, inr/m).
  im.m_r = count * m;
  im.beta_r = m / inr;
  return im;
}

RfLinkBudget rf_preset(const std::string& weather) {
  RfLinkBudget b;
  if (weather == "clear_air" || weather == "moderate_fog") {
    b.alpha_rain_db_per_km = 0.0;
  } else if (weather == "moderate_rain") {
    b.alpha_rain_db_per_km = 5.6;
  } else {
    throw std::invalid_argument("unknown weather preset: " + weather);
  }
  return b;
}

double rf_power_gain_db(const RfLinkBudget& b) {
  if (!(b.distance_km > 0.0)) throw std::invalid_argument("rf_power_gain: distance must be positive");
  if (!(b.wavelength_m > 0.0)) throw std::invalid_argument("rf_power_gain: wavelength must be positive");
  const double d_m = b.distance_km * 1000.0;
  return b.g_tx_dbi + b.g_rx_dbi - 20.0 * std::log10(4.0 * std::numbers::pi * d_m / b.wavelength_m) -
         (b.alpha_ox_db_per_km + b.alpha_rain_db_per_km) * b.distance_km;
}

double rf_noise_variance_dbm(const RfLinkBudget& b) {
  if (!(b.bandwidth_mhz > 0.0)) throw std::invalid_argument("rf_noise_variance: bandwidth must be positive");
  return 10.0 * std::log10(b.bandwidth_mhz) + b.n0_dbm_per_mhz + b.noise_figure_db;
}

double rf_noise_variance_mw(const RfLinkBudget& b) { return db_to_lin(rf_noise_variance_dbm(b)); }

double rf_mean_snr(const RfLinkBudget& b, double ps_dbm, int n_antennas, double mean_channel_power) {
  const double a = db_to_lin(rf_power_gain_db(b));
  const double ps = db_to_lin(ps_dbm);
  return a * ps * (n_antennas * mean_channel_power) / (n_antennas * rf_noise_variance_mw(b));
}

namespace {
void check(const RfFading& f) {
  if (f.n_antennas < 1 || f.m_sr < 1) throw std::invalid_argument("rf fading: N and m_SR must be integers >= 1");
  if (!(f.mean_snr > 0.0)) throw std::invalid_argument("rf fading: mean SNR must be positive");
}
}  // namespace

double gamma_sr_pdf(double g, const RfFading& f) {
  check(f);
  if (g < 0.0) return 0.0;
  const double k = f.shape();
  const double th = f.scale();
  if (g == 0.0) return k == 1 ? 1.0 / th : 0.0;
  return std::exp((k - 1.0) * std::log(g / th) - g / th - std::lgamma(k)) / th;
}

double gamma_sr_cdf(double g, const RfFading& f) {
  check(f);
  if (g <= 0.0) return 0.0;
  if (std::isinf(g)) return 1.0;
  return specfun::regularized_lower_gamma(f.shape(), g / f.scale());
}

double interference_pdf(double g, const InterferenceModel& m) {
  if (!m.active()) throw std::domain_error("interference_pdf: no interferers");
  if (g < 0.0) return 0.0;
  if (g == 0.0) return m.m_r == 1.0 ? m.beta_r : (m.m_r < 1.0 ? INFINITY : 0.0);
  return std::exp(m.m_r * std::log(m.beta_r) + (m.m_r - 1.0) * std::log(g) - m.beta_r * g - std::lgamma(m.m_r));
}

double interference_cdf(double g, const InterferenceModel& m) {
  if (!m.active()) return g >= 0.0 ? 1.0 : 0.0;
  if (g <= 0.0) return 0.0;
  return specfun::regularized_lower_gamma(m.m_r, m.beta_r * g);
}

double mean_inverse_one_plus(const InterferenceModel& m) {
  if (!m.active()) return 1.0;
  boost::math::quadrature::exp_sinh<double> q;
  // Substitute x = beta*g so the integrand is a unit-rate gamma kernel.
  const double lg = std::lgamma(m.m_r);
  auto f = [&](double x) {
    if (x <= 0.0) return 0.0;
    return std::exp((m.m_r - 1.0) * std::log(x) - x - lg) / (1.0 + x / m.beta_r);
  };
  return q.integrate(f, 1e-11);
}

}  // namespace rfso::rf
