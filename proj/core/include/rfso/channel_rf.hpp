#pragma once

#include <string>

namespace rfso::rf {

struct RfLinkBudget {
  double g_tx_dbi = 44.0;
  double g_rx_dbi = 44.0;
  double wavelength_m = 299792458.0 / 28e9;
  double alpha_ox_db_per_km = 15.1;
  double alpha_rain_db_per_km = 0.0;
  double distance_km = 0.1;
  double bandwidth_mhz = 850.0;
  double n0_dbm_per_mhz = -144.0;
  double noise_figure_db = 5.0;
};

/// Sum of N Nakagami-m branches; gamma_sr ~ Gamma(N*m, mean_snr/(N*m)).
struct RfFading {
  int n_antennas = 1;
  int m_sr = 1;
  double mean_snr = 1.0;  // linear

  int shape() const { return n_antennas * m_sr; }
  double scale() const { return mean_snr / shape(); }
};

/// Aggregate interference-to-noise ratio gamma_R ~ Gamma(m_R, 1/beta_R).
/// count == 0 disables interference.
struct InterferenceModel {
  int count = 0;
  double m_r = 0.0;
  double beta_r = 1.0;

  bool active() const { return count > 0 && m_r > 0.0; }
  double mean() const { return active() ? m_r / beta_r : 0.0; }
  /// Build from identical interferers, each with Nakagami shape m and mean INR inr (linear).
  static InterferenceModel identical(int count, double m, double inr);
};

RfLinkBudget rf_preset(const std::string& weather);

double rf_power_gain_db(const RfLinkBudget& b);
double rf_noise_variance_dbm(const RfLinkBudget& b);
double rf_noise_variance_mw(const RfLinkBudget& b);
/// Mean first-hop SNR from the budget: A_SR * P_s * E||h||^2 / (N * sigma^2).
double rf_mean_snr(const RfLinkBudget& b, double ps_dbm, int n_antennas, double mean_channel_power = 1.0);

double gamma_sr_pdf(double g, const RfFading& f);
double gamma_sr_cdf(double g, const RfFading& f);

double interference_pdf(double g, const InterferenceModel& m);
double interference_cdf(double g, const InterferenceModel& m);
/// E[1/(1+gamma_R)], equal to 1 without interference.
double mean_inverse_one_plus(const InterferenceModel& m);

double db_to_lin(double db);
double lin_to_db(double lin);

}  // namespace rfso::rf
