#pragma once

#include <complex>
#include <string>

namespace rfso::imp {

enum class HpaKind { none, sel, twta };

/// Memoryless relay amplifier. The mean drive power varrho2 is 1 by default so
/// the input back-off alone fixes the saturation amplitude.
struct HpaModel {
  HpaKind kind = HpaKind::none;
  double ibo_db = 0.0;
  double phase_max = 0.0;  // TWTA AM/PM constant Phi (rad)
  double varrho2 = 1.0;

  double ibo() const;       // A_sat^2 / varrho2, linear
  double a_sat() const;     // input saturation amplitude
};

/// Which closed form produced the Bussgang parameters.
enum class BussgangBranch {
  corrected,  // dimensionally consistent forms confirmed by regression
  printed,    // forms exactly as typeset, kept for comparison
};

struct BussgangParams {
  double epsilon = 1.0;
  double sigma_d2 = 0.0;
  BussgangBranch branch = BussgangBranch::corrected;
  std::string formula;  // human-readable tag of the selected formula
};

std::complex<double> hpa_transfer(std::complex<double> phi, const HpaModel& m);

/// Bussgang gain and distortion power for a circular Gaussian drive of power varrho2.
BussgangParams bussgang_params(const HpaModel& m, BussgangBranch branch = BussgangBranch::corrected);

/// E[A_m(|phi|)^2] / varrho2 for the Gaussian drive; 1 without an amplifier.
double clipping_factor(const HpaModel& m);

/// Fixed relay gain that normalizes the mean drive power to varrho2.
double relay_gain(double ps, double a_sr, int n_antennas, double pr, double mean_h2, double mean_f2,
                  double sigma2_sr, double varrho2);

/// Ratio of SNR to SNDR at the relay output.
/// With the fixed gain above, 1/(G^2 sigma2_SR) = (mean_snr + mean_inr + 1)/varrho2, so
/// rho1 = 1 + sigma_d2 * (mean_snr + mean_inr + 1) / (epsilon^2 * varrho2).
double rho1(const BussgangParams& b, double varrho2, double mean_snr, double mean_inr);
/// Same ratio written with an explicit gain.
double rho1_from_gain(const BussgangParams& b, double gain, double sigma2_sr);

struct IqImbalance {
  double zeta = 1.0;
  double theta = 0.0;
  std::complex<double> nu1{1.0, 0.0};
  std::complex<double> nu2{0.0, 0.0};
  double rho2 = 0.0;  // image-leakage ratio, linear
};

IqImbalance iq_coefficients(double zeta, double theta);
/// Amplitude-only imbalance (theta = 0) that yields the requested leakage ratio.
IqImbalance iq_from_ilr(double rho2);

/// exp(x) * Ei(-x) for x > 0, stable for large x.
double exp_times_ei_neg(double x);

std::string to_string(HpaKind k);
HpaKind hpa_kind_from_string(const std::string& s);

}  // namespace rfso::imp
