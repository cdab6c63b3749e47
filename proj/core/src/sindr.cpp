#include "rfso/sindr.hpp"

#include <stdexcept>

namespace rfso {

double effective_relay_sinr(double gamma_sr, double gamma_r) {
  if (gamma_sr < 0.0 || gamma_r < 0.0) throw std::invalid_argument("effective_relay_sinr: negative input");
  return gamma_sr / (1.0 + gamma_r);
}

double mean_effective_sinr(const rf::RfFading& fading, const rf::InterferenceModel& interference) {
  return fading.mean_snr * rf::mean_inverse_one_plus(interference);
}

double end_to_end_sindr(const LinkState& s) {
  const double num = s.gamma_sr * s.gamma_rd;
  const double w = (1.0 + s.rho2) * (1.0 + s.gamma_r);
  const double den = s.rho2 * num + s.rho1 * w * s.gamma_rd + w * (s.mean_eff_sinr + s.rho1);
  if (den <= 0.0) return 0.0;
  return num / den;
}

}  // namespace rfso
