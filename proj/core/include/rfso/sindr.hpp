#pragma once

#include "rfso/channel_rf.hpp"

namespace rfso {

struct LinkState {
  double gamma_sr = 0.0;
  double gamma_r = 0.0;
  double gamma_rd = 0.0;
  double rho1 = 1.0;
  double rho2 = 0.0;
  double mean_eff_sinr = 0.0;  // E[gamma_SR / (1 + gamma_R)], a per-scenario constant
};

double effective_relay_sinr(double gamma_sr, double gamma_r);
double mean_effective_sinr(const rf::RfFading& fading, const rf::InterferenceModel& interference);

/// End-to-end SINDR of the fixed-gain relay with distortion and image leakage.
double end_to_end_sindr(const LinkState& s);

}  // namespace rfso
