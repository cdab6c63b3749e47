#pragma once

#include <limits>
#include <string>

#include "rfso/scenario.hpp"

namespace rfso::analytic {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// A closed-form result, or NaN with the reason it is unavailable.
struct Value {
  double value = kNaN;
  bool available = false;
  std::string note;
};

// Quadrature route. These integrate the conditional first-hop CDF against the
// interference and FSO distributions and work for any aperture count.
double outage_quadrature(const ScenarioPoint& s, double threshold);
/// 1 - outage, computed directly (no cancellation).
double outage_complement_quadrature(const ScenarioPoint& s, double threshold);
double ber_quadrature(const ScenarioPoint& s);
double capacity_quadrature(const ScenarioPoint& s);

// Mellin-Barnes closed forms. Single aperture only; BER and capacity also need rho2 = 0.
Value outage_closed_form(const ScenarioPoint& s, double threshold);
Value ber_closed_form(const ScenarioPoint& s);
Value capacity_closed_form(const ScenarioPoint& s);

/// 1 when the threshold is at or above 1/rho2; otherwise the closed form when
/// available and the quadrature value if not.
double outage_cdf(const ScenarioPoint& s, double threshold);

/// High-SNR outage limit from Aitken extrapolation of the quadrature at 100/110/120 dB.
/// Zero for ideal hardware, which has no floor.
struct Floor {
  double value = 0.0;
  double samples[3] = {0.0, 0.0, 0.0};
};
Floor outage_floor(const Scenario& sc, double threshold);

struct Diversity {
  double gain = 0.0;
  bool impaired = false;  // gain forced to zero by non-ideal hardware
};
/// min(N m_SR, M min(xi2, alpha, beta) / r) for ideal hardware.
Diversity diversity_gain(const ScenarioPoint& s);
/// -d log10(outage) / d log10(mean SNR) between two sweep values, from the quadrature.
double diversity_slope(const Scenario& sc, double lo_db, double hi_db, double threshold);

// Capacity helpers.
double capacity_approx(const ScenarioPoint& s);
/// E[gamma_SR / (rho1 (1+rho2) (1+gamma_R))].
double jensen_j(const ScenarioPoint& s);
/// The typeset G^{1,2}_{2,1} form with the argument read as 1/beta_R.
Value jensen_j_meijer(const ScenarioPoint& s);
double capacity_jensen_bound(const ScenarioPoint& s);

struct Ceilings {
  double i_inf = std::numeric_limits<double>::infinity();
  double i_max = std::numeric_limits<double>::infinity();
  bool inf_unbounded = true;
  bool max_unbounded = true;
  double min() const { return i_inf < i_max ? i_inf : i_max; }
};
Ceilings capacity_ceilings(const ScenarioPoint& s);

}  // namespace rfso::analytic
