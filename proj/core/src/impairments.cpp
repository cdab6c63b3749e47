#include "rfso/impairments.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rfso/specfun.hpp"

namespace rfso::imp {

double HpaModel::ibo() const { return std::pow(10.0, ibo_db / 10.0); }
double HpaModel::a_sat() const { return std::sqrt(ibo() * varrho2); }

std::string to_string(HpaKind k) {
  switch (k) {
    case HpaKind::none: return "none";
    case HpaKind::sel: return "sel";
    case HpaKind::twta: return "twta";
  }
  return "none";
}

HpaKind hpa_kind_from_string(const std::string& s) {
  if (s == "none" || s == "NONE") return HpaKind::none;
  if (s == "sel" || s == "SEL") return HpaKind::sel;
  if (s == "twta" || s == "TWTA") return HpaKind::twta;
  throw std::invalid_argument("unknown HPA kind: " + s);
}

double exp_times_ei_neg(double x) {
  if (!(x > 0.0)) throw std::domain_error("exp_times_ei_neg: x must be positive");
  if (x < 40.0) return std::exp(x) * specfun::exp_integral_ei(-x);
  // -sum_k k! / (-x)^k / x, asymptotic; the terms shrink until k ~ x.
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= -k / x;
    sum += term;
  }
  return -sum / x;
}

std::complex<double> hpa_transfer(std::complex<double> phi, const HpaModel& m) {
  const double r = std::abs(phi);
  if (m.kind == HpaKind::none || r == 0.0) return phi;
  const double a = m.a_sat();
  const double ph = std::arg(phi);
  if (m.kind == HpaKind::sel) return std::polar(std::min(r, a), ph);
  const double d = a * a + r * r;
  return std::polar(a * a * r / d, ph + m.phase_max * r * r / d);
}

BussgangParams bussgang_params(const HpaModel& m, BussgangBranch branch) {
  BussgangParams b;
  b.branch = branch;
  if (m.kind == HpaKind::none) {
    b.formula = "linear";
    return b;
  }
  if (!(m.varrho2 > 0.0)) throw std::invalid_argument("bussgang: drive power must be positive");
  if (!std::isfinite(m.ibo_db)) {
    b.formula = "linear";
    return b;
  }
  const double k = m.ibo();
  const double vr = std::sqrt(m.varrho2);
  const double a = m.a_sat();
  if (m.kind == HpaKind::sel) {
    const double denom = branch == BussgangBranch::corrected ? 2.0 * vr : 2.0 * m.varrho2;
    b.epsilon = 1.0 - std::exp(-k) + std::sqrt(std::numbers::pi) * a / denom * specfun::erfc(a / vr);
    b.sigma_d2 = m.varrho2 * (1.0 - std::exp(-k) - b.epsilon * b.epsilon);
    b.formula = branch == BussgangBranch::corrected ? "sel: sqrt(pi)*A/(2*varrho)" : "sel: sqrt(pi)*A/(2*varrho^2)";
  } else {
    const double e = exp_times_ei_neg(k);
    if (branch == BussgangBranch::corrected) {
      b.epsilon = k * (1.0 + k * e);
      b.formula = "twta: k*(1 + k*e^k*Ei(-k))";
    } else {
      b.epsilon = k * (1.0 + k * std::exp(k) + specfun::exp_integral_ei(-k));
      b.formula = "twta: k*(1 + k*e^k + Ei(-k))";
    }
    const double iota = -k * k * ((1.0 + k) * e + 1.0);
    b.sigma_d2 = (branch == BussgangBranch::corrected ? m.varrho2 * iota : a * a * a * a / m.varrho2 *
                                                                                 (-((1.0 + k) * e + 1.0))) -
                 m.varrho2 * b.epsilon * b.epsilon;
  }
  if (b.sigma_d2 < 0.0 && b.sigma_d2 > -1e-14 * m.varrho2) b.sigma_d2 = 0.0;
  return b;
}

double clipping_factor(const HpaModel& m) {
  if (m.kind == HpaKind::none || !std::isfinite(m.ibo_db)) return 1.0;
  const double k = m.ibo();
  if (m.kind == HpaKind::sel) return -std::expm1(-k);
  return -k * k * ((1.0 + k) * exp_times_ei_neg(k) + 1.0);
}

double relay_gain(double ps, double a_sr, int n_antennas, double pr, double mean_h2, double mean_f2,
                  double sigma2_sr, double varrho2) {
  if (!(ps >= 0.0) || !(a_sr > 0.0) || n_antennas < 1 || !(pr >= 0.0) || !(sigma2_sr > 0.0) || !(varrho2 > 0.0))
    throw std::invalid_argument("relay_gain: invalid input");
  return std::sqrt(varrho2 / (ps * a_sr / n_antennas * mean_h2 + pr * mean_f2 + sigma2_sr));
}

double rho1(const BussgangParams& b, double varrho2, double mean_snr, double mean_inr) {
  return 1.0 + b.sigma_d2 * (mean_snr + mean_inr + 1.0) / (b.epsilon * b.epsilon * varrho2);
}

double rho1_from_gain(const BussgangParams& b, double gain, double sigma2_sr) {
  return 1.0 + b.sigma_d2 / (b.epsilon * b.epsilon * gain * gain * sigma2_sr);
}

IqImbalance iq_coefficients(double zeta, double theta) {
  if (!(zeta > 0.0)) throw std::invalid_argument("iq_coefficients: zeta must be positive");
  using namespace std::complex_literals;
  IqImbalance q;
  q.zeta = zeta;
  q.theta = theta;
  q.nu1 = (1.0 + zeta * std::exp(-1i * theta)) / 2.0;
  q.nu2 = (1.0 - zeta * std::exp(1i * theta)) / 2.0;
  q.rho2 = std::norm(q.nu2 / q.nu1);
  return q;
}

IqImbalance iq_from_ilr(double rho2) {
  if (!(rho2 >= 0.0) || !(rho2 < 1.0)) throw std::invalid_argument("iq_from_ilr: leakage ratio must be in [0, 1)");
  const double s = std::sqrt(rho2);
  return iq_coefficients((1.0 - s) / (1.0 + s), 0.0);
}

}  // namespace rfso::imp
