#include "rfso/specfun.hpp"

#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace rfso::specfun {

namespace {

using namespace boost::math::policies;
using quiet_policy = policy<overflow_error<ignore_error>, underflow_error<ignore_error>,
                            evaluation_error<errno_on_error>, promote_double<false>>;

constexpr double kPi = std::numbers::pi;

// log(sin(pi z)) without overflow for large |Im z|.
cplx log_sin_pi(cplx z) {
  const cplx w = kPi * z;
  if (std::abs(w.imag()) < 20.0) return std::log(std::sin(w));
  const cplx i(0.0, 1.0);
  if (w.imag() > 0.0) return std::log(cplx(0.0, 0.5)) - i * w + std::log(1.0 - std::exp(2.0 * i * w));
  return std::log(cplx(0.0, -0.5)) + i * w + std::log(1.0 - std::exp(-2.0 * i * w));
}

cplx stirling(cplx z) {
  // Bernoulli-number tail of the asymptotic series, |z| >= 10.
  static constexpr double c[] = {1.0 / 12.0,       -1.0 / 360.0,        1.0 / 1260.0,
                                 -1.0 / 1680.0,    1.0 / 1188.0,        -691.0 / 360360.0,
                                 1.0 / 156.0,      -3617.0 / 122400.0};
  const cplx zi = 1.0 / z;
  const cplx zi2 = zi * zi;
  cplx acc = 0.0;
  cplx p = zi;
  for (double ck : c) {
    acc += ck * p;
    p *= zi2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + acc;
}

}  // namespace

cplx ln_gamma(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw DomainError("ln_gamma: pole at non-positive integer");
  if (z.real() < 0.5) return std::log(kPi) - log_sin_pi(z) - ln_gamma(1.0 - z);
  cplx prod = 1.0;
  while (z.real() < 10.0) {
    prod *= z;
    z += 1.0;
  }
  return stirling(z) - std::log(prod);
}

double ln_gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) throw DomainError("ln_gamma: pole at non-positive integer");
  return std::lgamma(x);
}

double gamma_sign(double x) {
  if (x > 0.0) return 1.0;
  return (static_cast<long long>(std::floor(x)) % 2 == 0) ? 1.0 : -1.0;
}

double upper_incomplete_gamma(double a, double x) {
  if (x < 0.0) throw DomainError("upper_incomplete_gamma: x < 0");
  if (a > 0.0) return boost::math::tgamma(a, x, quiet_policy());
  if (x == 0.0) throw DomainError("upper_incomplete_gamma: a <= 0 requires x > 0");
  if (a == 0.0) return -boost::math::expint(-x, quiet_policy());  // E1(x)
  // Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a
  return (upper_incomplete_gamma(a + 1.0, x) - std::exp(a * std::log(x) - x)) / a;
}

double regularized_lower_gamma(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw DomainError("regularized_lower_gamma: a <= 0 or x < 0");
  return boost::math::gamma_p(a, x, quiet_policy());
}

double regularized_upper_gamma(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw DomainError("regularized_upper_gamma: a <= 0 or x < 0");
  return boost::math::gamma_q(a, x, quiet_policy());
}

double exp_integral_ei(double x) {
  if (!(x < 0.0)) throw DomainError("exp_integral_ei: requires x < 0");
  return boost::math::expint(x, quiet_policy());
}

double erfc(double x) { return std::erfc(x); }
double erf(double x) { return std::erf(x); }

double bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k: requires x > 0");
  return boost::math::cyl_bessel_k(std::abs(nu), x, quiet_policy());
}

double log_bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw DomainError("log_bessel_k: requires x > 0");
  const double v = std::abs(nu);
  if (x < 500.0) {
    const double k = boost::math::cyl_bessel_k(v, x, quiet_policy());
    if (k > 0.0 && std::isfinite(k)) return std::log(k);
  }
  // Hankel expansion: K_v(x) ~ sqrt(pi/(2x)) e^{-x} sum_k a_k(v) / x^k
  const double mu = 4.0 * v * v;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return 0.5 * std::log(kPi / (2.0 * x)) - x + std::log(sum);
}

}  // namespace rfso::specfun
