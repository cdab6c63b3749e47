// Malaga (M) turbulence: exact density, truncated power series, truncation
// bound, CDF, moments and the lattice power series used for aperture powers.
//
// Throughout, the density is handled as the finite mixture
//   f(I) = sum_n pi_n f_n(I),  f_n = density of X*Y_n,
// with X ~ Gamma(alpha, 1/alpha) and Y_n ~ Gamma(n, 1/xi). Each f_n is the
// K-Bessel product-of-gammas density, which makes the CDF and moments exact.

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <spdlog/spdlog.h>
#include <stdexcept>

#include "rfso/channel_fso.hpp"
#include "rfso/specfun.hpp"

namespace rfso::fso {

namespace {

constexpr double kPi = std::numbers::pi;

// log|Gamma(x)| and its sign, for real x away from poles.
struct SignedLog {
  double log_abs;
  double sign;
};
SignedLog lgamma_signed(double x) {
  return {specfun::ln_gamma(x), specfun::gamma_sign(x)};
}

double nudge_off_integer(double v, bool& nudged) {
  const double r = std::round(v);
  if (std::abs(v - r) < kIntegerGuard) {
    nudged = true;
    return (v >= r) ? r + kIntegerGuard : r - kIntegerGuard;
  }
  return v;
}

// Common factor of component n's Bessel expansion: 2/(Gamma(alpha)Gamma(n)) * pi/(2 sin(pi(alpha-n))).
double component_prefactor(double alpha, int n) {
  return 2.0 / (std::tgamma(alpha) * std::tgamma(static_cast<double>(n))) * kPi /
         (2.0 * std::sin(kPi * (alpha - n)));
}

// Series CDF of X*Y_n at z (accurate for delta*z up to about 1).
double component_cdf_series(double alpha, int n, double delta, double z) {
  const double pref = component_prefactor(alpha, n);
  const double x = delta * z;
  const double lx = std::log(x);
  const auto g1 = lgamma_signed(n - alpha + 1.0);
  const auto g2 = lgamma_signed(alpha - n + 1.0);
  // u1 = x^{p+n}/(Gamma(p-alpha+n+1) p!), u2 = x^{p+alpha}/(Gamma(p+alpha-n+1) p!)
  double u1 = g1.sign * std::exp(n * lx - g1.log_abs);
  double u2 = g2.sign * std::exp(alpha * lx - g2.log_abs);
  long double sum = 0.0L;
  for (int p = 0; p < 400; ++p) {
    const double t1 = u1 / (p + n);
    const double t2 = u2 / (p + alpha);
    sum += static_cast<long double>(t1) - static_cast<long double>(t2);
    if (p > 2 && std::abs(t1) + std::abs(t2) < 1e-19 * std::abs(static_cast<double>(sum))) break;
    u1 *= x / ((p + 1.0) * (p - alpha + n + 1.0));
    u2 *= x / ((p + 1.0) * (p + alpha - n + 1.0));
  }
  return pref * static_cast<double>(sum);
}

// Complementary CDF of X*Y_n from the finite Bessel sum (no cancellation).
double component_ccdf_bessel(double alpha, int n, double xi, double z) {
  const double c = xi * z;
  const double arg = 2.0 * std::sqrt(alpha * c);
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double l = k * std::log(c) - std::lgamma(k + 1.0) + std::log(2.0) + alpha * std::log(alpha) -
                     std::lgamma(alpha) + 0.5 * (alpha - k) * (std::log(c) - std::log(alpha)) +
                     specfun::log_bessel_k(alpha - k, arg);
    s += std::exp(l);
  }
  return s;
}

double log_component_pdf(double alpha, int n, double delta, double z) {
  return std::log(2.0) + 0.5 * (alpha + n) * std::log(delta) + (0.5 * (alpha + n) - 1.0) * std::log(z) +
         specfun::log_bessel_k(alpha - n, 2.0 * std::sqrt(delta * z)) - std::lgamma(alpha) -
         std::lgamma(static_cast<double>(n));
}

}  // namespace

double omega_prime_from(const MalagaGenerators& gen) {
  return gen.omega + 2.0 * gen.b0 * gen.rho + 2.0 * std::sqrt(2.0 * gen.b0 * gen.rho * gen.omega) * std::cos(gen.phase);
}

MalagaParams MalagaParams::from_generators(double alpha, int beta, const MalagaGenerators& gen) {
  MalagaParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.generators = gen;
  p.g = 2.0 * gen.b0 * (1.0 - gen.rho);
  p.omega_prime = omega_prime_from(gen);
  p.validate();
  return p;
}

MalagaParams MalagaParams::from_generators_with_g(double alpha, int beta, const MalagaGenerators& gen, double g) {
  MalagaParams p = from_generators(alpha, beta, gen);
  const double implied = p.g;
  p.g = g;
  p.g_override = std::abs(g - implied) > 1e-12 * std::max(1.0, implied);
  p.validate();
  return p;
}

MalagaParams MalagaParams::caption_set() {
  return from_generators_with_g(2.1, 2, MalagaGenerators{0.95, 0.596, 1.32, 0.0}, 0.001);
}

void MalagaParams::validate() {
  if (!(alpha > 0.0)) throw std::invalid_argument("malaga: alpha must be positive");
  if (beta < 1) throw std::invalid_argument("malaga: beta must be a positive integer");
  if (!(g > 0.0)) throw std::invalid_argument("malaga: g must be positive");
  if (!(omega_prime > 0.0)) throw std::invalid_argument("malaga: Omega' must be positive");
  bool nudged = false;
  const double a = nudge_off_integer(alpha, nudged);
  if (nudged) {
    spdlog::warn("malaga: alpha={} is within {} of an integer; using {}", alpha, kIntegerGuard, a);
    alpha = a;
    alpha_nudged = true;
  }
}

double malaga_constant_A(const MalagaParams& p) {
  const double a = p.alpha, g = p.g, b = p.beta, op = p.omega_prime;
  return std::exp(std::log(2.0) + 0.5 * a * std::log(a) - (1.0 + 0.5 * a) * std::log(g) - std::lgamma(a) +
                  (b + 0.5 * a) * std::log(g * b / (g * b + op)));
}

double malaga_constant_an(const MalagaParams& p, int n) {
  const double a = p.alpha, g = p.g, b = p.beta, op = p.omega_prime;
  const double binom = boost::math::binomial_coefficient<double>(p.beta - 1, n - 1);
  return binom * std::exp((1.0 - 0.5 * n) * std::log(g * b + op) - std::lgamma(static_cast<double>(n)) +
                          (n - 1) * std::log(op / g) + 0.5 * n * std::log(a / b));
}

std::vector<double> mixture_weights(const MalagaParams& p) {
  const double delta = p.delta();
  const double lA = std::log(malaga_constant_A(p));
  std::vector<double> w(p.beta);
  for (int n = 1; n <= p.beta; ++n) {
    const double binom = boost::math::binomial_coefficient<double>(p.beta - 1, n - 1);
    const double la = std::log(binom) + (1.0 - 0.5 * n) * std::log(p.g * p.beta + p.omega_prime) -
                      std::lgamma(static_cast<double>(n)) + (n - 1) * std::log(p.omega_prime / p.g) +
                      0.5 * n * std::log(p.alpha / p.beta);
    w[n - 1] = std::exp(lA + la + std::lgamma(p.alpha) + std::lgamma(static_cast<double>(n)) - std::log(2.0) -
                        0.5 * (p.alpha + n) * std::log(delta));
  }
  return w;
}

double malaga_pdf(double ia, const MalagaParams& p) {
  if (!(ia > 0.0)) return 0.0;
  const auto w = mixture_weights(p);
  const double delta = p.delta();
  double s = 0.0;
  for (int n = 1; n <= p.beta; ++n) s += w[n - 1] * std::exp(log_component_pdf(p.alpha, n, delta, ia));
  return s;
}

namespace {

// Sum of the power-series terms q in [q_lo, q_hi] of the density, with the
// inner sums kept in long double. Stops early once a block of terms is
// negligible against the running total when q_hi is open-ended.
long double malaga_series_block(double ia, const MalagaParams& p, int q_lo, int q_hi, bool open_ended) {
  const double a = p.alpha;
  const double xi = p.xi();
  const double delta = a * xi;
  // Xi and omega_n as in the rewritten constants A = Xi*delta^{alpha/2}, a_n = omega_n*delta^{n/2}.
  const double big_xi = 2.0 * std::pow(p.g * xi, p.beta) / (p.g * std::tgamma(a));
  long double total = 0.0L;
  for (int n = 1; n <= p.beta; ++n) {
    const double omega_n = boost::math::binomial_coefficient<double>(p.beta - 1, n - 1) *
                           std::exp((1.0 - n) * std::log(static_cast<double>(p.beta)) - std::log(xi) -
                                    std::lgamma(static_cast<double>(n)) + (n - 1) * std::log(p.omega_prime / p.g));
    const double k = kPi * omega_n / (2.0 * std::sin(kPi * (a - n)));
    long double inner = 0.0L;
    for (int q = q_lo; q <= q_hi; ++q) {
      // rho_q(x, y) = delta^{q+y} / (Gamma(q-x+y+1) q!)
      const auto g1 = lgamma_signed(q - a + n + 1.0);
      const auto g2 = lgamma_signed(q - n + a + 1.0);
      const long double lq = std::lgamma(q + 1.0L);
      const long double ld = std::log(static_cast<long double>(delta)), li = std::log(static_cast<long double>(ia));
      const long double t1 = g1.sign * std::exp((q + n) * ld + (q + n - 1) * li - g1.log_abs - lq);
      const long double t2 = g2.sign * std::exp((q + a) * ld + (q + a - 1) * li - g2.log_abs - lq);
      inner += t1 - t2;
      if (open_ended && q > q_lo + 4 && std::abs(t1 - t2) < 1e-30L * std::abs(inner)) break;
    }
    total += k * inner;
  }
  return big_xi * total;
}

}  // namespace

double malaga_pdf_truncated(double ia, const MalagaParams& p, int L) {
  if (L < 0) throw std::invalid_argument("malaga_pdf_truncated: L must be >= 0");
  if (!(ia > 0.0)) return 0.0;
  return static_cast<double>(malaga_series_block(ia, p, 0, L, false));
}

double malaga_truncation_tail(double ia, const MalagaParams& p, int L) {
  if (L < 0) throw std::invalid_argument("malaga_truncation_tail: L must be >= 0");
  if (!(ia > 0.0)) return 0.0;
  return static_cast<double>(malaga_series_block(ia, p, L + 1, L + 1000, true));
}

double truncation_error_bound(double ia, const MalagaParams& p, int L) {
  if (!(ia > 0.0)) throw std::invalid_argument("truncation_error_bound: I_a must be positive");
  const double a = p.alpha;
  const double xi = p.xi();
  const double delta = a * xi;
  const double big_xi = 2.0 * std::pow(p.g * xi, p.beta) / (p.g * std::tgamma(a));
  // b_q(x, y) = delta^y I^{y-1} / Gamma(q - x + y + 1); c_q = b_q(alpha, n) - b_q(n, alpha).
  auto b = [&](int q, double x, double y) {
    const auto gm = lgamma_signed(q - x + y + 1.0);
    return gm.sign * std::exp(y * std::log(delta) + (y - 1.0) * std::log(ia) - gm.log_abs);
  };
  double s = 0.0;
  for (int n = 1; n <= p.beta; ++n) {
    const double omega_n = boost::math::binomial_coefficient<double>(p.beta - 1, n - 1) *
                           std::exp((1.0 - n) * std::log(static_cast<double>(p.beta)) - std::log(xi) -
                                    std::lgamma(static_cast<double>(n)) + (n - 1) * std::log(p.omega_prime / p.g));
    double cmax = 0.0;
    for (int q = L + 1; q <= L + 40; ++q) cmax = std::max(cmax, std::abs(b(q, a, n) - b(q, n, a)));
    s += std::abs(kPi * omega_n / (2.0 * std::sin(kPi * (a - n)))) * cmax;
  }
  return big_xi * std::exp(delta * ia) * s;
}

double malaga_cdf(double ia, const MalagaParams& p) {
  if (!(ia > 0.0)) return 0.0;
  if (std::isinf(ia)) return 1.0;
  const auto w = mixture_weights(p);
  const double delta = p.delta();
  double s = 0.0;
  for (int n = 1; n <= p.beta; ++n) {
    const double fn = (delta * ia <= 1.0) ? component_cdf_series(p.alpha, n, delta, ia)
                                          : 1.0 - component_ccdf_bessel(p.alpha, n, p.xi(), ia);
    s += w[n - 1] * fn;
  }
  return std::clamp(s, 0.0, 1.0);
}

double malaga_ccdf(double ia, const MalagaParams& p) {
  if (!(ia > 0.0)) return 1.0;
  if (std::isinf(ia)) return 0.0;
  const double delta = p.delta();
  if (delta * ia <= 1.0) return 1.0 - malaga_cdf(ia, p);
  const auto w = mixture_weights(p);
  double s = 0.0;
  for (int n = 1; n <= p.beta; ++n) s += w[n - 1] * component_ccdf_bessel(p.alpha, n, p.xi(), ia);
  return std::clamp(s, 0.0, 1.0);
}

double malaga_moment(const MalagaParams& p, double q) {
  if (!(p.alpha + q > 0.0) || !(1.0 + q > 0.0)) throw std::domain_error("malaga_moment: order out of range");
  const auto w = mixture_weights(p);
  double s = 0.0;
  for (int n = 1; n <= p.beta; ++n)
    s += w[n - 1] * std::exp(std::lgamma(p.alpha + q) + std::lgamma(n + q) - std::lgamma(p.alpha) -
                             std::lgamma(static_cast<double>(n)) - q * std::log(p.delta()));
  return s;
}

// ---------------------------------------------------------------------------
// Lattice power series

void LatticeSeries::add(SeriesKey k, long double c) {
  if (c == 0.0L) return;
  terms_[k] += c;
}

double LatticeSeries::exponent(const SeriesKey& k) const {
  return k.k_int + k.k_alpha * alpha_ + (k.k_xi == 0 ? 0.0 : k.k_xi * xi2_);
}

long double LatticeSeries::exponent_l(const SeriesKey& k) const {
  return k.k_int + k.k_alpha * static_cast<long double>(alpha_) +
         (k.k_xi == 0 ? 0.0L : k.k_xi * static_cast<long double>(xi2_));
}

LatticeSeries LatticeSeries::multiply(const LatticeSeries& o) const {
  LatticeSeries out(alpha_, xi2_);
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : o.terms_)
      out.add({ka.k_int + kb.k_int, ka.k_alpha + kb.k_alpha, ka.k_xi + kb.k_xi}, ca * cb);
  return out;
}

LatticeSeries LatticeSeries::power(int m) const {
  if (m < 0) throw std::invalid_argument("LatticeSeries::power: negative exponent");
  LatticeSeries out(alpha_, xi2_);
  out.add({0, 0, 0}, 1.0L);
  for (int i = 0; i < m; ++i) out = out.multiply(*this);
  return out;
}

LatticeSeries::Eval LatticeSeries::evaluate(double z) const {
  Eval e;
  if (!(z > 0.0)) return e;
  // Exponents and powers stay in long double: a relative error eps in an
  // exponent becomes eps*e*ln(z) in the term, which the cancellation amplifies.
  const long double lz = std::log(static_cast<long double>(z));
  long double v = 0.0L, d = 0.0L, a = 0.0L;
  for (const auto& [k, c] : terms_) {
    const long double ex = exponent_l(k);
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

LatticeSeries composite_cdf_series(const MalagaParams& p, const PointingModel& pm, int L) {
  // Coefficients are built in long double: the series is summed with heavy
  // cancellation at large z, so their relative accuracy sets the usable range.
  using ld = long double;
  const ld a = p.alpha;
  const ld log_delta = std::log(static_cast<ld>(p.delta()));
  const auto w = mixture_weights(p);
  double xi2 = pm.enabled ? pm.xi2 : 0.0;
  if (pm.enabled) {
    // Keep xi2 off the integers and off alpha + integers (poles of xi2/(xi2 - e)).
    bool nudged = false;
    xi2 = nudge_off_integer(xi2, nudged);
    const double shifted = nudge_off_integer(xi2 - p.alpha, nudged) + p.alpha;
    xi2 = shifted;
    if (nudged) spdlog::warn("pointing coefficient {} nudged to {} for the series form", pm.xi2, xi2);
  }
  auto lgamma_l = [](ld x, ld& sign) {
    sign = specfun::gamma_sign(static_cast<double>(x));
    return std::lgamma(x);
  };
  LatticeSeries s(p.alpha, xi2);
  auto weight = [&](ld e) -> ld { return pm.enabled ? xi2 / (xi2 - e) : 1.0L; };
  const ld pi = std::numbers::pi_v<ld>;
  for (int n = 1; n <= p.beta; ++n) {
    const ld pref = static_cast<ld>(w[n - 1]) * 2.0L / (std::tgamma(a) * std::tgamma(static_cast<ld>(n))) * pi /
                    (2.0L * std::sin(pi * (a - n)));
    for (int q = 0; q <= L; ++q) {
      ld s1, s2;
      const ld g1 = lgamma_l(q - a + n + 1.0L, s1);
      const ld g2 = lgamma_l(q + a - n + 1.0L, s2);
      const ld lq = std::lgamma(q + 1.0L);
      const ld c1 = pref * s1 * std::exp((q + n) * log_delta - g1 - lq) / (q + n);
      const ld c2 = -pref * s2 * std::exp((q + a) * log_delta - g2 - lq) / (q + a);
      s.add({q + n, 0, 0}, c1 * weight(q + n));
      s.add({q, 1, 0}, c2 * weight(q + a));
    }
  }
  if (pm.enabled) {
    // Coefficient of z^{xi2}: E[I_a^{-xi2}] continued analytically in the order.
    ld e_star = 0.0L;
    for (int n = 1; n <= p.beta; ++n) {
      ld sa, sn;
      const ld ga = lgamma_l(a - xi2, sa);
      const ld gn = lgamma_l(n - static_cast<ld>(xi2), sn);
      e_star += w[n - 1] * sa * sn *
                std::exp(ga + gn - std::lgamma(a) - std::lgamma(static_cast<ld>(n)) + xi2 * log_delta);
    }
    s.add({0, 0, 1}, e_star);
  }
  return s;
}

std::pair<std::vector<double>, std::vector<double>> expand_cdf_coefficients(const MalagaParams& p, int apertures,
                                                                            int i, int L) {
  if (apertures < 1 || i < 0 || i > apertures) throw std::invalid_argument("expand_cdf_coefficients: need 0 <= i <= M");
  const double a = p.alpha;
  const double delta = p.delta();
  const int top = L + p.beta;
  std::vector<long double> s1(top + 1, 0.0L), s2(L + 1, 0.0L);
  for (int n = 1; n <= p.beta; ++n) {
    const double an = malaga_constant_an(p, n);
    const double k = an * kPi / (2.0 * std::sin(kPi * (a - n)));
    for (int q = 0; q <= L; ++q) {
      // rho_q(x, y) = delta^{q - (x - y)/2} / (Gamma(q - x + y + 1) q!)
      const auto g1 = lgamma_signed(q - a + n + 1.0);
      const auto g2 = lgamma_signed(q - n + a + 1.0);
      const double lq = std::lgamma(q + 1.0);
      const double r1 = g1.sign * std::exp((q - 0.5 * (a - n)) * std::log(delta) - g1.log_abs - lq);
      const double r2 = g2.sign * std::exp((q - 0.5 * (n - a)) * std::log(delta) - g2.log_abs - lq);
      s1[q + n] += k * r1 / (q + n);
      s2[q] += k * r2 / (q + a);
    }
  }
  auto power = [](const std::vector<long double>& base, int m) {
    std::vector<long double> out{1.0L};
    for (int e = 0; e < m; ++e) {
      std::vector<long double> next(out.size() + base.size() - 1, 0.0L);
      for (std::size_t x = 0; x < out.size(); ++x)
        for (std::size_t y = 0; y < base.size(); ++y) next[x + y] += out[x] * base[y];
      out.swap(next);
    }
    return out;
  };
  const auto c1 = power(s1, apertures - i);
  const auto c2 = power(s2, i);
  return {std::vector<double>(c1.begin(), c1.end()), std::vector<double>(c2.begin(), c2.end())};
}

}  // namespace rfso::fso
