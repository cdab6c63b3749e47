#include "rfso/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "rfso/specfun.hpp"

namespace rfso::analytic {
namespace {

using boost::math::quadrature::exp_sinh;
using boost::math::quadrature::tanh_sinh;
using specfun::FoxHSpec;
using specfun::GammaFactor;
using specfun::InnerFactor;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-10;

exp_sinh<double>& half_line() {
  thread_local exp_sinh<double> q;
  return q;
}

tanh_sinh<double>& finite_interval() {
  thread_local tanh_sinh<double> q;
  return q;
}

template <class F>
double interval_integral(const F& f, double lo, double hi) {
  double err = 0.0, l1 = 0.0;
  std::size_t levels = 0;
  return finite_interval().integrate(f, lo, hi, kQuadTol, &err, &l1, &levels);
}

double half_line_integral(const std::function<double(double)>& f) {
  double err = 0.0, l1 = 0.0;
  std::size_t levels = 0;
  return half_line().integrate(f, 0.0, kInf, kQuadTol, &err, &l1, &levels);
}

// a = Gamma (1 + rho2) / (1 - rho2 Gamma); +inf at or above the ceiling.
double threshold_scale(const ScenarioPoint& s, double thr) {
  const double den = 1.0 - s.rho2 * thr;
  if (!(den > 0.0)) return kInf;
  return thr * (1.0 + s.rho2) / den;
}

double gamma_pdf(double x, double shape, double scale) {
  if (!(x > 0.0)) return 0.0;
  return std::exp((shape - 1.0) * std::log(x / scale) - x / scale - std::lgamma(shape)) / scale;
}

// P(SINDR < thr | gamma_R = gr) or its complement. The first hop is integrated as
// gamma_SR = g0 + t; beyond g0 the event depends on y only through h0 / t.
double conditional_outage(const ScenarioPoint& s, double a, double gr, bool complement) {
  const double K = s.fading.shape();
  const double theta = s.fading.scale();
  const double g0 = a * s.rho1 * (1.0 + gr);
  const double h0 = a * s.c_const() * (1.0 + gr);
  const auto& ch = *s.channel;
  // Integrate in units of theta (t = theta x) so the nodes track the bulk of
  // the first-hop density at any average SNR.
  auto integrand = [&](double x) {
    const double t = theta * x;
    const double w = theta * gamma_pdf(g0 + t, K, theta);
    if (w == 0.0) return 0.0;
    const double fy = complement ? ch.snr_ccdf(h0 / t, s.mu, s.r, s.apertures)
                                 : ch.snr_cdf(h0 / t, s.mu, s.r, s.apertures);
    return fy * w;
  };
  const double inner = half_line_integral(integrand);
  if (complement) return inner;
  return boost::math::gamma_p(K, g0 / theta) + inner;
}

double average_over_interference(const ScenarioPoint& s, const std::function<double(double)>& cond) {
  if (!s.interference.active()) return cond(0.0);
  const double m = s.interference.m_r;
  const double beta = s.interference.beta_r;
  auto f = [&](double x) {
    const double w = std::exp((m - 1.0) * std::log(x) - x - std::lgamma(m));
    if (w == 0.0) return 0.0;
    return w * cond(x / beta);
  };
  return half_line_integral(f);
}

// Per-component moment of y: E[y^{-s}] for component n, written as Gamma factors
// in the linear form off + sum_i coeff_i s_i (coefficients are for Gamma(. - r s)).
void push_moment_factors(std::vector<GammaFactor>& out, double alpha, int n, const fso::PointingModel& pm,
                         std::complex<double> off, const std::vector<double>& coeff) {
  out.push_back({alpha + off, coeff, true});
  out.push_back({static_cast<double>(n) + off, coeff, true});
  if (pm.enabled) {
    out.push_back({pm.xi2 + off, coeff, true});
    out.push_back({pm.xi2 + 1.0 + off, coeff, false});
  }
}

double component_log_norm(double alpha, int n, const fso::PointingModel& pm) {
  double l = -std::lgamma(alpha) - std::lgamma(static_cast<double>(n));
  if (pm.enabled) l += std::log(pm.xi2);
  return l;
}

specfun::ContourSpec closed_form_contour() {
  specfun::ContourSpec c;
  c.rel_tol = 1e-12;
  c.max_doublings = 12;
  return c;
}

Value unavailable(const std::string& why) {
  Value v;
  v.note = why;
  return v;
}

// Sum over mixture components of the star integral shared by the BER and capacity
// closed forms. hub_factors carry everything that depends on u alone.
double star_integral(const ScenarioPoint& s, const std::vector<InnerFactor>& hub_factors, double x_u) {
  const auto& ch = *s.channel;
  const auto& mp = ch.malaga();
  const auto& pm = ch.pointing();
  const auto weights = fso::mixture_weights(mp);
  const double r = s.r;
  const bool interf = s.interference.active();
  const double C = s.c_const();
  const double scale_r = std::pow(mp.delta() * ch.norm(), r);
  const double x_v = s.rho1 * s.mu / (C * scale_r);

  double total = 0.0;
  for (int n = 1; n <= mp.beta; ++n) {
    FoxHSpec spec;
    spec.dim = interf ? 3 : 2;
    spec.inner.assign(spec.dim, {});
    spec.inner[0] = hub_factors;
    // u is variable 0, v is 1, w is 2.
    std::vector<double> cu_v(spec.dim, 0.0);
    cu_v[0] = 1.0;
    cu_v[1] = -1.0;
    spec.outer.push_back({0.0, cu_v, true});  // Gamma(u - v)
    spec.inner[0].push_back({0.0, 1.0, false});  // 1/Gamma(u), normalizes the v integral
    spec.inner[1].push_back({0.0, 1.0, true});   // Gamma(v)
    // E[y^v] per component as Gamma(alpha + r v) Gamma(n + r v) [xi2 Gamma(xi2 + r v)/Gamma(xi2 + 1 + r v)].
    spec.inner[1].push_back({mp.alpha, r, true});
    spec.inner[1].push_back({static_cast<double>(n), r, true});
    if (pm.enabled) {
      spec.inner[1].push_back({pm.xi2, r, true});
      spec.inner[1].push_back({pm.xi2 + 1.0, r, false});
    }
    std::vector<double> args{x_u, x_v};
    if (interf) {
      std::vector<double> cu_w(3, 0.0);
      cu_w[0] = 1.0;
      cu_w[2] = -1.0;
      spec.outer.push_back({0.0, cu_w, true});     // Gamma(u - w)
      spec.inner[0].push_back({0.0, 1.0, false});  // 1/Gamma(u)
      spec.inner[2].push_back({0.0, 1.0, true});   // Gamma(w)
      spec.inner[2].push_back({s.interference.m_r, -1.0, true});
      args.push_back(s.interference.beta_r);
    }
    double lnorm = component_log_norm(mp.alpha, n, pm);
    if (interf) lnorm -= std::lgamma(s.interference.m_r);
    total += weights[n - 1] * std::exp(lnorm) * specfun::fox_h(spec, args, closed_form_contour());
  }
  return total;
}

}  // namespace

double outage_quadrature(const ScenarioPoint& s, double threshold) {
  const double a = threshold_scale(s, threshold);
  if (std::isinf(a)) return 1.0;
  if (!(a > 0.0)) return 0.0;
  return average_over_interference(s, [&](double gr) { return conditional_outage(s, a, gr, false); });
}

double outage_complement_quadrature(const ScenarioPoint& s, double threshold) {
  const double a = threshold_scale(s, threshold);
  if (std::isinf(a)) return 0.0;
  if (!(a > 0.0)) return 1.0;
  return average_over_interference(s, [&](double gr) { return conditional_outage(s, a, gr, true); });
}

double ber_quadrature(const ScenarioPoint& s) {
  const auto& md = s.modulation;
  const double tau = md.tau;
  const double cap = s.rho2 > 0.0 ? 1.0 / s.rho2 : kInf;
  double acc = 0.0;
  for (double q : md.q) {
    auto f = [&](double g) {
      if (!(g > 0.0)) return 0.0;
      const double w = std::exp((tau - 1.0) * std::log(g) - q * g);
      if (w == 0.0) return 0.0;
      return w * outage_quadrature(s, g);
    };
    double body = std::isinf(cap) ? half_line_integral(f) : interval_integral(f, 0.0, cap);
    double tail = std::isinf(cap) ? 0.0 : boost::math::tgamma(tau, q * cap);
    acc += std::pow(q, tau) * (body + tail);
  }
  return md.delta / (2.0 * std::tgamma(tau)) * acc;
}

double capacity_quadrature(const ScenarioPoint& s) {
  const double vp = s.varpi;
  auto f = [&](double g) {
    if (!(g > 0.0)) return 0.0;
    return vp * outage_complement_quadrature(s, g) / (1.0 + vp * g);
  };
  if (s.rho2 > 0.0) return interval_integral(f, 0.0, 1.0 / s.rho2);
  return half_line_integral(f);
}

Value outage_closed_form(const ScenarioPoint& s, double threshold) {
  if (s.apertures != 1) return unavailable("closed form needs a single aperture");
  const double a = threshold_scale(s, threshold);
  if (std::isinf(a)) return {1.0, true, "threshold at or above 1/rho2"};
  if (!(a > 0.0)) return {0.0, true, ""};

  const int K = s.fading.shape();
  const double theta = s.fading.scale();
  const double lam1 = a * s.rho1 / theta;
  const double lam2 = a * s.c_const() / theta;
  const auto& ch = *s.channel;
  const auto& mp = ch.malaga();
  const auto& pm = ch.pointing();
  const auto weights = fso::mixture_weights(mp);
  const double r = s.r;
  const double Z = lam2 / s.mu * std::pow(mp.delta() * ch.norm(), r);
  const bool interf = s.interference.active();
  const double mR = interf ? s.interference.m_r : 0.0;
  const double B = interf ? s.interference.beta_r + lam1 : 1.0;

  double sum = 0.0;
  for (int n = 0; n < K; ++n) {
    for (int k = 0; k <= n; ++k) {
      const int nu = n - k;
      const int m_hi = interf ? n : 0;
      for (int m = 0; m <= m_hi; ++m) {
        double lc = std::log(boost::math::binomial_coefficient<double>(n, k)) - std::lgamma(n + 1.0) - lam1 +
                    (k > 0 ? k * std::log(lam1) : 0.0) + nu * std::log(Z);
        const double p = mR + m;
        if (interf) {
          lc += std::log(boost::math::binomial_coefficient<double>(n, m)) + mR * std::log(s.interference.beta_r) -
                std::lgamma(mR) - p * std::log(B);
        }
        for (int c = 1; c <= mp.beta; ++c) {
          FoxHSpec spec;
          std::vector<double> args;
          // Gamma(. - r s) with s = nu - v - w.
          if (interf) {
            spec.dim = 2;
            spec.inner = {{{0.0, 1.0, true}, {p, -1.0, true}}, {{0.0, 1.0, true}}};
            push_moment_factors(spec.outer, mp.alpha, c, pm, -r * nu, {r, r});
            args = {B / Z, 1.0 / Z};
          } else {
            spec.dim = 1;
            spec.inner = {{{0.0, 1.0, true}}};
            push_moment_factors(spec.outer, mp.alpha, c, pm, -r * nu, {r});
            args = {1.0 / Z};
          }
          const double I = specfun::fox_h(spec, args, closed_form_contour());
          sum += weights[c - 1] * std::exp(lc + component_log_norm(mp.alpha, c, pm)) * I;
        }
      }
    }
  }
  return {1.0 - sum, true, ""};
}

Value ber_closed_form(const ScenarioPoint& s) {
  if (s.apertures != 1) return unavailable("closed form needs a single aperture");
  if (s.rho2 != 0.0) return unavailable("closed form needs rho2 = 0");
  const auto& md = s.modulation;
  const double K = s.fading.shape();
  const double theta = s.fading.scale();
  double acc = 0.0;
  for (double q : md.q) {
    // Gamma(K+u)/Gamma(K) * Gamma(u)/Gamma(1+u) * Gamma(tau-u) q^{u-tau}
    std::vector<InnerFactor> hub{{K, 1.0, true}, {0.0, 1.0, true}, {1.0, 1.0, false}, {md.tau, -1.0, true}};
    const double x_u = q * theta / s.rho1;
    acc += star_integral(s, hub, x_u);  // the q^tau prefactor cancels q^{-tau}
  }
  acc /= std::tgamma(K);
  const double value = md.v() * md.delta / 2.0 - md.delta / (2.0 * std::tgamma(md.tau)) * acc;
  return {value, true, ""};
}

Value capacity_closed_form(const ScenarioPoint& s) {
  if (s.apertures != 1) return unavailable("closed form needs a single aperture");
  if (s.rho2 != 0.0) return unavailable("closed form needs rho2 = 0");
  const double K = s.fading.shape();
  const double theta = s.fading.scale();
  // Gamma(K+u)/Gamma(K) * Gamma(u)/Gamma(1+u) * Gamma(u) Gamma(1-u) varpi^u
  std::vector<InnerFactor> hub{{K, 1.0, true}, {0.0, 1.0, true}, {1.0, 1.0, false}, {0.0, 1.0, true}, {1.0, -1.0, true}};
  const double x_u = s.varpi * theta / s.rho1;
  const double value = star_integral(s, hub, x_u) / std::tgamma(K);
  return {value, true, ""};
}

double outage_cdf(const ScenarioPoint& s, double threshold) {
  if (s.rho2 > 0.0 && threshold * s.rho2 >= 1.0) return 1.0;
  const Value v = outage_closed_form(s, threshold);
  if (v.available && std::isfinite(v.value)) return v.value;
  return outage_quadrature(s, threshold);
}

Floor outage_floor(const Scenario& sc, double threshold) {
  Floor f;
  if (sc.at(100.0).ideal_hardware()) return f;
  const double snr_db[3] = {100.0, 110.0, 120.0};
  for (int i = 0; i < 3; ++i) {
    ScenarioPoint p = sc.at(snr_db[i]);
    p.threshold = threshold;
    f.samples[i] = outage_quadrature(p, threshold);
  }
  const double d = f.samples[0] + f.samples[2] - 2.0 * f.samples[1];
  const double num = f.samples[0] * f.samples[2] - f.samples[1] * f.samples[1];
  f.value = (std::abs(d) > 1e-300 && std::isfinite(num / d)) ? num / d : f.samples[2];
  if (f.value < 0.0) f.value = f.samples[2];
  return f;
}

Diversity diversity_gain(const ScenarioPoint& s) {
  Diversity d;
  if (!s.ideal_hardware()) {
    d.impaired = true;
    return d;
  }
  const auto& ch = *s.channel;
  double m = std::min(ch.malaga().alpha, static_cast<double>(ch.malaga().beta));
  if (ch.pointing().enabled) m = std::min(m, ch.pointing().xi2);
  d.gain = std::min(static_cast<double>(s.fading.shape()), s.apertures * m / s.r);
  return d;
}

double diversity_slope(const Scenario& sc, double lo_db, double hi_db, double threshold) {
  const double p_lo = outage_quadrature(sc.at(lo_db), threshold);
  const double p_hi = outage_quadrature(sc.at(hi_db), threshold);
  return -(std::log10(p_hi) - std::log10(p_lo)) / ((hi_db - lo_db) / 10.0);
}

double capacity_approx(const ScenarioPoint& s) {
  const double ey = s.mu * s.channel->mean_max_w_r(s.r, s.apertures);
  const double one_plus_r = 1.0 + s.interference.mean();
  const double num = s.fading.mean_snr * ey;
  const double den = s.rho2 * num + s.rho1 * (1.0 + s.rho2) * one_plus_r * ey +
                     (1.0 + s.rho2) * one_plus_r * s.c_const();
  return std::log(1.0 + s.varpi * num / den);
}

double jensen_j(const ScenarioPoint& s) {
  return s.fading.mean_snr * s.mean_inv_interf / (s.rho1 * (1.0 + s.rho2));
}

Value jensen_j_meijer(const ScenarioPoint& s) {
  if (!s.interference.active()) return {jensen_j(s), true, "no interference"};
  const double m = s.interference.m_r;
  const double beta = s.interference.beta_r;
  specfun::MeijerGSpec g;
  g.m = 1;
  g.n = 2;
  g.a = {2.0 - m, 1.0};
  g.b = {1.0};
  const double G = specfun::meijer_g(g, 1.0 / beta, closed_form_contour());
  const double value = s.fading.mean_snr * beta / (s.rho1 * (1.0 + s.rho2) * std::tgamma(m)) * G;
  return {value, true, ""};
}

double capacity_jensen_bound(const ScenarioPoint& s) {
  const double j = jensen_j(s);
  return std::log(1.0 + s.varpi * j / (s.rho2 * j + 1.0));
}

Ceilings capacity_ceilings(const ScenarioPoint& s) {
  Ceilings c;
  const double eps2 = s.bussgang.epsilon * s.bussgang.epsilon;
  if (eps2 > 0.0) {
    const double den = (1.0 + s.rho2) * s.iota / eps2 - 1.0;
    if (den > 0.0) {
      c.i_inf = std::log(1.0 + s.varpi / den);
      c.inf_unbounded = false;
    }
  }
  if (s.rho2 > 0.0) {
    c.i_max = std::log(1.0 + s.varpi / s.rho2);
    c.max_unbounded = false;
  }
  return c;
}

}  // namespace rfso::analytic
