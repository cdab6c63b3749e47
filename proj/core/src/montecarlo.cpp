#include "rfso/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <thread>

#include "rfso/sindr.hpp"

namespace rfso::mc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Pairwise sum in a fixed tree order.
long double pairwise(const long double* v, std::size_t n) {
  if (n == 0) return 0.0L;
  if (n <= 8) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise(v, h) + pairwise(v + h, n - h);
}

struct Moments {
  long double sum = 0.0L;
  long double sumsq = 0.0L;
};

EstimateWithCi mean_estimate(const std::vector<Moments>& parts, std::uint64_t n) {
  std::vector<long double> s(parts.size()), q(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    s[i] = parts[i].sum;
    q[i] = parts[i].sumsq;
  }
  const long double sum = pairwise(s.data(), s.size());
  const long double sumsq = pairwise(q.data(), q.size());
  EstimateWithCi e;
  e.trials = n;
  e.value = static_cast<double>(sum / n);
  const long double var = n > 1 ? std::max(0.0L, (sumsq - sum * sum / n) / (n - 1)) : 0.0L;
  e.ci95 = 1.96 * std::sqrt(static_cast<double>(var) / n);
  return e;
}

// Drawn once per trial: the three link SNRs.
struct TrialDraw {
  double gamma_sr;
  double gamma_r;
  double gamma_rd;
};

class TrialSampler {
 public:
  explicit TrialSampler(const ScenarioPoint& s)
      : s_(s),
        sr_(s.fading.shape(), s.fading.scale()),
        ir_(s.interference.active() ? s.interference.m_r : 1.0,
            s.interference.active() ? 1.0 / s.interference.beta_r : 1.0) {}

  TrialDraw draw(Engine& e) {
    TrialDraw t{};
    t.gamma_sr = sr_(e);
    t.gamma_r = s_.interference.active() ? ir_(e) : 0.0;
    double wmax = 0.0;
    for (int m = 0; m < s_.apertures; ++m) {
      double w = draw_malaga(e, s_.channel->malaga());
      if (s_.channel->pointing().enabled) w *= draw_pointing_fraction(e, s_.channel->pointing().xi2);
      wmax = std::max(wmax, w / s_.channel->norm());
    }
    t.gamma_rd = s_.mu * std::pow(wmax, s_.r);
    return t;
  }

  double sindr(const TrialDraw& t) const {
    LinkState ls;
    ls.gamma_sr = t.gamma_sr;
    ls.gamma_r = t.gamma_r;
    ls.gamma_rd = t.gamma_rd;
    ls.rho1 = s_.rho1;
    ls.rho2 = s_.rho2;
    ls.mean_eff_sinr = s_.mean_eff_sinr;
    return end_to_end_sindr(ls);
  }

 private:
  const ScenarioPoint& s_;
  std::gamma_distribution<double> sr_;
  std::gamma_distribution<double> ir_;
};

template <class F>
EstimateWithCi timed(F&& f, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  EstimateWithCi e = f();
  e.seed = seed;
  e.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return e;
}

template <class PerTrial>
EstimateWithCi mean_over_trials(const ScenarioPoint& s, std::uint64_t n, const RngPolicy& policy, PerTrial&& g) {
  std::vector<Moments> parts(chunk_count(n, policy));
  for_each_chunk(n, policy, [&](Engine& e, std::uint64_t c, std::uint64_t, std::uint64_t count) {
    TrialSampler ts(s);
    Moments m;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double v = g(ts.sindr(ts.draw(e)));
      m.sum += v;
      m.sumsq += static_cast<long double>(v) * v;
    }
    parts[c] = m;
  });
  return mean_estimate(parts, n);
}

}  // namespace

Engine chunk_engine(std::uint64_t seed, std::uint64_t chunk_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(seed)), static_cast<std::uint32_t>(splitmix64(seed) >> 32),
                    static_cast<std::uint32_t>(splitmix64(seed ^ splitmix64(chunk_index + 1))),
                    static_cast<std::uint32_t>(chunk_index), static_cast<std::uint32_t>(chunk_index >> 32)};
  return Engine(seq);
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

std::uint64_t chunk_count(std::uint64_t n, const RngPolicy& policy) {
  if (policy.chunk == 0) throw std::invalid_argument("RngPolicy: chunk size must be positive");
  return (n + policy.chunk - 1) / policy.chunk;
}

void for_each_chunk(std::uint64_t n, const RngPolicy& policy,
                    const std::function<void(Engine&, std::uint64_t, std::uint64_t, std::uint64_t)>& body) {
  const std::uint64_t chunks = chunk_count(n, policy);
  const int workers = static_cast<int>(std::min<std::uint64_t>(resolve_workers(policy.workers), chunks));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks || failed.load()) return;
      const std::uint64_t first = c * policy.chunk;
      const std::uint64_t count = std::min(policy.chunk, n - first);
      Engine e = chunk_engine(policy.seed, c);
      try {
        body(e, c, first, count);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

double draw_malaga(Engine& e, const fso::MalagaParams& p) {
  // Large-scale Gamma(alpha, 1/alpha) times a shadowed-Rician small-scale
  // intensity: LOS power Omega' with Gamma(beta, 1/beta) fluctuation plus
  // circular Gaussian scatter of power g.
  std::gamma_distribution<double> large(p.alpha, 1.0 / p.alpha);
  std::gamma_distribution<double> shadow(static_cast<double>(p.beta), 1.0 / p.beta);
  std::normal_distribution<double> scatter(0.0, std::sqrt(p.g / 2.0));
  const double x = large(e);
  const double los = std::sqrt(shadow(e) * p.omega_prime);
  const double re = los + scatter(e);
  const double im = scatter(e);
  return x * (re * re + im * im);
}

double draw_pointing_fraction(Engine& e, double xi2) {
  // Rayleigh radial displacement R (unit jitter) through the Gaussian beam:
  // I_p / A0 = exp(-2 R^2 / w_zeq^2) = exp(-R^2 / (2 xi2)).
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r2 = -2.0 * std::log1p(-u(e));
  return std::exp(-r2 / (2.0 * xi2));
}

std::vector<double> sample_gamma_sr(const rf::RfFading& f, std::uint64_t n, const RngPolicy& policy) {
  std::vector<double> out(n);
  for_each_chunk(n, policy, [&](Engine& e, std::uint64_t, std::uint64_t first, std::uint64_t count) {
    std::gamma_distribution<double> g(f.shape(), f.scale());
    for (std::uint64_t i = 0; i < count; ++i) out[first + i] = g(e);
  });
  return out;
}

std::vector<double> sample_interference(const rf::InterferenceModel& m, std::uint64_t n, const RngPolicy& policy) {
  std::vector<double> out(n, 0.0);
  if (!m.active()) return out;
  for_each_chunk(n, policy, [&](Engine& e, std::uint64_t, std::uint64_t first, std::uint64_t count) {
    std::gamma_distribution<double> g(m.m_r, 1.0 / m.beta_r);
    for (std::uint64_t i = 0; i < count; ++i) out[first + i] = g(e);
  });
  return out;
}

std::vector<double> sample_malaga(const fso::MalagaParams& p, std::uint64_t n, const RngPolicy& policy) {
  std::vector<double> out(n);
  for_each_chunk(n, policy, [&](Engine& e, std::uint64_t, std::uint64_t first, std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) out[first + i] = draw_malaga(e, p);
  });
  return out;
}

std::vector<double> sample_composite(const fso::CompositeChannel& ch, std::uint64_t n, const RngPolicy& policy) {
  std::vector<double> out(n);
  for_each_chunk(n, policy, [&](Engine& e, std::uint64_t, std::uint64_t first, std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) {
      double w = draw_malaga(e, ch.malaga());
      if (ch.pointing().enabled) w *= draw_pointing_fraction(e, ch.pointing().xi2);
      out[first + i] = w / ch.norm();
    }
  });
  return out;
}

std::vector<double> sample_fso_snr(const fso::CompositeChannel& ch, double mu, int r, int apertures, std::uint64_t n,
                                   const RngPolicy& policy) {
  if (apertures < 1) throw std::invalid_argument("sample_fso_snr: aperture count must be >= 1");
  std::vector<double> out(n);
  for_each_chunk(n, policy, [&](Engine& e, std::uint64_t, std::uint64_t first, std::uint64_t count) {
    for (std::uint64_t i = 0; i < count; ++i) {
      double wmax = 0.0;
      for (int m = 0; m < apertures; ++m) {
        double w = draw_malaga(e, ch.malaga());
        if (ch.pointing().enabled) w *= draw_pointing_fraction(e, ch.pointing().xi2);
        wmax = std::max(wmax, w / ch.norm());
      }
      out[first + i] = mu * std::pow(wmax, r);
    }
  });
  return out;
}

EstimateWithCi wilson(std::uint64_t hits, std::uint64_t n) {
  EstimateWithCi e;
  e.trials = n;
  if (n == 0) return e;
  const double z = 1.96;
  const double p = static_cast<double>(hits) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  // The point estimate stays the sample proportion; the half-width is widened
  // so that [p - h, p + h] covers the Wilson interval.
  e.value = p;
  e.ci95 = std::max(centre + half - p, p - (centre - half));
  return e;
}

EstimateWithCi estimate_outage(const ScenarioPoint& s, std::uint64_t n, const RngPolicy& policy) {
  return timed(
      [&] {
        std::vector<std::uint64_t> hits(chunk_count(n, policy), 0);
        for_each_chunk(n, policy, [&](Engine& e, std::uint64_t c, std::uint64_t, std::uint64_t count) {
          TrialSampler ts(s);
          std::uint64_t h = 0;
          for (std::uint64_t i = 0; i < count; ++i) h += ts.sindr(ts.draw(e)) < s.threshold ? 1 : 0;
          hits[c] = h;
        });
        std::uint64_t total = 0;
        for (auto h : hits) total += h;
        return wilson(total, n);
      },
      policy.seed);
}

EstimateWithCi estimate_ber(const ScenarioPoint& s, std::uint64_t n, const RngPolicy& policy) {
  if (s.modulation.imdd != (s.r == 2)) throw std::invalid_argument("estimate_ber: modulation/detection mismatch");
  return timed([&] { return mean_over_trials(s, n, policy, [&](double g) { return s.modulation.conditional_ber(g); }); },
               policy.seed);
}

EstimateWithCi estimate_capacity(const ScenarioPoint& s, std::uint64_t n, const RngPolicy& policy) {
  return timed([&] { return mean_over_trials(s, n, policy, [&](double g) { return std::log1p(s.varpi * g); }); },
               policy.seed);
}

BussgangEstimate estimate_bussgang(const imp::HpaModel& m, std::uint64_t n, const RngPolicy& policy) {
  // Pass 1: epsilon = E[Re(psi x*)] / E[|x|^2] with a ratio-estimator error.
  struct Part {
    long double a = 0, b = 0, aa = 0, bb = 0, ab = 0;
  };
  std::vector<Part> parts(chunk_count(n, policy));
  const double sd = std::sqrt(m.varrho2 / 2.0);
  for_each_chunk(n, policy, [&](Engine& e, std::uint64_t c, std::uint64_t, std::uint64_t count) {
    std::normal_distribution<double> nd(0.0, sd);
    Part p;
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::complex<double> x(nd(e), nd(e));
      const auto y = imp::hpa_transfer(x, m);
      const double a = std::real(y * std::conj(x));
      const double b = std::norm(x);
      p.a += a;
      p.b += b;
      p.aa += static_cast<long double>(a) * a;
      p.bb += static_cast<long double>(b) * b;
      p.ab += static_cast<long double>(a) * b;
    }
    parts[c] = p;
  });
  auto reduce = [&](auto field) {
    std::vector<long double> v(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) v[i] = parts[i].*field;
    return pairwise(v.data(), v.size());
  };
  const long double sa = reduce(&Part::a), sb = reduce(&Part::b);
  const long double saa = reduce(&Part::aa), sbb = reduce(&Part::bb), sab = reduce(&Part::ab);
  BussgangEstimate out;
  const double eps = static_cast<double>(sa / sb);
  out.epsilon = eps;
  const long double ma = sa / n, mb = sb / n;
  const long double var_res = (saa - 2.0L * eps * sab + static_cast<long double>(eps) * eps * sbb) / n -
                              (ma - eps * mb) * (ma - eps * mb);
  out.epsilon_se = std::sqrt(static_cast<double>(std::max(0.0L, var_res)) / n) / static_cast<double>(mb);

  // Pass 2: residual power with the same draws.
  std::vector<Moments> dparts(parts.size());
  for_each_chunk(n, policy, [&](Engine& e, std::uint64_t c, std::uint64_t, std::uint64_t count) {
    std::normal_distribution<double> nd(0.0, sd);
    Moments mm;
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::complex<double> x(nd(e), nd(e));
      const double d = std::norm(imp::hpa_transfer(x, m) - eps * x);
      mm.sum += d;
      mm.sumsq += static_cast<long double>(d) * d;
    }
    dparts[c] = mm;
  });
  const auto d = mean_estimate(dparts, n);
  out.sigma_d2 = d.value;
  out.sigma_d2_se = d.ci95 / 1.96;
  return out;
}

double ks_distance(std::vector<double>& samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

}  // namespace rfso::mc
