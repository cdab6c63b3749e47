// Numerical Mellin-Barnes integration for Meijer-G and multivariate Fox-H.
//
// The integrand is a product of complex gamma factors and powers x_i^{s_i}.
// Each s_i runs along c_i + i t; the t-integral is done with the trapezoid
// rule, which converges geometrically for integrands analytic in a strip
// around the line. The strip half-width is the distance from the line to the
// nearest pole of a numerator gamma factor.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rfso/specfun.hpp"

namespace rfso::specfun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailNats = 36.0;  // e^-36 ~ 2e-16 of the peak
constexpr double kBox = 60.0;       // |c_i| bound for the automatic contour
constexpr int kMaxGrow = 6;

struct Factor {
  cplx offset;
  std::vector<double> coeff;
  bool numerator;
  std::vector<int> support;
};

bool is_pole(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// log Gamma(z)^{+-1}; 1/Gamma at a pole is zero, returned as -inf.
cplx log_factor(cplx z, bool numerator) {
  if (is_pole(z)) {
    if (numerator) throw EvaluationError("Mellin-Barnes: contour passes through a gamma pole");
    return {-kInf, 0.0};
  }
  const cplx l = ln_gamma(z);
  return numerator ? l : -l;
}

std::vector<Factor> flatten(const FoxHSpec& spec) {
  const int d = spec.dim;
  std::vector<Factor> out;
  for (const auto& g : spec.outer) {
    if (static_cast<int>(g.coeff.size()) != d)
      throw DomainError("fox_h: gamma-factor coefficient vector length differs from dimension");
    Factor f{g.offset, g.coeff, g.numerator, {}};
    for (int i = 0; i < d; ++i)
      if (g.coeff[i] != 0.0) f.support.push_back(i);
    out.push_back(std::move(f));
  }
  if (!spec.inner.empty() && static_cast<int>(spec.inner.size()) != d)
    throw DomainError("fox_h: inner factor lists must match dimension");
  for (int i = 0; i < static_cast<int>(spec.inner.size()); ++i) {
    for (const auto& g : spec.inner[i]) {
      std::vector<double> c(d, 0.0);
      c[i] = g.scale;
      Factor f{g.offset, c, g.numerator, {}};
      if (g.scale != 0.0) f.support.push_back(i);
      out.push_back(std::move(f));
    }
  }
  return out;
}

double coeff_norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

double real_arg(const Factor& f, const std::vector<double>& c) {
  double r = f.offset.real();
  for (std::size_t i = 0; i < c.size(); ++i) r += f.coeff[i] * c[i];
  return r;
}

// Largest m with Re(arg_j(c)) >= m*|a_j| over numerator factors, |c_i| <= kBox.
// Solved by enumerating vertices of the (c, m) polytope.
std::vector<double> max_margin_contour(const std::vector<Factor>& fs, int d, double& margin) {
  struct Row {
    Eigen::VectorXd a;  // over (c_0..c_{d-1}, m)
    double b;           // a . x >= b
  };
  std::vector<Row> rows;
  for (const auto& f : fs) {
    if (!f.numerator || f.support.empty()) continue;
    Row r{Eigen::VectorXd::Zero(d + 1), -f.offset.real()};
    for (int i = 0; i < d; ++i) r.a(i) = f.coeff[i];
    r.a(d) = -coeff_norm(f.coeff);
    rows.push_back(r);
  }
  for (int i = 0; i < d; ++i) {
    Row lo{Eigen::VectorXd::Zero(d + 1), -kBox};
    lo.a(i) = 1.0;
    Row hi{Eigen::VectorXd::Zero(d + 1), -kBox};
    hi.a(i) = -1.0;
    rows.push_back(lo);
    rows.push_back(hi);
  }
  // Bound m from above so the polytope is closed even without numerator factors.
  Row mcap{Eigen::VectorXd::Zero(d + 1), -kBox};
  mcap.a(d) = -1.0;
  rows.push_back(mcap);

  const int n = static_cast<int>(rows.size());
  const int k = d + 1;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  double best = -kInf;
  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(k);
  while (true) {
    Eigen::MatrixXd A(k, k);
    Eigen::VectorXd b(k);
    for (int r = 0; r < k; ++r) {
      A.row(r) = rows[idx[r]].a.transpose();
      b(r) = rows[idx[r]].b;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.isInvertible()) {
      Eigen::VectorXd x = lu.solve(b);
      bool feasible = true;
      for (const auto& row : rows)
        if (row.a.dot(x) < row.b - 1e-9) {
          feasible = false;
          break;
        }
      // Prefer the most central point among ties: smallest |c|.
      if (feasible && (x(d) > best + 1e-12 ||
                       (std::abs(x(d) - best) <= 1e-12 && x.head(d).norm() < best_x.head(d).norm()))) {
        best = x(d);
        best_x = x;
      }
    }
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int r = pos + 1; r < k; ++r) idx[r] = idx[r - 1] + 1;
  }
  margin = best;
  return {best_x.data(), best_x.data() + d};
}

struct Integrand {
  const std::vector<Factor>& fs;
  std::vector<double> logx;
  int d;

  cplx log_at(const std::vector<double>& c, const std::vector<double>& t) const {
    cplx acc = 0.0;
    for (int i = 0; i < d; ++i) acc += cplx(c[i], t[i]) * logx[i];
    for (const auto& f : fs) {
      cplx z = f.offset;
      for (int i : f.support) z += f.coeff[i] * cplx(c[i], t[i]);
      acc += log_factor(z, f.numerator);
    }
    return acc;
  }
};

// Minimize Re log f on the real axis, coordinate-wise, keeping a margin.
void refine_to_saddle(const Integrand& g, std::vector<double>& c, double keep) {
  const int d = g.d;
  const std::vector<double> zero(d, 0.0);
  auto value = [&](const std::vector<double>& cc) { return g.log_at(cc, zero).real(); };
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (int i = 0; i < d; ++i) {
      double lo = -kBox, hi = kBox;
      for (const auto& f : g.fs) {
        if (!f.numerator || f.coeff[i] == 0.0) continue;
        double rest = f.offset.real();
        for (int j = 0; j < d; ++j)
          if (j != i) rest += f.coeff[j] * c[j];
        const double bound = (keep * coeff_norm(f.coeff) - rest) / f.coeff[i];
        if (f.coeff[i] > 0) lo = std::max(lo, bound);
        else hi = std::min(hi, bound);
      }
      if (!(hi > lo)) continue;
      auto at = [&](double v) {
        std::vector<double> cc = c;
        cc[i] = v;
        return value(cc);
      };
      const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
      double a = lo, b = hi;
      double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      double f1 = at(x1), f2 = at(x2);
      for (int it = 0; it < 60 && b - a > 1e-6; ++it) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - gr * (b - a);
          f1 = at(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + gr * (b - a);
          f2 = at(x2);
        }
      }
      const double cand = 0.5 * (a + b);
      if (at(cand) <= value(c)) c[i] = cand;
    }
  }
}

// Move the line off any numerator pole that it crosses exactly.
bool on_pole(const std::vector<Factor>& fs, const std::vector<double>& c) {
  for (const auto& f : fs) {
    if (!f.numerator) continue;
    if (f.support.empty()) {
      if (is_pole(f.offset)) return true;
      continue;
    }
    if (f.offset.imag() != 0.0) continue;
    const double r = real_arg(f, c);
    if (r <= 1e-12 && std::abs(r - std::round(r)) < 1e-10) return true;
  }
  return false;
}

struct Grid {
  std::vector<double> h;
  std::vector<int> half;  // nodes k = -half..half per variable
};

struct SumResult {
  double value;
  double l1;
  double boundary_log;  // max log|f| on the outer faces
  double peak_log;
};

SumResult trapezoid(const Integrand& g, const std::vector<double>& c, const Grid& grid, bool real_symmetric) {
  const int d = g.d;
  std::vector<int> n(d);
  for (int i = 0; i < d; ++i) n[i] = 2 * grid.half[i] + 1;

  // Pre-tabulate one-variable pieces (including x^s) and two-variable pieces.
  std::vector<std::vector<cplx>> t1(d);
  for (int i = 0; i < d; ++i) {
    t1[i].resize(n[i]);
    for (int k = 0; k < n[i]; ++k) {
      const cplx s(c[i], (k - grid.half[i]) * grid.h[i]);
      t1[i][k] = s * g.logx[i];
    }
  }
  struct Pair {
    int i, j;
    std::vector<cplx> tab;
  };
  std::vector<Pair> pairs;
  std::vector<const Factor*> triple;
  cplx constant = 0.0;
  for (const auto& f : g.fs) {
    if (f.support.empty()) {
      constant += log_factor(f.offset, f.numerator);
    } else if (f.support.size() == 1) {
      const int i = f.support[0];
      for (int k = 0; k < n[i]; ++k) {
        const cplx s(c[i], (k - grid.half[i]) * grid.h[i]);
        t1[i][k] += log_factor(f.offset + f.coeff[i] * s, f.numerator);
      }
    } else if (f.support.size() == 2) {
      const int i = f.support[0], j = f.support[1];
      auto it = std::find_if(pairs.begin(), pairs.end(), [&](const Pair& p) { return p.i == i && p.j == j; });
      if (it == pairs.end()) {
        pairs.push_back({i, j, std::vector<cplx>(static_cast<std::size_t>(n[i]) * n[j], 0.0)});
        it = pairs.end() - 1;
      }
      for (int a = 0; a < n[i]; ++a) {
        const cplx si(c[i], (a - grid.half[i]) * grid.h[i]);
        for (int b = 0; b < n[j]; ++b) {
          const cplx sj(c[j], (b - grid.half[j]) * grid.h[j]);
          it->tab[static_cast<std::size_t>(a) * n[j] + b] +=
              log_factor(f.offset + f.coeff[i] * si + f.coeff[j] * sj, f.numerator);
        }
      }
    } else {
      triple.push_back(&f);
    }
  }

  // Three variables coupled only through a common hub: the sum over the two
  // leaves factorizes for each hub node, reducing the cost to O(n^2).
  int hub = -1;
  if (d == 3 && triple.empty()) {
    for (int u = 0; u < 3 && hub < 0; ++u) {
      bool ok = true;
      for (const auto& p : pairs)
        if (p.i != u && p.j != u) ok = false;
      if (ok) hub = u;
    }
  }
  if (hub >= 0 && (!real_symmetric || hub == 0)) {
    int leaves[2], li = 0;
    for (int i = 0; i < 3; ++i)
      if (i != hub) leaves[li++] = i;
    const Pair* link[2] = {nullptr, nullptr};
    for (const auto& p : pairs)
      for (int l = 0; l < 2; ++l)
        if (p.i == leaves[l] || p.j == leaves[l]) link[l] = &p;
    double peak = -kInf, boundary = -kInf;
    double sum = 0.0, l1 = 0.0;
    std::vector<cplx> row;
    const int start = real_symmetric ? grid.half[hub] : 0;
    for (int ku = start; ku < n[hub]; ++ku) {
      double mx[2], edge[2];
      cplx part[2];
      double abspart[2];
      for (int l = 0; l < 2; ++l) {
        const int a = leaves[l];
        row.assign(n[a], 0.0);
        for (int ka = 0; ka < n[a]; ++ka) {
          cplx v = t1[a][ka];
          if (link[l]) {
            const Pair& p = *link[l];
            v += (p.i == hub) ? p.tab[static_cast<std::size_t>(ku) * n[p.j] + ka]
                              : p.tab[static_cast<std::size_t>(ka) * n[p.j] + ku];
          }
          row[ka] = v;
        }
        mx[l] = -kInf;
        for (const auto& v : row) mx[l] = std::max(mx[l], v.real());
        edge[l] = std::max(row.front().real(), row.back().real());
        part[l] = 0.0;
        abspart[l] = 0.0;
        if (std::isfinite(mx[l]))
          for (const auto& v : row) {
            const cplx e = std::exp(v - mx[l]);
            part[l] += e;
            abspart[l] += std::abs(e);
          }
      }
      const cplx base = constant + t1[hub][ku];
      const double top = base.real() + mx[0] + mx[1];
      if (!std::isfinite(top)) continue;
      peak = std::max(peak, top);
      if (ku == 0 || ku == n[hub] - 1) boundary = std::max(boundary, top);
      boundary = std::max(boundary, base.real() + edge[0] + mx[1]);
      boundary = std::max(boundary, base.real() + mx[0] + edge[1]);
      const double w = (real_symmetric && ku != grid.half[hub]) ? 2.0 : 1.0;
      const cplx v = std::exp(cplx(top, base.imag())) * part[0] * part[1];
      sum += w * v.real();
      l1 += w * std::exp(top) * abspart[0] * abspart[1];
    }
    double scale = 1.0;
    for (int i = 0; i < d; ++i) scale *= grid.h[i] / (2.0 * std::numbers::pi);
    return {sum * scale, l1 * scale, boundary, peak};
  }

  double peak = -kInf;
  double boundary = -kInf;
  // Compensated accumulation.
  double sum = 0.0, comp = 0.0, l1 = 0.0;
  std::vector<int> k(d, 0);
  const int start0 = real_symmetric ? grid.half[0] : 0;
  k[0] = start0;
  for (int i = 1; i < d; ++i) k[i] = 0;
  while (true) {
    cplx lg = constant;
    for (int i = 0; i < d; ++i) lg += t1[i][k[i]];
    for (const auto& p : pairs) lg += p.tab[static_cast<std::size_t>(k[p.i]) * n[p.j] + k[p.j]];
    for (const Factor* f : triple) {
      cplx z = f->offset;
      for (int i : f->support) z += f->coeff[i] * cplx(c[i], (k[i] - grid.half[i]) * grid.h[i]);
      lg += log_factor(z, f->numerator);
    }
    if (std::isfinite(lg.real())) {
      peak = std::max(peak, lg.real());
      bool face = false;
      for (int i = 0; i < d; ++i)
        if (k[i] == 0 || k[i] == n[i] - 1) face = true;
      if (face) boundary = std::max(boundary, lg.real());
      const cplx v = std::exp(lg);
      double w = 1.0;
      if (real_symmetric && k[0] != grid.half[0]) w = 2.0;
      const double y = w * v.real() - comp;
      const double tsum = sum + y;
      comp = (tsum - sum) - y;
      sum = tsum;
      l1 += w * std::abs(v);
    }
    int pos = d - 1;
    while (pos >= 0) {
      if (++k[pos] < n[pos]) break;
      k[pos] = (pos == 0) ? start0 : 0;
      --pos;
    }
    if (pos < 0) break;
  }
  double scale = 1.0;
  for (int i = 0; i < d; ++i) scale *= grid.h[i] / (2.0 * std::numbers::pi);
  return {sum * scale, l1 * scale, boundary, peak};
}

}  // namespace

FoxHSpec to_fox_h(const MeijerGSpec& spec) {
  const int p = static_cast<int>(spec.a.size());
  const int q = static_cast<int>(spec.b.size());
  if (spec.m < 0 || spec.n < 0 || spec.m > q || spec.n > p) throw DomainError("meijer_g: require m <= q, n <= p");
  FoxHSpec h;
  h.dim = 1;
  h.inner.resize(1);
  auto& in = h.inner[0];
  for (int j = 0; j < q; ++j) {
    if (j < spec.m) in.push_back({spec.b[j], -1.0, true});
    else in.push_back({1.0 - spec.b[j], 1.0, false});
  }
  for (int j = 0; j < p; ++j) {
    if (j < spec.n) in.push_back({1.0 - spec.a[j], 1.0, true});
    else in.push_back({spec.a[j], -1.0, false});
  }
  return h;
}

MellinResult fox_h_detailed(const FoxHSpec& spec, const std::vector<double>& args, const ContourSpec& contour) {
  const int d = spec.dim;
  if (d < 1) throw DomainError("fox_h: dimension must be >= 1");
  if (d > 3) throw UnsupportedDimension("fox_h: dimension > 3 is not supported");
  if (static_cast<int>(args.size()) != d) throw DomainError("fox_h: argument count differs from dimension");
  for (double x : args)
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("fox_h: arguments must be positive and finite");
  if (contour.nodes < 1) throw DomainError("fox_h: node count must be positive");

  const std::vector<Factor> fs = flatten(spec);
  Integrand g{fs, {}, d};
  for (double x : args) g.logx.push_back(std::log(x));

  bool real_symmetric = true;
  for (const auto& f : fs)
    if (f.offset.imag() != 0.0) real_symmetric = false;

  std::vector<double> c;
  double margin = 0.0;
  if (contour.offset.empty()) {
    c = max_margin_contour(fs, d, margin);
    if (!(margin > 0.0)) {
      std::ostringstream os;
      os << "fox_h: numerator pole families cannot be separated (best margin " << margin << ")";
      throw EvaluationError(os.str());
    }
    const double keep = std::min(0.25, 0.5 * margin);
    refine_to_saddle(g, c, keep);
  } else {
    if (static_cast<int>(contour.offset.size()) != d) throw DomainError("fox_h: contour offset count differs from dimension");
    c = contour.offset;
  }
  for (int attempt = 0; on_pole(fs, c); ++attempt) {
    if (attempt >= 3) throw EvaluationError("fox_h: contour lies on a pole after shifting");
    for (double& v : c) v += 0.0731;
  }

  // Strip half-width per variable.
  std::vector<double> strip(d, 1.0);
  for (int i = 0; i < d; ++i) {
    double w = kInf;
    for (const auto& f : fs) {
      if (!f.numerator || f.coeff[i] == 0.0) continue;
      const double r = real_arg(f, c);
      // distance to the nearest pole in the s_i-direction
      const double frac = r - std::floor(r);
      const double dist = (r > 0.0) ? r : std::min(frac, 1.0 - frac);
      w = std::min(w, dist / std::abs(f.coeff[i]));
    }
    strip[i] = std::isfinite(w) ? std::clamp(w, 0.02, 2.0) : 1.0;
  }

  // Initial truncation: walk each axis until the integrand falls kTailNats below t = 0.
  const std::vector<double> zero(d, 0.0);
  const double center = g.log_at(c, zero).real();
  std::vector<double> T(d, contour.height > 0.0 ? contour.height : 0.0);
  if (contour.height <= 0.0) {
    for (int i = 0; i < d; ++i) {
      double t = 1.0;
      for (;; t *= 1.25) {
        std::vector<double> tp(d, 0.0), tm(d, 0.0);
        tp[i] = t;
        tm[i] = -t;
        const double lp = g.log_at(c, tp).real();
        const double lm = real_symmetric ? lp : g.log_at(c, tm).real();
        if (std::max(lp, lm) < center - kTailNats) break;
        if (t > 4000.0) {
          std::ostringstream os;
          os << "fox_h: integrand does not decay along variable " << i << " (offset " << c[i] << ")";
          throw EvaluationError(os.str());
        }
      }
      T[i] = t;
    }
  }

  MellinResult res;
  res.offset = c;
  for (int grow = 0;; ++grow) {
    Grid grid;
    grid.h.resize(d);
    grid.half.resize(d);
    for (int i = 0; i < d; ++i) {
      double h = std::min(0.9 * strip[i], 2.0 * T[i] / contour.nodes);
      grid.h[i] = h;
      grid.half[i] = static_cast<int>(std::ceil(T[i] / h));
    }
    SumResult prev = trapezoid(g, c, grid, real_symmetric);
    bool grew = false;
    for (int level = 1; level <= contour.max_doublings; ++level) {
      if (prev.boundary_log > prev.peak_log - kTailNats + 4.0) {
        if (grow >= kMaxGrow) {
          std::ostringstream os;
          os << "fox_h: truncation height cap reached; boundary/peak log ratio "
             << prev.boundary_log - prev.peak_log;
          throw EvaluationError(os.str());
        }
        for (double& t : T) t *= 1.5;
        grew = true;
        break;
      }
      for (int i = 0; i < d; ++i) {
        grid.h[i] *= 0.5;
        grid.half[i] *= 2;
      }
      const SumResult cur = trapezoid(g, c, grid, real_symmetric);
      const double diff = std::abs(cur.value - prev.value);
      const double floor_abs = 64.0 * std::numeric_limits<double>::epsilon() * cur.l1;
      if (diff <= contour.rel_tol * std::abs(cur.value) || diff <= floor_abs) {
        res.value = cur.value;
        res.previous = prev.value;
        res.levels = level;
        res.nodes = 2 * grid.half[0] + 1;
        res.height = T;
        return res;
      }
      prev = cur;
    }
    if (!grew) {
      std::ostringstream os;
      os << "fox_h: no convergence after " << contour.max_doublings << " doublings; last value " << prev.value
         << ", offset";
      for (double v : c) os << ' ' << v;
      throw EvaluationError(os.str());
    }
  }
}

double fox_h(const FoxHSpec& spec, const std::vector<double>& args, const ContourSpec& contour) {
  return fox_h_detailed(spec, args, contour).value;
}

double meijer_g(const MeijerGSpec& spec, double x, const ContourSpec& contour) {
  return fox_h(to_fox_h(spec), {x}, contour);
}

}  // namespace rfso::specfun
