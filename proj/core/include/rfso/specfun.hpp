#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfso::specfun {

using cplx = std::complex<double>;

/// Raised when an argument falls outside the domain of a special function.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Raised when a contour integral fails to converge; what() carries diagnostics.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedDimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Gamma family. The complex ln_gamma is not on the principal branch in general;
// only exp(ln_gamma) and Re(ln_gamma) are meaningful.
cplx ln_gamma(cplx z);
double ln_gamma(double x);  // log|Gamma(x)|
double gamma_sign(double x);

/// Gamma(a, x) for real a of any sign (a <= 0 requires x > 0).
double upper_incomplete_gamma(double a, double x);
/// Regularized lower incomplete gamma P(a, x), a > 0.
double regularized_lower_gamma(double a, double x);
/// Regularized upper incomplete gamma Q(a, x), a > 0.
double regularized_upper_gamma(double a, double x);

/// Exponential integral Ei(x) for x < 0.
double exp_integral_ei(double x);
double erfc(double x);
double erf(double x);
/// Modified Bessel function of the second kind, any real order, x > 0.
double bessel_k(double nu, double x);
/// log K_nu(x), stable for large x.
double log_bessel_k(double nu, double x);

struct ContourSpec {
  /// Real part of the integration line per variable; empty selects automatically.
  std::vector<double> offset;
  /// Initial truncation height T (|Im s| <= T); 0 selects automatically.
  double height = 0.0;
  /// Initial node count per variable.
  int nodes = 64;
  double rel_tol = 1e-8;
  int max_doublings = 10;
  enum class Rule { trapezoid } rule = Rule::trapezoid;
};

/// Meijer G^{m,n}_{p,q}(x | a; b) with p = a.size(), q = b.size().
struct MeijerGSpec {
  int m = 0;
  int n = 0;
  std::vector<cplx> a;
  std::vector<cplx> b;
};

/// Gamma(offset + sum_i coeff[i] * s_i) raised to +1 (numerator) or -1 (denominator).
struct GammaFactor {
  cplx offset;
  std::vector<double> coeff;
  bool numerator = true;
};

/// Gamma(offset + scale * s_i) acting on a single variable.
struct InnerFactor {
  cplx offset;
  double scale = 1.0;
  bool numerator = true;
};

/// Multivariate Mellin-Barnes integrand
///   prod(outer) * prod_i prod(inner[i]) * prod_i x_i^{s_i}
/// integrated over s_i on vertical lines and divided by (2*pi*i)^dim.
struct FoxHSpec {
  int dim = 1;
  std::vector<GammaFactor> outer;
  std::vector<std::vector<InnerFactor>> inner;
};

struct MellinResult {
  double value = 0.0;
  double previous = 0.0;  // estimate at the coarser level
  int levels = 0;
  int nodes = 0;          // nodes per variable at the accepted level
  std::vector<double> offset;
  std::vector<double> height;
};

double meijer_g(const MeijerGSpec& spec, double x, const ContourSpec& contour = {});
double fox_h(const FoxHSpec& spec, const std::vector<double>& args, const ContourSpec& contour = {});
MellinResult fox_h_detailed(const FoxHSpec& spec, const std::vector<double>& args,
                            const ContourSpec& contour = {});

/// Translate a Meijer-G spec into the equivalent one-dimensional Fox-H spec.
FoxHSpec to_fox_h(const MeijerGSpec& spec);

}  // namespace rfso::specfun
