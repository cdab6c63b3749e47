#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rfso::fso {

/// Minimum distance of alpha (and of the pointing coefficient in series work)
/// from the integers; closer values are nudged to the edge of the band.
inline constexpr double kIntegerGuard = 1e-3;

struct MalagaGenerators {
  double rho = 0.0;    // fraction of scatter power coupled to the LOS term
  double b0 = 0.0;     // half the average scatter power
  double omega = 0.0;  // LOS power
  double phase = 0.0;  // phi_A - phi_B
};

struct MalagaParams {
  double alpha = 2.1;
  int beta = 2;
  double g = 0.001;
  double omega_prime = 1.0;
  std::optional<MalagaGenerators> generators;
  /// True when g was supplied explicitly and differs from 2*b0*(1-rho).
  bool g_override = false;
  /// True when alpha was moved off an integer.
  bool alpha_nudged = false;

  double xi() const { return beta / (g * beta + omega_prime); }
  double delta() const { return alpha * xi(); }
  double mean() const { return g + omega_prime; }

  /// g = 2*b0*(1-rho), Omega' = Omega + 2*b0*rho + 2*sqrt(2*b0*rho*Omega)*cos(phase).
  static MalagaParams from_generators(double alpha, int beta, const MalagaGenerators& gen);
  /// Generators fix Omega'; g is taken as given (the figure-caption parameter set does this).
  static MalagaParams from_generators_with_g(double alpha, int beta, const MalagaGenerators& gen, double g);
  /// rho=0.95, b0=0.596, Omega=1.32, g=0.001, alpha=2.1, beta=2, phase 0.
  static MalagaParams caption_set();
  /// Validates and applies the integer guard band to alpha; throws on invalid input.
  void validate();
};

/// Omega' implied by the generator fields.
double omega_prime_from(const MalagaGenerators& gen);

/// Per-component weights pi_n (n = 1..beta) of the gamma-product mixture form of the pdf.
std::vector<double> mixture_weights(const MalagaParams& p);
double malaga_constant_A(const MalagaParams& p);
double malaga_constant_an(const MalagaParams& p, int n);

double malaga_pdf(double ia, const MalagaParams& p);
double malaga_pdf_truncated(double ia, const MalagaParams& p, int L);
/// Exact minus truncated density, summed directly from the discarded terms so that
/// it stays accurate far below the double round-off level of the difference.
double malaga_truncation_tail(double ia, const MalagaParams& p, int L);
double truncation_error_bound(double ia, const MalagaParams& p, int L);
double malaga_cdf(double ia, const MalagaParams& p);
double malaga_ccdf(double ia, const MalagaParams& p);
/// E[I_a^q], q > -min(alpha, 1).
double malaga_moment(const MalagaParams& p, double q);

struct PointingParams {
  bool enabled = false;
  double aperture_radius_m = 0.05;
  double beam_waist_m = 10.0;  // at the receiver
  double jitter_sigma_m = 0.0;
  /// Supplying xi2 directly bypasses the geometric derivation.
  std::optional<double> xi2;
};

struct PointingModel {
  bool enabled = false;
  double a0 = 1.0;
  double w_zeq = 0.0;
  double xi2 = 0.0;  // +inf when disabled
};

PointingModel pointing_model(const PointingParams& p);
double pointing_pdf(double ip, const PointingModel& m);
double rytov_variance(double cn2, double wavelength_m, double distance_m);
double fso_pathloss(double aperture_radius_m, double theta_rad, double distance_km, double sigma_db_per_km);

struct WeatherPreset {
  std::string name;
  double fso_sigma_db_per_km;
  double rf_rain_db_per_km;
  double cn2;
};
WeatherPreset weather_preset(const std::string& name);

/// Normalized composite gain W = I_a * I_p / E[I_a * I_p] and its exact distribution.
class CompositeChannel {
 public:
  CompositeChannel(MalagaParams malaga, PointingModel pointing);

  const MalagaParams& malaga() const { return malaga_; }
  const PointingModel& pointing() const { return pointing_; }
  /// E[I_a * U] where U = I_p / A0.
  double norm() const { return norm_; }

  double cdf_w(double w) const;
  double ccdf_w(double w) const;
  double pdf_w(double w) const;
  /// E[W^q].
  double moment_w(double q) const;

  /// SNR = mu * max_m W_m^r with M i.i.d. apertures.
  double snr_cdf(double gamma, double mu, int r, int apertures) const;
  double snr_ccdf(double gamma, double mu, int r, int apertures) const;
  /// E[(max_m W_m)^r].
  double mean_max_w_r(int r, int apertures) const;

 private:
  double cdf_z(double z) const;  // Z = I_a * U, unnormalized
  double ccdf_z(double z) const;
  double cdf_z_direct(double z) const;
  double ccdf_z_direct(double z) const;
  struct Table;
  MalagaParams malaga_;
  PointingModel pointing_;
  double norm_ = 1.0;
  std::shared_ptr<const Table> table_;  // log-CDF interpolant built at construction
};

/// Exponent k_int + k_alpha*alpha + k_xi*xi2 of a power-series term.
struct SeriesKey {
  int k_int = 0;
  int k_alpha = 0;
  int k_xi = 0;
  auto operator<=>(const SeriesKey&) const = default;
};

/// Generalized power series sum_k c_k z^{e(k)} on the (int, alpha, xi2) exponent lattice.
class LatticeSeries {
 public:
  LatticeSeries() = default;
  LatticeSeries(double alpha, double xi2) : alpha_(alpha), xi2_(xi2) {}

  void add(SeriesKey k, long double c);
  LatticeSeries multiply(const LatticeSeries& o) const;
  LatticeSeries power(int m) const;
  double exponent(const SeriesKey& k) const;
  long double exponent_l(const SeriesKey& k) const;

  struct Eval {
    double value = 0.0;
    double derivative = 0.0;   // d/dz
    double abs_sum = 0.0;      // sum |term|, for conditioning
  };
  Eval evaluate(double z) const;
  const std::map<SeriesKey, long double>& terms() const { return terms_; }

 private:
  double alpha_ = 0.0;
  double xi2_ = 0.0;
  std::map<SeriesKey, long double> terms_;
};

/// Series CDF of Z = I_a*U (or I_a alone without pointing), truncated at order L.
LatticeSeries composite_cdf_series(const MalagaParams& p, const PointingModel& pm, int L);

/// Coefficients of the powers of irradiance in the (M-i)-th power of the integer-exponent
/// part and the i-th power of the alpha-shifted part of the single-aperture series CDF.
/// first[j] multiplies x^j; second[t] multiplies x^t (the x^{i*alpha} factor is separate).
/// With M = 1 the CDF is A * (first(x) - x^alpha * second(x)), A = malaga_constant_A.
std::pair<std::vector<double>, std::vector<double>> expand_cdf_coefficients(const MalagaParams& p, int apertures,
                                                                            int i, int L);

struct FsoSnrModel {
  int r = 2;
  int apertures = 1;
  double mu = 1.0;  // average electrical SNR
  int L = 30;
};

struct SeriesValue {
  double value = 0.0;
  int L_used = 0;
  bool ill_conditioned = false;  // sum of |terms| exceeded 1e12 times the value
};

/// Series form of the SNR CDF/PDF with automatic escalation of L.
SeriesValue fso_snr_cdf_series(double gamma, const FsoSnrModel& m, const MalagaParams& p, const PointingModel& pm);
SeriesValue fso_snr_pdf_series(double gamma, const FsoSnrModel& m, const MalagaParams& p, const PointingModel& pm);

/// Same values as fso_snr_cdf_series / fso_snr_pdf_series, with the coefficient sets for
/// every escalation level built once. For evaluating many points of one model.
class FsoSnrSeries {
 public:
  FsoSnrSeries(const FsoSnrModel& m, const MalagaParams& p, const PointingModel& pm);
  SeriesValue cdf(double gamma) const;
  SeriesValue pdf(double gamma) const;

 private:
  struct Level {
    int L = 0;
    double z_max = 0.0;  // largest z at which the truncation bound is below the target
    std::vector<std::pair<long double, long double>> terms;  // (exponent, coefficient)
  };
  const Level& level_for(double z) const;
  FsoSnrModel model_;
  double norm_ = 1.0;
  std::vector<Level> levels_;
};

}  // namespace rfso::fso
