#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "rfso/channel_fso.hpp"

using namespace rfso::fso;

namespace {
constexpr double kPi = std::numbers::pi;

MalagaParams caption() {
  auto p = MalagaParams::caption_set();
  p.validate();
  return p;
}

PointingModel pointing_with(double xi2) {
  PointingParams pp;
  pp.enabled = true;
  pp.xi2 = xi2;
  return pointing_model(pp);
}

void expect_rel(double got, double want, double tol) {
  EXPECT_LE(std::abs(got - want), tol * std::abs(want)) << "got " << got << " want " << want;
}
}  // namespace

TEST(Malaga, CaptionSetDerivedQuantities) {
  const auto p = caption();
  expect_rel(p.omega_prime, 4.89761410105536566, 1e-14);
  expect_rel(p.mean(), 4.89861410105536566, 1e-14);
  EXPECT_TRUE(p.g_override);
}

TEST(Malaga, PdfMatchesReference) {
  const auto p = caption();
  expect_rel(malaga_pdf(0.3, p), 0.163125136165332876, 1e-12);
  expect_rel(malaga_pdf(1.0, p), 0.191106488554048661, 1e-12);
  expect_rel(malaga_pdf(3.0, p), 0.121022691669214864, 1e-12);
}

TEST(Malaga, PdfIntegratesToOne) {
  const auto p = caption();
  boost::math::quadrature::exp_sinh<double> q;
  EXPECT_NEAR(q.integrate([&](double x) { return malaga_pdf(x, p); }, 1e-12), 1.0, 1e-6);
}

TEST(Malaga, CdfMatchesReference) {
  const auto p = caption();
  expect_rel(malaga_cdf(0.5, p), 0.0688301477704973083, 1e-11);
  expect_rel(malaga_cdf(2.0, p), 0.339868032833543699, 1e-11);
  EXPECT_NEAR(malaga_cdf(7.0, p) + malaga_ccdf(7.0, p), 1.0, 1e-14);
}

TEST(Malaga, MomentsMatchReference) {
  const auto p = caption();
  expect_rel(malaga_moment(p, 1.0), p.mean(), 1e-13);
  expect_rel(malaga_moment(p, 2.0), 53.1421607953024519, 1e-11);
  expect_rel(malaga_moment(p, -0.5), 0.700865281640561291, 1e-11);
  EXPECT_THROW(malaga_moment(p, -3.0), std::domain_error);
}

TEST(Malaga, IntegerAlphaIsNudgedOffTheInteger) {
  MalagaParams p;
  p.alpha = 3.0;
  p.validate();
  EXPECT_TRUE(p.alpha_nudged);
  EXPECT_NEAR(std::abs(p.alpha - 3.0), kIntegerGuard, 1e-12);
}

TEST(Malaga, GeneratorsAloneDeriveG) {
  const auto p = MalagaParams::from_generators(2.1, 2, {0.95, 0.596, 1.32, 0.0});
  expect_rel(p.g, 2.0 * 0.596 * 0.05, 1e-14);
  EXPECT_FALSE(p.g_override);
}

TEST(Truncation, ConvergesToExactAsOrderGrows) {
  const auto p = caption();
  double prev = INFINITY;
  for (int L : {2, 4, 8, 16}) {
    const double err = std::abs(malaga_truncation_tail(1.0, p, L));
    EXPECT_LT(err, prev) << "L=" << L;
    prev = err;
  }
  EXPECT_NEAR(malaga_pdf_truncated(1.0, p, 40), malaga_pdf(1.0, p), 1e-14);
}

TEST(Truncation, TailIsExactMinusTruncated) {
  const auto p = caption();
  for (double ia : {0.2, 1.0, 4.0})
    for (int L : {2, 6, 12})
      EXPECT_NEAR(malaga_pdf_truncated(ia, p, L) + malaga_truncation_tail(ia, p, L), malaga_pdf(ia, p), 1e-13);
}

TEST(Truncation, BoundDecreasesWithOrder) {
  const auto p = caption();
  EXPECT_LT(truncation_error_bound(1.0, p, 16), truncation_error_bound(1.0, p, 8));
  EXPECT_LT(truncation_error_bound(1.0, p, 8), truncation_error_bound(1.0, p, 4));
  EXPECT_LT(truncation_error_bound(1.0, p, 64), 1e-10 * truncation_error_bound(1.0, p, 1));
}

TEST(Truncation, ErrorNeverExceedsBound) {
  const auto p = caption();
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> u(1e-3, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double ia = u(eng);
    for (int L : {1, 3, 5, 10, 20})
      EXPECT_LE(std::abs(malaga_truncation_tail(ia, p, L)), truncation_error_bound(ia, p, L)) << "I=" << ia << " L=" << L;
  }
}

TEST(Pathloss, ClearAirReference) {
  expect_rel(fso_pathloss(0.05, 0.01, 1.0, 0.43), 7.11360721274640408e-5, 1e-12);
}

TEST(Pathloss, NoAttenuationIsGeometricSpreading) {
  expect_rel(fso_pathloss(0.05, 0.01, 2.0, 0.0), kPi * 0.05 * 0.05 / std::pow(0.01 * 2000.0, 2), 1e-14);
}

TEST(Pathloss, FogToClearRatioIsTheDecibelDifference) {
  const double fog = fso_pathloss(0.05, 0.01, 1.0, weather_preset("moderate_fog").fso_sigma_db_per_km);
  const double clear = fso_pathloss(0.05, 0.01, 1.0, weather_preset("clear_air").fso_sigma_db_per_km);
  expect_rel(fog / clear, std::pow(10.0, -(42.2 - 0.43) / 10.0), 1e-12);
}

TEST(Rytov, ClearAirReference) { expect_rel(rytov_variance(5e-14, 1550e-9, 1000.0), 0.995477192556351314, 1e-12); }

TEST(Pointing, GeometryMatchesReference) {
  PointingParams pp;
  pp.enabled = true;
  pp.aperture_radius_m = 0.05;
  pp.beam_waist_m = 2.5;
  pp.jitter_sigma_m = 0.3;
  const auto m = pointing_model(pp);
  expect_rel(m.a0, 7.99664995018337518e-4, 1e-12);
  expect_rel(m.w_zeq, 2.50052367554673513, 1e-12);
  expect_rel(m.xi2, 17.3683851443604274, 1e-12);
}

TEST(Pointing, DensityIsNormalized) {
  PointingParams pp;
  pp.enabled = true;
  pp.jitter_sigma_m = 2.0;
  const auto m = pointing_model(pp);
  boost::math::quadrature::tanh_sinh<double> q;
  EXPECT_NEAR(q.integrate([&](double x) { return pointing_pdf(x, m); }, 0.0, m.a0), 1.0, 1e-10);
  EXPECT_EQ(pointing_pdf(1.01 * m.a0, m), 0.0);
}

TEST(Pointing, VanishingJitterConcentratesAtA0) {
  PointingParams pp;
  pp.enabled = true;
  pp.jitter_sigma_m = 1e-3;
  const auto m = pointing_model(pp);
  // E[I_p] = A0 xi2 / (1 + xi2)
  EXPECT_GT(m.xi2 / (1.0 + m.xi2), 0.99);
}

TEST(Composite, PointingCdfMatchesReference) {
  const CompositeChannel ch(caption(), pointing_with(6.7));
  expect_rel(ch.cdf_w(0.5), 0.410970401433274251, 1e-9);
  expect_rel(ch.cdf_w(1.5), 0.795878381158313483, 1e-9);
}

TEST(Composite, NormalizedGainHasUnitMean) {
  for (double xi2 : {1.5, 6.7}) {
    const CompositeChannel ch(caption(), pointing_with(xi2));
    EXPECT_NEAR(ch.moment_w(1.0), 1.0, 1e-13);
  }
  const CompositeChannel plain(caption(), PointingModel{});
  EXPECT_NEAR(plain.moment_w(1.0), 1.0, 1e-13);
}

TEST(Composite, PdfIntegratesToCdf) {
  const CompositeChannel ch(caption(), pointing_with(3.3));
  boost::math::quadrature::tanh_sinh<double> q;
  EXPECT_NEAR(q.integrate([&](double w) { return ch.pdf_w(w); }, 0.2, 1.7), ch.cdf_w(1.7) - ch.cdf_w(0.2), 1e-8);
}

TEST(Composite, CdfAndCcdfAreComplementary) {
  const CompositeChannel ch(caption(), pointing_with(6.7));
  for (double w : {1e-4, 0.3, 1.0, 4.0, 20.0}) EXPECT_NEAR(ch.cdf_w(w) + ch.ccdf_w(w), 1.0, 1e-12);
}

TEST(SeriesSnr, CdfAtZeroIsZero) {
  const FsoSnrModel m{2, 1, 10.0, 30};
  EXPECT_EQ(fso_snr_cdf_series(0.0, m, caption(), PointingModel{}).value, 0.0);
}

TEST(SeriesSnr, SingleApertureMatchesChangeOfVariables) {
  // gamma = mu (I / E[I])^r with I Malaga, no pointing
  const auto p = caption();
  const double mu = 20.0;
  for (int r : {1, 2}) {
    const FsoSnrModel m{r, 1, mu, 30};
    for (double g : {0.5, 5.0, 40.0}) {
      const double ia = p.mean() * std::pow(g / mu, 1.0 / r);
      boost::math::quadrature::tanh_sinh<double> q;
      const double want = q.integrate([&](double x) { return malaga_pdf(x, p); }, 0.0, ia);
      EXPECT_NEAR(fso_snr_cdf_series(g, m, p, PointingModel{}).value, want, 1e-9) << "r=" << r << " g=" << g;
    }
  }
}

TEST(SeriesSnr, AgreesWithCompositeChannelForTwoApertures) {
  const auto p = caption();
  const auto pm = pointing_with(6.7);
  const CompositeChannel ch(p, pm);
  const FsoSnrSeries series({2, 2, 10.0, 30}, p, pm);
  for (double g : {0.01, 1.0, 30.0, 300.0, 3000.0}) {
    const auto v = series.cdf(g);
    EXPECT_NEAR(v.value, ch.snr_cdf(g, 10.0, 2, 2), 1e-8) << "g=" << g;
    const auto direct = fso_snr_cdf_series(g, {2, 2, 10.0, 30}, p, pm);
    EXPECT_NEAR(v.value, direct.value, 1e-12);
  }
}

TEST(SeriesSnr, PdfIntegratesToCdfDifference) {
  const auto p = caption();
  const auto pm = pointing_with(6.7);
  const FsoSnrSeries series({1, 2, 10.0, 30}, p, pm);
  boost::math::quadrature::tanh_sinh<double> q;
  const double a = 0.5, b = 12.0;
  const double area = q.integrate([&](double g) { return series.pdf(g).value; }, a, b);
  EXPECT_NEAR(area, series.cdf(b).value - series.cdf(a).value, 1e-6);
}

TEST(SeriesSnr, RejectsInvalidModel) {
  EXPECT_THROW(fso_snr_cdf_series(1.0, {3, 1, 10.0, 30}, caption(), PointingModel{}), std::invalid_argument);
  EXPECT_THROW(fso_snr_cdf_series(1.0, {2, 0, 10.0, 30}, caption(), PointingModel{}), std::invalid_argument);
}

TEST(CdfExpansion, FirstPowerIsTheSingleApertureSeries) {
  const auto p = caption();
  const auto [first, second] = expand_cdf_coefficients(p, 1, 0, 10);
  ASSERT_EQ(second.size(), 1u);
  EXPECT_EQ(second[0], 1.0);
  // reconstruct the integer-exponent part at x = 0.7 and compare with the alpha part from i = 1
  const auto [f1, s1] = expand_cdf_coefficients(p, 1, 1, 10);
  double x = 0.7, a = 0.0, b = 0.0;
  for (std::size_t j = 0; j < first.size(); ++j) a += first[j] * std::pow(x, j);
  for (std::size_t t = 0; t < s1.size(); ++t) b += s1[t] * std::pow(x, t);
  EXPECT_NEAR(malaga_constant_A(p) * (a - std::pow(x, p.alpha) * b), malaga_cdf(x, p), 1e-10);
}

TEST(CdfExpansion, SecondPowerIsTheSelfConvolution) {
  const auto p = caption();
  const auto [one, unused] = expand_cdf_coefficients(p, 1, 0, 12);
  const auto [two, unused2] = expand_cdf_coefficients(p, 2, 0, 12);
  ASSERT_EQ(two.size(), 2 * one.size() - 1);
  for (std::size_t k = 0; k < two.size(); ++k) {
    double c = 0.0;
    for (std::size_t i = 0; i < one.size(); ++i)
      if (k >= i && k - i < one.size()) c += one[i] * one[k - i];
    EXPECT_NEAR(two[k], c, 1e-12 * std::max(1.0, std::abs(c)));
  }
}

TEST(CdfExpansion, ReconstructedPowerMatchesDirectPower) {
  const auto p = caption();
  const int M = 2;
  for (double x : {0.1, 0.4, 0.9}) {
    double total = 0.0;
    for (int i = 0; i <= M; ++i) {
      const auto [c1, c2] = expand_cdf_coefficients(p, M, i, 40);
      double a = 0.0, b = 0.0;
      for (std::size_t j = 0; j < c1.size(); ++j) a += c1[j] * std::pow(x, j);
      for (std::size_t t = 0; t < c2.size(); ++t) b += c2[t] * std::pow(x, t);
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      total += sign * (i == 1 ? 2.0 : 1.0) * a * std::pow(x, i * p.alpha) * b;
    }
    EXPECT_NEAR(std::pow(malaga_constant_A(p), M) * total, std::pow(malaga_cdf(x, p), M), 1e-9) << "x=" << x;
  }
}
