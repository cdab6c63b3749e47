#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "rfso/channel_rf.hpp"

using namespace rfso::rf;

TEST(RfBudget, DefaultBudgetPowerGain) {
  // 88 dBi of antenna gain, free-space loss at 28 GHz over 100 m, 1.51 dB oxygen absorption
  EXPECT_NEAR(rf_power_gain_db(RfLinkBudget{}), -14.9009438487277581, 1e-10);
}

TEST(RfBudget, RainLowersGainLinearlyInDistance) {
  const RfLinkBudget clear = rf_preset("clear_air");
  const RfLinkBudget rain = rf_preset("moderate_rain");
  EXPECT_NEAR(rf_power_gain_db(clear) - rf_power_gain_db(rain), 0.56, 1e-12);
}

TEST(RfBudget, ZeroDistanceRejected) {
  RfLinkBudget b;
  b.distance_km = 0.0;
  EXPECT_THROW(rf_power_gain_db(b), std::invalid_argument);
}

TEST(RfBudget, NoiseVariance) {
  RfLinkBudget b;
  EXPECT_NEAR(rf_noise_variance_dbm(b), -109.705810742857073, 1e-10);
  b.bandwidth_mhz = 1.0;
  b.noise_figure_db = 0.0;
  EXPECT_DOUBLE_EQ(rf_noise_variance_dbm(b), b.n0_dbm_per_mhz);
  RfLinkBudget wide;
  wide.bandwidth_mhz *= 2.0;
  EXPECT_NEAR(rf_noise_variance_dbm(wide) - rf_noise_variance_dbm(RfLinkBudget{}), 10.0 * std::log10(2.0), 1e-12);
}

TEST(RfBudget, MeanSnrFromBudget) {
  RfLinkBudget b;
  const double snr_db = lin_to_db(rf_mean_snr(b, 10.0, 2));
  EXPECT_NEAR(snr_db, 10.0 + rf_power_gain_db(b) - rf_noise_variance_dbm(b), 1e-10);
}

TEST(NakagamiSum, CdfLimits) {
  const RfFading f{2, 2, 3.0};
  EXPECT_EQ(gamma_sr_cdf(0.0, f), 0.0);
  EXPECT_EQ(gamma_sr_cdf(INFINITY, f), 1.0);
}

TEST(NakagamiSum, SingleRayleighBranchIsExponential) {
  const RfFading f{1, 1, 4.0};
  for (double g : {0.1, 2.0, 15.0}) EXPECT_NEAR(gamma_sr_cdf(g, f), 1.0 - std::exp(-g / 4.0), 1e-15);
}

TEST(NakagamiSum, CdfMatchesReference) {
  EXPECT_NEAR(gamma_sr_cdf(1.0, RfFading{2, 2, 1.0}), 0.566529879633291066, 1e-14);
}

TEST(NakagamiSum, PdfIntegratesToCdf) {
  const RfFading f{2, 3, 5.0};
  boost::math::quadrature::tanh_sinh<double> q;
  const double v = q.integrate([&](double g) { return gamma_sr_pdf(g, f); }, 0.0, 7.0);
  EXPECT_NEAR(v, gamma_sr_cdf(7.0, f), 1e-12);
}

TEST(NakagamiSum, RejectsInvalidFading) {
  EXPECT_THROW(gamma_sr_cdf(1.0, RfFading{0, 1, 1.0}), std::invalid_argument);
  EXPECT_THROW(gamma_sr_cdf(1.0, RfFading{1, 1, 0.0}), std::invalid_argument);
}

TEST(Interference, NoInterferersGivesUnitMean) {
  EXPECT_EQ(mean_inverse_one_plus(InterferenceModel{}), 1.0);
  EXPECT_FALSE(InterferenceModel::identical(0, 1.0, 1.0).active());
}

TEST(Interference, ExponentialCaseMatchesExpIntegral) {
  InterferenceModel m;
  m.count = 1;
  m.m_r = 1.0;
  m.beta_r = 1.0;
  EXPECT_NEAR(mean_inverse_one_plus(m), 0.596347362323194074, 1e-12);
}

TEST(Interference, IdenticalInterferersAddShapes) {
  const auto m = InterferenceModel::identical(2, 1.0, 1.0);
  EXPECT_EQ(m.m_r, 2.0);
  EXPECT_EQ(m.beta_r, 1.0);
  EXPECT_NEAR(m.mean(), 2.0, 1e-15);
  EXPECT_NEAR(mean_inverse_one_plus(m), 0.403652637676805926, 1e-12);
}

TEST(Interference, DensityIntegratesToOne) {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> shape(0.3, 6.0), rate(0.05, 5.0);
  boost::math::quadrature::exp_sinh<double> q;
  for (int i = 0; i < 10; ++i) {
    InterferenceModel m;
    m.count = 1;
    m.m_r = shape(eng);
    m.beta_r = rate(eng);
    const double v = q.integrate([&](double g) { return interference_pdf(g, m); }, 1e-14);
    EXPECT_NEAR(v, 1.0, 1e-9) << "m_R=" << m.m_r << " beta_R=" << m.beta_r;
  }
}

TEST(Units, DecibelRoundTrip) {
  for (double db : {-30.0, 0.0, 17.3}) EXPECT_NEAR(lin_to_db(db_to_lin(db)), db, 1e-12);
}
