#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "rfso/impairments.hpp"

using namespace rfso::imp;

namespace {

HpaModel hpa(HpaKind k, double ibo_db) {
  HpaModel m;
  m.kind = k;
  m.ibo_db = ibo_db;
  return m;
}

struct BussgangRef {
  HpaKind kind;
  double ibo_db;
  double epsilon;
  double sigma_d2;
  double iota;
};

// Reference values from an independent mpmath evaluation of the defining integrals
// (E[phi* A(phi)] / varrho2 and E[|A(phi)|^2] for a unit-power circular Gaussian drive).
const BussgangRef kRefs[] = {
    {HpaKind::sel, 0.0, 0.771523351468888667, 0.0368722769667713665, 0.632120558828557678},
    {HpaKind::sel, 4.0, 0.954001596742995667, 0.00876587662749239429, 0.918884923215677716},
    {HpaKind::twta, 3.0, 0.554166708224018500, 0.0282869171112778464, 0.335387657615122300},
    {HpaKind::twta, 4.0, 0.603975071234500568, 0.0260086871983854281, 0.390794573871105464},
    {HpaKind::twta, 8.0, 0.778467215057194360, 0.0132989570520454126, 0.619310161970949506},
};

}  // namespace

TEST(Bussgang, MatchesIntegralReference) {
  for (const auto& r : kRefs) {
    const auto b = bussgang_params(hpa(r.kind, r.ibo_db));
    EXPECT_NEAR(b.epsilon, r.epsilon, 1e-12 * r.epsilon) << to_string(r.kind) << " " << r.ibo_db;
    EXPECT_NEAR(b.sigma_d2, r.sigma_d2, 1e-10 * r.sigma_d2) << to_string(r.kind) << " " << r.ibo_db;
    EXPECT_NEAR(clipping_factor(hpa(r.kind, r.ibo_db)), r.iota, 1e-12 * r.iota);
  }
}

TEST(Bussgang, DistortionIsClippedPowerMinusLinearPart) {
  for (const auto& r : kRefs) {
    const auto m = hpa(r.kind, r.ibo_db);
    const auto b = bussgang_params(m);
    EXPECT_NEAR(b.sigma_d2, clipping_factor(m) - b.epsilon * b.epsilon, 1e-13);
  }
}

TEST(Bussgang, ScalesWithDrivePower) {
  auto m = hpa(HpaKind::twta, 4.0);
  const auto b1 = bussgang_params(m);
  m.varrho2 = 3.7;
  const auto b2 = bussgang_params(m);
  EXPECT_NEAR(b2.epsilon, b1.epsilon, 1e-13);
  EXPECT_NEAR(b2.sigma_d2, 3.7 * b1.sigma_d2, 1e-12);
}

TEST(Bussgang, LinearLimitForLargeBackoff) {
  for (HpaKind k : {HpaKind::sel, HpaKind::twta}) {
    const auto b = bussgang_params(hpa(k, std::numeric_limits<double>::infinity()));
    EXPECT_EQ(b.epsilon, 1.0);
    EXPECT_EQ(b.sigma_d2, 0.0);
  }
  // SEL approaches the identity; the TWTA gain approaches 1 as well since A^2 r/(A^2 + r^2) -> r.
  EXPECT_NEAR(bussgang_params(hpa(HpaKind::sel, 30.0)).epsilon, 1.0, 1e-12);
  EXPECT_NEAR(bussgang_params(hpa(HpaKind::twta, 40.0)).epsilon, 1.0, 2e-3);
  EXPECT_GT(bussgang_params(hpa(HpaKind::twta, 40.0)).sigma_d2, 0.0);
}

TEST(Bussgang, GainIncreasesWithBackoff) {
  for (HpaKind k : {HpaKind::sel, HpaKind::twta}) {
    double prev = 0.0;
    for (double ibo = -4.0; ibo <= 14.0; ibo += 1.0) {
      const double e = bussgang_params(hpa(k, ibo)).epsilon;
      EXPECT_GT(e, prev) << to_string(k) << " " << ibo;
      prev = e;
    }
  }
}

TEST(Bussgang, NoAmplifierIsLinear) {
  const auto b = bussgang_params(HpaModel{});
  EXPECT_EQ(b.epsilon, 1.0);
  EXPECT_EQ(b.sigma_d2, 0.0);
  EXPECT_EQ(clipping_factor(HpaModel{}), 1.0);
}

TEST(Bussgang, PrintedBranchDiffersOnlyAwayFromUnitDrive) {
  // At unit drive power the SEL variants coincide; at other powers they differ.
  auto m = hpa(HpaKind::sel, 2.0);
  EXPECT_NEAR(bussgang_params(m, BussgangBranch::printed).epsilon, bussgang_params(m).epsilon, 1e-14);
  m.varrho2 = 4.0;
  EXPECT_GT(std::abs(bussgang_params(m, BussgangBranch::printed).epsilon - bussgang_params(m).epsilon), 1e-3);
}

TEST(HpaTransfer, SelClipsAtSaturation) {
  const auto m = hpa(HpaKind::sel, 3.0);
  const double a = m.a_sat();
  const std::complex<double> small = std::polar(0.5 * a, 0.3);
  EXPECT_LT(std::abs(hpa_transfer(small, m) - small), 1e-15);
  const auto big = hpa_transfer(std::polar(3.0 * a, -1.2), m);
  EXPECT_NEAR(std::abs(big), a, 1e-14);
  EXPECT_NEAR(std::arg(big), -1.2, 1e-14);
}

TEST(HpaTransfer, TwtaPeaksAtSaturation) {
  auto m = hpa(HpaKind::twta, 4.0);
  m.phase_max = 0.4;
  const double a = m.a_sat();
  const auto at = hpa_transfer(std::complex<double>(a, 0.0), m);
  EXPECT_NEAR(std::abs(at), a / 2.0, 1e-14);
  EXPECT_NEAR(std::arg(at), 0.2, 1e-14);
  for (double f : {0.5, 0.9, 1.1, 2.0}) EXPECT_LT(std::abs(hpa_transfer(std::complex<double>(f * a, 0.0), m)), a / 2.0);
  EXPECT_EQ(hpa_transfer(std::complex<double>(0.0, 0.0), m), std::complex<double>(0.0, 0.0));
}

TEST(HpaKindNames, RoundTrip) {
  for (HpaKind k : {HpaKind::none, HpaKind::sel, HpaKind::twta}) EXPECT_EQ(hpa_kind_from_string(to_string(k)), k);
  EXPECT_THROW(hpa_kind_from_string("klystron"), std::invalid_argument);
}

TEST(IqImbalance, IdealHasNoLeakage) {
  const auto q = iq_coefficients(1.0, 0.0);
  EXPECT_NEAR(std::abs(q.nu1 - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(q.nu2), 0.0, 1e-15);
  EXPECT_EQ(q.rho2, 0.0);
}

TEST(IqImbalance, LeakageRatioRoundTrip) {
  for (double db : {-40.0, -25.0, -15.0, -10.0, -3.0}) {
    const double rho2 = std::pow(10.0, db / 10.0);
    EXPECT_NEAR(iq_from_ilr(rho2).rho2, rho2, 1e-14 * std::max(1.0, rho2 * 1e3));
  }
  EXPECT_THROW(iq_from_ilr(1.0), std::invalid_argument);
  EXPECT_THROW(iq_from_ilr(-0.1), std::invalid_argument);
}

TEST(IqImbalance, PhaseSignDoesNotChangeLeakage) {
  for (double th : {0.05, 0.2, 0.6}) {
    EXPECT_NEAR(iq_coefficients(0.9, th).rho2, iq_coefficients(0.9, -th).rho2, 1e-15);
    EXPECT_GT(iq_coefficients(0.9, th).rho2, iq_coefficients(0.9, 0.0).rho2);
  }
  // nu1 + conj(nu2) = 1 for any (zeta, theta).
  const auto q = iq_coefficients(1.3, 0.25);
  EXPECT_NEAR(std::abs(q.nu1 + std::conj(q.nu2) - 1.0), 0.0, 1e-15);
}

TEST(RelayGain, NormalizesDrivePower) {
  // With no interference and A_SR P_s E||h||^2 / N = sigma^2, the gain is sqrt(varrho2 / (2 sigma^2)).
  const double sigma2 = 2.5e-12;
  const double g = relay_gain(1.0, sigma2, 4, 0.0, 4.0, 1.0, sigma2, 1.0);
  EXPECT_NEAR(g, std::sqrt(1.0 / (2.0 * sigma2)), 1e-9 * g);
  EXPECT_THROW(relay_gain(1.0, 0.0, 4, 0.0, 4.0, 1.0, sigma2, 1.0), std::invalid_argument);
}

TEST(RelayGain, Rho1FormsAgree) {
  const auto b = bussgang_params(hpa(HpaKind::twta, 4.0));
  const double sigma2 = 1e-11, snr = 50.0, inr = 3.0;
  // mean_snr = A P E||h||^2/(N sigma2), mean_inr = P_r E|f|^2 / sigma2.
  const double g = relay_gain(snr * sigma2, 1.0, 1, inr * sigma2, 1.0, 1.0, sigma2, 1.0);
  EXPECT_NEAR(rho1(b, 1.0, snr, inr), rho1_from_gain(b, g, sigma2), 1e-10);
  EXPECT_EQ(rho1(bussgang_params(HpaModel{}), 1.0, snr, inr), 1.0);
}

TEST(ExpTimesEi, ReferenceAndAsymptoticBranch) {
  EXPECT_NEAR(exp_times_ei_neg(3.0), -0.262083740255318496, 1e-15);
  // Both sides of the switch to the asymptotic series.
  EXPECT_NEAR(exp_times_ei_neg(39.999999), -0.0244041156755135097, 1e-15);
  EXPECT_NEAR(exp_times_ei_neg(40.000001), -0.0244041144837436720, 1e-15);
  EXPECT_NEAR(exp_times_ei_neg(60.0), -0.0163977137080465268, 1e-15);
  // e^x E1(x) lies in (1/(x+1), 1/x).
  for (double x : {0.5, 5.0, 50.0, 500.0}) {
    EXPECT_LT(exp_times_ei_neg(x), -1.0 / (x + 1.0));
    EXPECT_GT(exp_times_ei_neg(x), -1.0 / x);
  }
  EXPECT_THROW(exp_times_ei_neg(0.0), std::domain_error);
}
