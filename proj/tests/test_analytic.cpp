#include <gtest/gtest.h>

#include <cmath>

#include "rfso/analytic.hpp"
#include "rfso/scenario.hpp"

using namespace rfso;

namespace {

ScenarioConfig ideal_imdd() {
  ScenarioConfig c;
  c.threshold_db = 0.0;
  return c;
}

ScenarioConfig twta_imdd() {
  auto c = ideal_imdd();
  c.hpa.kind = imp::HpaKind::twta;
  c.hpa.ibo_db = 4.0;
  c.ilr_db = -10.0;
  return c;
}

ScenarioConfig ideal_heterodyne() {
  auto c = ideal_imdd();
  c.r = 1;
  c.modulation = modulation_preset("bpsk");
  return c;
}

ScenarioConfig sel_heterodyne() {
  auto c = ideal_heterodyne();
  c.hpa.kind = imp::HpaKind::sel;
  c.hpa.ibo_db = 0.0;
  c.ilr_db = -15.0;
  return c;
}

void expect_rel(double got, double want, double tol) {
  EXPECT_LE(std::abs(got - want), tol * std::abs(want)) << "got " << got << " want " << want;
}

}  // namespace

// End-to-end references from nested scipy quadrature of the SINDR definition
// (outage, BPSK BER and capacity), threshold 0 dB, default channel and RF set.
TEST(EndToEnd, IdealImddAt20dB) {
  const auto p = Scenario(ideal_imdd()).at(20.0);
  expect_rel(analytic::outage_quadrature(p, p.threshold), 7.859664628941705e-02, 1e-9);
  expect_rel(analytic::capacity_quadrature(p), 2.263011879278029, 1e-9);
  const auto cf = analytic::outage_closed_form(p, p.threshold);
  ASSERT_TRUE(cf.available) << cf.note;
  expect_rel(cf.value, 7.859664628941705e-02, 1e-8);
}

TEST(EndToEnd, TwtaImddAt20dB) {
  const auto p = Scenario(twta_imdd()).at(20.0);
  expect_rel(analytic::outage_quadrature(p, p.threshold), 1.046096087526271e-01, 1e-9);
  expect_rel(analytic::capacity_quadrature(p), 8.971896057655983e-01, 1e-9);
  const auto cf = analytic::outage_closed_form(p, p.threshold);
  ASSERT_TRUE(cf.available) << cf.note;
  expect_rel(cf.value, 1.046096087526271e-01, 1e-8);
}

TEST(EndToEnd, IdealHeterodyneAt15dB) {
  const auto p = Scenario(ideal_heterodyne()).at(15.0);
  expect_rel(analytic::outage_quadrature(p, p.threshold), 2.454148595706544e-02, 1e-9);
  expect_rel(analytic::ber_quadrature(p), 6.606704963292566e-03, 1e-9);
  expect_rel(analytic::capacity_quadrature(p), 2.342719940953779, 1e-9);
  const auto ber = analytic::ber_closed_form(p);
  ASSERT_TRUE(ber.available) << ber.note;
  expect_rel(ber.value, 6.606704963292566e-03, 1e-8);
  const auto cap = analytic::capacity_closed_form(p);
  ASSERT_TRUE(cap.available) << cap.note;
  expect_rel(cap.value, 2.342719940953779, 1e-8);
}

TEST(EndToEnd, SelHeterodyneAt15dB) {
  const auto p = Scenario(sel_heterodyne()).at(15.0);
  expect_rel(analytic::outage_quadrature(p, p.threshold), 3.854400513344838e-02, 1e-9);
  expect_rel(analytic::ber_quadrature(p), 1.212179143582896e-02, 1e-9);
  expect_rel(analytic::capacity_quadrature(p), 1.662023780842366, 1e-9);
  const auto cf = analytic::outage_closed_form(p, p.threshold);
  ASSERT_TRUE(cf.available) << cf.note;
  expect_rel(cf.value, 3.854400513344838e-02, 1e-8);
}

TEST(Outage, QuadratureAndComplementSumToOne) {
  for (const auto& c : {ideal_imdd(), twta_imdd(), sel_heterodyne()}) {
    const Scenario sc(c);
    for (double db : {0.0, 20.0, 40.0}) {
      const auto p = sc.at(db);
      EXPECT_NEAR(analytic::outage_quadrature(p, 1.0) + analytic::outage_complement_quadrature(p, 1.0), 1.0, 1e-10);
    }
  }
}

TEST(Outage, DecreasesWithSnrAndIncreasesWithThreshold) {
  const Scenario sc(twta_imdd());
  double prev = 2.0;
  for (double db = 0.0; db <= 50.0; db += 10.0) {
    const double v = analytic::outage_quadrature(sc.at(db), 1.0);
    EXPECT_LT(v, prev) << db;
    prev = v;
  }
  const auto p = sc.at(25.0);
  prev = -1.0;
  for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double v = analytic::outage_quadrature(p, t);
    EXPECT_GT(v, prev) << t;
    prev = v;
  }
}

TEST(Outage, ImpairmentsNeverHelp) {
  const Scenario ideal(ideal_imdd()), twta(twta_imdd());
  for (double db : {5.0, 20.0, 35.0})
    EXPECT_GT(analytic::outage_quadrature(twta.at(db), 1.0), analytic::outage_quadrature(ideal.at(db), 1.0));
}

TEST(Outage, CertainAtOrAboveInverseLeakage) {
  const auto p = Scenario(twta_imdd()).at(30.0);
  EXPECT_EQ(analytic::outage_cdf(p, 1.0 / p.rho2), 1.0);
  EXPECT_EQ(analytic::outage_cdf(p, 2.0 / p.rho2), 1.0);
  EXPECT_LT(analytic::outage_cdf(p, 0.5 / p.rho2), 1.0);
}

TEST(Outage, FloorIsZeroForIdealHardwareAndPositiveOtherwise) {
  EXPECT_EQ(analytic::outage_floor(Scenario(ideal_imdd()), 1.0).value, 0.0);
  const Scenario sc(twta_imdd());
  const auto f = analytic::outage_floor(sc, 1.0);
  EXPECT_GT(f.value, 0.0);
  EXPECT_LE(f.value, analytic::outage_quadrature(sc.at(60.0), 1.0) * (1.0 + 1e-9));
}

TEST(Diversity, GainFollowsTheSmallestFadingOrder) {
  auto c = ideal_imdd();
  c.n_antennas = 2;
  c.m_sr = 2;
  c.apertures = 2;
  c.pointing.enabled = true;
  c.pointing.xi2 = 6.7;
  const auto p = Scenario(c).at(30.0);
  const auto d = analytic::diversity_gain(p);
  EXPECT_FALSE(d.impaired);
  EXPECT_DOUBLE_EQ(d.gain, 2.0);
  EXPECT_TRUE(analytic::diversity_gain(Scenario(twta_imdd()).at(30.0)).impaired);
  EXPECT_EQ(analytic::diversity_gain(Scenario(twta_imdd()).at(30.0)).gain, 0.0);
}

TEST(Ber, AllOutageGivesHalfTheErrorWeight) {
  for (const char* name : {"ook", "bpsk"}) {
    const auto m = modulation_preset(name);
    EXPECT_DOUBLE_EQ(m.conditional_ber(0.0), m.v() * m.delta / 2.0);
  }
  for (int order : {4, 8, 16}) {
    const auto m = modulation_preset("psk", order);
    EXPECT_NEAR(m.conditional_ber(0.0), m.v() * m.delta / 2.0, 1e-15);
  }
  // A dead first hop makes every trial an outage.
  const auto p = Scenario(ideal_heterodyne()).at(-80.0);
  EXPECT_NEAR(analytic::ber_quadrature(p), 0.5, 1e-3);
}

TEST(Ber, OnOffKeyingIsWorseThanBpsk) {
  const auto ook = modulation_preset("ook"), bpsk = modulation_preset("bpsk");
  for (double g : {0.1, 1.0, 5.0, 20.0}) EXPECT_GT(ook.conditional_ber(g), bpsk.conditional_ber(g));
}

TEST(Ber, DecreasesWithSnr) {
  const Scenario sc(sel_heterodyne());
  double prev = 1.0;
  for (double db = 0.0; db <= 40.0; db += 10.0) {
    const double v = analytic::ber_quadrature(sc.at(db));
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Capacity, BelowJensenBoundAndCeilings) {
  for (const auto& c : {ideal_imdd(), twta_imdd(), sel_heterodyne()}) {
    const Scenario sc(c);
    for (double db : {10.0, 30.0, 60.0}) {
      const auto p = sc.at(db);
      const double cap = analytic::capacity_quadrature(p);
      EXPECT_LE(cap, analytic::capacity_jensen_bound(p) * (1.0 + 1e-12)) << db;
      const auto ceil = analytic::capacity_ceilings(p);
      if (!ceil.inf_unbounded || !ceil.max_unbounded) EXPECT_LT(cap, ceil.min()) << db;
    }
  }
}

TEST(Capacity, IncreasesWithSnr) {
  const Scenario sc(twta_imdd());
  double prev = 0.0;
  for (double db = 0.0; db <= 60.0; db += 10.0) {
    const double v = analytic::capacity_quadrature(sc.at(db));
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Capacity, CeilingsForTheTwtaCase) {
  const auto p = Scenario(twta_imdd()).at(20.0);
  const auto c = analytic::capacity_ceilings(p);
  ASSERT_FALSE(c.max_unbounded);
  // log(1 + (e / 2 pi) / 0.1)
  EXPECT_NEAR(c.i_max, std::log(1.0 + 0.43262798971613253 / 0.1), 1e-12);
  EXPECT_NEAR(c.i_max, 1.67265, 1e-5);
  ASSERT_FALSE(c.inf_unbounded);
  EXPECT_LT(c.i_inf, c.i_max);
  const auto id = analytic::capacity_ceilings(Scenario(ideal_imdd()).at(20.0));
  EXPECT_TRUE(id.inf_unbounded);
  EXPECT_TRUE(id.max_unbounded);
}

TEST(Capacity, LeakageOnlyCeilingForHeterodyne) {
  auto c = ideal_heterodyne();
  c.ilr_db = -15.0;
  const auto p = Scenario(c).at(20.0);
  const auto ceil = analytic::capacity_ceilings(p);
  EXPECT_NEAR(ceil.i_max, std::log(1.0 + 1.0 / p.rho2), 1e-12);
  EXPECT_NEAR(ceil.i_max, 3.48501, 1e-5);
  // Without amplifier distortion both ceilings coincide.
  EXPECT_NEAR(ceil.i_inf, ceil.i_max, 1e-12);
}

TEST(Capacity, JensenTermMatchesMeijerForm) {
  auto c = ideal_imdd();
  c.interferers = {{1.0, 3.0}, {1.0, 3.0}};
  const Scenario sc(c);
  for (double db : {10.0, 25.0}) {
    const auto p = sc.at(db);
    const auto g = analytic::jensen_j_meijer(p);
    ASSERT_TRUE(g.available) << g.note;
    expect_rel(g.value, analytic::jensen_j(p), 1e-9);
  }
}

TEST(Capacity, ApproximationUsesTheMeanOfEachHop) {
  // Ideal heterodyne link without interference: log(1 + E[g1] E[g2] / (E[g2] + E[g1] + 1)).
  const auto p = Scenario(ideal_heterodyne()).at(20.0);
  const double g1 = 100.0, g2 = p.mu * p.channel->mean_max_w_r(1, 1);
  EXPECT_NEAR(g2, 100.0, 1e-9);
  EXPECT_NEAR(analytic::capacity_approx(p), std::log(1.0 + g1 * g2 / (g2 + g1 + 1.0)), 1e-12);
}

TEST(Capacity, ApproximationStaysAboveTheExactValue) {
  // Averaging inside the logarithm overestimates; the gap grows slowly with SNR.
  const Scenario sc(ideal_heterodyne());
  for (double db : {10.0, 25.0, 40.0}) {
    const auto p = sc.at(db);
    const double q = analytic::capacity_quadrature(p);
    EXPECT_GT(analytic::capacity_approx(p), q) << db;
    EXPECT_LT(analytic::capacity_approx(p), q + 1.0) << db;
  }
}
