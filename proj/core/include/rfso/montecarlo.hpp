#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "rfso/channel_fso.hpp"
#include "rfso/channel_rf.hpp"
#include "rfso/impairments.hpp"
#include "rfso/scenario.hpp"

namespace rfso::mc {

/// Trials are cut into fixed-size chunks; chunk c draws from its own engine
/// seeded from (seed, c), so results do not depend on the worker count.
struct RngPolicy {
  std::uint64_t seed = 1;
  std::uint64_t chunk = 1 << 15;
  int workers = 0;  // 0: hardware concurrency
};

struct EstimateWithCi {
  double value = 0.0;
  double ci95 = 0.0;  // half-width
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double elapsed_s = 0.0;
};

using Engine = std::mt19937_64;
Engine chunk_engine(std::uint64_t seed, std::uint64_t chunk_index);
int resolve_workers(int requested);

std::uint64_t chunk_count(std::uint64_t n, const RngPolicy& policy);
/// Calls body(engine, chunk_index, first, count) for every chunk, spread over
/// the workers. Bodies must only write to storage owned by their chunk.
void for_each_chunk(std::uint64_t n, const RngPolicy& policy,
                    const std::function<void(Engine&, std::uint64_t, std::uint64_t, std::uint64_t)>& body);

// Samplers. Each fills n draws deterministically from the policy.
std::vector<double> sample_gamma_sr(const rf::RfFading& f, std::uint64_t n, const RngPolicy& policy);
std::vector<double> sample_interference(const rf::InterferenceModel& m, std::uint64_t n, const RngPolicy& policy);
std::vector<double> sample_malaga(const fso::MalagaParams& p, std::uint64_t n, const RngPolicy& policy);
/// Normalized composite gain W (turbulence times pointing over its mean).
std::vector<double> sample_composite(const fso::CompositeChannel& ch, std::uint64_t n, const RngPolicy& policy);
/// gamma_RD = mu * max_m W_m^r.
std::vector<double> sample_fso_snr(const fso::CompositeChannel& ch, double mu, int r, int apertures, std::uint64_t n,
                                   const RngPolicy& policy);

/// Single draws, shared by the samplers and the estimators.
double draw_malaga(Engine& e, const fso::MalagaParams& p);
double draw_pointing_fraction(Engine& e, double xi2);  // I_p / A0

/// Proportion estimate with the Wilson 95% interval (reported as its half-width
/// around the Wilson centre).
EstimateWithCi wilson(std::uint64_t hits, std::uint64_t n);

EstimateWithCi estimate_outage(const ScenarioPoint& s, std::uint64_t n, const RngPolicy& policy);
EstimateWithCi estimate_ber(const ScenarioPoint& s, std::uint64_t n, const RngPolicy& policy);
EstimateWithCi estimate_capacity(const ScenarioPoint& s, std::uint64_t n, const RngPolicy& policy);

/// Empirical Bussgang regression through hpa_transfer with a circular Gaussian drive.
struct BussgangEstimate {
  double epsilon = 0.0;
  double epsilon_se = 0.0;
  double sigma_d2 = 0.0;
  double sigma_d2_se = 0.0;
};
BussgangEstimate estimate_bussgang(const imp::HpaModel& m, std::uint64_t n, const RngPolicy& policy);

/// Kolmogorov-Smirnov distance of the samples (sorted in place) against cdf.
double ks_distance(std::vector<double>& samples, const std::function<double(double)>& cdf);

}  // namespace rfso::mc
