#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfso/channel_fso.hpp"
#include "rfso/channel_rf.hpp"
#include "rfso/impairments.hpp"

namespace rfso {

/// Schema violation; field() names the offending JSON path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Conditional error probability delta/(2 Gamma(tau)) sum_l Gamma(tau, q_l * gamma).
struct Modulation {
  std::string name = "bpsk";
  int order = 2;
  double delta = 1.0;
  double tau = 0.5;
  std::vector<double> q{1.0};
  bool imdd = false;  // true: intensity modulation only (r = 2)

  int v() const { return static_cast<int>(q.size()); }
  double conditional_ber(double gamma) const;
};

/// name in {ook, bpsk, psk, qam}; order is the constellation size for psk/qam.
Modulation modulation_preset(const std::string& name, int order = 2);

struct Interferer {
  double m = 1.0;       // Nakagami shape of the interfering link
  double inr_db = 0.0;  // mean interference-to-noise ratio
};

struct SweepGrid {
  double start_db = 0.0;
  double stop_db = 30.0;
  double step_db = 5.0;
  std::vector<double> points() const;
};

struct McPolicy {
  std::uint64_t seed = 1;
  std::uint64_t trials = 1'000'000;
  std::uint64_t chunk = 1 << 15;
  int workers = 0;  // 0 selects the hardware concurrency
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::string weather = "clear_air";

  // First hop. The sweep value is the mean RF SNR unless ps_sweep is set, in
  // which case it is the source power in dBm and the budget yields the SNR.
  rf::RfLinkBudget budget;
  bool ps_sweep = false;
  int n_antennas = 2;
  int m_sr = 2;
  std::vector<Interferer> interferers;

  // Second hop.
  fso::MalagaParams malaga = fso::MalagaParams::caption_set();
  fso::PointingParams pointing;
  double fso_distance_km = 1.0;
  double fso_theta_rad = 0.01;
  double wavelength_m = 1550e-9;
  bool apply_weather_loss = false;
  double mu_offset_db = 0.0;  // mu_r = mean RF SNR + offset
  int r = 2;
  int apertures = 1;
  int truncation_L = 30;

  // Hardware.
  imp::HpaModel hpa;
  imp::BussgangBranch bussgang_branch = imp::BussgangBranch::corrected;
  std::optional<double> ilr_db;  // image-leakage ratio; overrides zeta/theta
  double iq_zeta = 1.0;
  double iq_theta = 0.0;

  Modulation modulation = modulation_preset("ook");
  double threshold_db = 0.0;
  SweepGrid sweep;
  McPolicy mc;
};

/// Everything the engines need at one sweep value, in linear units.
struct ScenarioPoint {
  double sweep_db = 0.0;
  rf::RfFading fading;
  rf::InterferenceModel interference;
  std::shared_ptr<const fso::CompositeChannel> channel;
  int r = 2;
  int apertures = 1;
  double mu = 1.0;
  imp::BussgangParams bussgang;
  imp::IqImbalance iq;
  double rho1 = 1.0;
  double rho2 = 0.0;
  double iota = 1.0;
  double mean_eff_sinr = 0.0;
  double mean_inv_interf = 1.0;  // E[1/(1+gamma_R)]
  double varpi = 1.0;
  double threshold = 1.0;
  Modulation modulation;

  bool ideal_hardware() const { return rho1 == 1.0 && rho2 == 0.0; }
  /// C = E[gamma_SR^eff] + rho1, the constant term of the SINDR denominator.
  double c_const() const { return mean_eff_sinr + rho1; }
};

/// A validated configuration plus the shared composite channel.
class Scenario {
 public:
  explicit Scenario(ScenarioConfig cfg);
  const ScenarioConfig& config() const { return cfg_; }
  ScenarioPoint at(double sweep_db) const;
  const std::shared_ptr<const fso::CompositeChannel>& channel() const { return channel_; }

 private:
  ScenarioConfig cfg_;
  std::shared_ptr<const fso::CompositeChannel> channel_;
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
/// Resolved configuration echo (linear units included), as JSON text.
std::string config_to_json(const ScenarioConfig& cfg, int indent = 2);
void validate_config(const ScenarioConfig& cfg);

}  // namespace rfso
