#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "rfso/scenario.hpp"
#include "rfso/sweep.hpp"
#include "rfso/validation.hpp"

namespace {

namespace fs = std::filesystem;
using rfso::ConfigError;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kValidationFailure = 3;

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<int> workers;
  std::string metric;
  std::string engine = "both";
  bool skip_slow = false;
  std::vector<int> criteria;
  std::vector<int> orders{2, 4, 8, 16, 32};
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

rfso::ScenarioConfig load(const Flags& fl) {
  auto cfg = rfso::load_config(fl.config);
  if (fl.seed) cfg.mc.seed = *fl.seed;
  if (fl.trials) cfg.mc.trials = *fl.trials;
  if (fl.workers) cfg.mc.workers = *fl.workers;
  rfso::validate_config(cfg);
  return cfg;
}

int run_metric(const std::string& command, const Flags& fl) {
  if (!fl.metric.empty() && fl.metric != command)
    throw ConfigError("--metric", "'" + fl.metric + "' conflicts with the '" + command + "' command");
  const auto cfg = load(fl);
  auto opt = rfso::sweep::options_from_config(cfg);
  opt.metric = rfso::sweep::metric_from_string(command);
  try {
    opt.engine = rfso::sweep::engine_from_string(fl.engine);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("--engine", e.what());
  }
  opt.skip_slow_closed_forms = fl.skip_slow;
  if (opt.metric == rfso::sweep::Metric::ber && cfg.modulation.imdd != (cfg.r == 2))
    throw ConfigError("modulation.name", "incompatible with the detection mode");

  const rfso::Scenario sc(cfg);
  spdlog::info("{}: {} points, engine {}, {} trials, seed {}", cfg.name, cfg.sweep.points().size(), fl.engine,
               opt.trials, opt.policy.seed);
  const auto rows = rfso::sweep::run_sweep(sc, opt);
  const std::string hash = rfso::sweep::config_hash(cfg);

  // Files are written only once every row is computed.
  fs::create_directories(fl.out);
  const fs::path stem = fs::path(fl.out) / (cfg.name + "_" + command);
  write_file(stem.string() + ".csv", rfso::sweep::to_csv(rows, hash));
  write_file(stem.string() + ".json", rfso::sweep::sidecar_json(cfg, opt, hash));
  std::size_t mismatches = 0;
  for (const auto& r : rows)
    for (const auto& f : r.flags) mismatches += f == "mismatch";
  spdlog::info("wrote {}.csv ({} rows, {} mismatch flags)", stem.string(), rows.size(), mismatches);
  return kOk;
}

int run_pdf(const Flags& fl) {
  const auto cfg = load(fl);
  std::vector<double> ia;
  for (double x = 0.05; x <= 6.0 + 1e-12; x += 0.05) ia.push_back(x);
  const std::string csv = rfso::sweep::truncation_table_csv(cfg.malaga, fl.orders, ia);
  fs::create_directories(fl.out);
  const fs::path stem = fs::path(fl.out) / (cfg.name + "_pdf");
  write_file(stem.string() + ".csv", "# config_hash=" + rfso::sweep::config_hash(cfg) + "\n" + csv);
  nlohmann::json side;
  side["config_hash"] = rfso::sweep::config_hash(cfg);
  side["config"] = nlohmann::json::parse(rfso::config_to_json(cfg, -1));
  side["orders"] = fl.orders;
  side["error_column"] = "|exact - truncated|; the bound column is the absolute-value tail bound";
  write_file(stem.string() + ".json", side.dump(2));
  spdlog::info("wrote {}.csv", stem.string());
  return kOk;
}

int run_validate(const Flags& fl) {
  rfso::validation::Options opt;
  if (fl.seed) opt.seed = *fl.seed;
  if (fl.trials) opt.trials = *fl.trials;
  nlohmann::json report = nlohmann::json::array();
  int failed = 0;
  for (const auto& r : rfso::validation::run_all(opt, fl.criteria)) {
    std::printf("criterion %d: %s  %s (%.1f s)\n", r.id, r.passed ? "PASS" : "FAIL", r.name.c_str(), r.elapsed_s);
    for (const auto& d : r.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    report.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"elapsed_s", r.elapsed_s},
                      {"details", r.details}});
    failed += r.passed ? 0 : 1;
  }
  if (fl.out != ".") {
    fs::create_directories(fl.out);
    write_file(fs::path(fl.out) / "validate.json", report.dump(2));
  }
  if (failed) {
    std::printf("failed checks:");
    for (const auto& r : report)
      if (!r["passed"].get<bool>()) std::printf(" %d", r["id"].get<int>());
    std::printf("\n");
    return kValidationFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-hop RF/FSO relay performance: Monte Carlo and analytic sweeps"};
  app.require_subcommand(1);
  Flags fl;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", fl.config, "scenario JSON file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", fl.out, "output directory");
    sub->add_option("--seed", fl.seed, "override mc.seed");
    sub->add_option("--trials", fl.trials, "override mc.trials")->check(CLI::PositiveNumber);
  };

  std::vector<CLI::App*> metric_cmds;
  for (const char* name : {"outage", "ber", "capacity"}) {
    auto* sub = app.add_subcommand(name, std::string("sweep the ") + name + " curve");
    add_common(sub, true);
    sub->add_option("--metric", fl.metric, "must match the command when given");
    sub->add_option("--engine", fl.engine, "mc, analytic or both");
    sub->add_option("--workers", fl.workers, "override mc.workers (0: all cores)");
    sub->add_flag("--skip-slow", fl.skip_slow, "skip closed forms that need a 3-D contour integral");
    metric_cmds.push_back(sub);
  }
  auto* pdf = app.add_subcommand("pdf", "truncated vs exact turbulence PDF with the error bound");
  add_common(pdf, true);
  pdf->add_option("--orders", fl.orders, "series truncation orders");
  auto* validate = app.add_subcommand("validate", "run the acceptance checks");
  add_common(validate, false);
  validate->add_option("--criteria", fl.criteria, "subset of criterion ids (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("rfso"));
  spdlog::set_pattern("[%l] %v");
  try {
    for (auto* sub : metric_cmds)
      if (sub->parsed()) return run_metric(sub->get_name(), fl);
    if (pdf->parsed()) return run_pdf(fl);
    if (validate->parsed()) return run_validate(fl);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kOk;
}
