#include <benchmark/benchmark.h>

#include "rfso/analytic.hpp"
#include "rfso/channel_fso.hpp"
#include "rfso/montecarlo.hpp"
#include "rfso/specfun.hpp"

namespace {

using namespace rfso;

ScenarioConfig impaired() {
  ScenarioConfig c;
  c.hpa.kind = imp::HpaKind::twta;
  c.hpa.ibo_db = 4.0;
  c.ilr_db = -10.0;
  return c;
}

void BM_MalagaPdf(benchmark::State& st) {
  const auto p = fso::MalagaParams::caption_set();
  double x = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(fso::malaga_pdf(x, p));
    x = x < 5.0 ? x + 0.01 : 0.1;
  }
}
BENCHMARK(BM_MalagaPdf);

void BM_MalagaTruncated(benchmark::State& st) {
  const auto p = fso::MalagaParams::caption_set();
  const int L = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(fso::malaga_pdf_truncated(1.3, p, L));
}
BENCHMARK(BM_MalagaTruncated)->Arg(8)->Arg(32)->Arg(128);

void BM_MeijerG(benchmark::State& st) {
  const specfun::MeijerGSpec g{2, 1, {0.3, 1.2}, {0.5, 0.1, -0.4}};
  for (auto _ : st) benchmark::DoNotOptimize(specfun::meijer_g(g, 0.8));
}
BENCHMARK(BM_MeijerG)->Unit(benchmark::kMicrosecond);

void BM_CompositeCdf(benchmark::State& st) {
  fso::PointingParams pp;
  pp.enabled = true;
  pp.xi2 = 6.7;
  const fso::CompositeChannel ch(fso::MalagaParams::caption_set(), fso::pointing_model(pp));
  double w = 0.05;
  for (auto _ : st) {
    benchmark::DoNotOptimize(ch.cdf_w(w));
    w = w < 4.0 ? w * 1.1 : 0.05;
  }
}
BENCHMARK(BM_CompositeCdf);

void BM_OutageQuadrature(benchmark::State& st) {
  const Scenario sc(impaired());
  const auto p = sc.at(20.0);
  for (auto _ : st) benchmark::DoNotOptimize(analytic::outage_quadrature(p, 1.0));
}
BENCHMARK(BM_OutageQuadrature)->Unit(benchmark::kMillisecond);

void BM_OutageClosedForm(benchmark::State& st) {
  const Scenario sc(impaired());
  const auto p = sc.at(20.0);
  for (auto _ : st) benchmark::DoNotOptimize(analytic::outage_closed_form(p, 1.0).value);
}
BENCHMARK(BM_OutageClosedForm)->Unit(benchmark::kMillisecond);

void BM_OutageMonteCarlo(benchmark::State& st) {
  const Scenario sc(impaired());
  const auto p = sc.at(20.0);
  mc::RngPolicy pol;
  pol.workers = 1;
  const auto n = static_cast<std::uint64_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(mc::estimate_outage(p, n, pol).value);
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * n));
}
BENCHMARK(BM_OutageMonteCarlo)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
