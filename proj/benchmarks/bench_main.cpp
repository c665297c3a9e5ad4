#include <benchmark/benchmark.h>

#include "elicit/fairness.hpp"
#include "elicit/rollout.hpp"
#include "elicit/simulator.hpp"
#include "elicit/trainer.hpp"

namespace {

using namespace elicit;

struct Fixture {
  QuestionBank bank = QuestionBank::default_bank();
  Simulator sim{bank};
  Encoder enc{bank};
  ModelParams critic = init_params({ModelRole::kCritic, enc.row_width(), 16, bank.size()}, 1);
  ModelParams policy = init_params({ModelRole::kPolicy, enc.row_width(), 16, bank.size()}, 2);
  Persona persona = sim.sample_persona(3, 0.2);
  Transcript transcript{{std::nullopt, sim.initial_summary(persona).text}};
};

void BM_CriticForward(benchmark::State& state) {
  Fixture f;
  const auto x = f.enc.tensorize(f.transcript);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_score(f.critic, x));
  }
}
BENCHMARK(BM_CriticForward);

void BM_PolicyGradient(benchmark::State& state) {
  Fixture f;
  std::vector<PolicySample> batch(8, PolicySample{f.enc.tensorize(f.transcript), {}, 4, 0.7});
  for (auto _ : state) {
    benchmark::DoNotOptimize(grad_reinforce(f.policy, batch));
  }
}
BENCHMARK(BM_PolicyGradient);

void BM_SelectNext(benchmark::State& state) {
  Fixture f;
  const NetworkCritic critic(f.critic, f.enc);
  const NetworkPolicy policy(f.policy, f.enc);
  const SimulatedRespondent respondent(f.sim, f.persona);
  RolloutConfig cfg;
  cfg.candidates = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        select_next(f.transcript, cfg, critic, policy, respondent, f.bank, 0));
  }
}
BENCHMARK(BM_SelectNext)->Arg(1)->Arg(4)->Arg(16);

void BM_SolveCalibration(benchmark::State& state) {
  Rng rng(11);
  std::vector<ScoredSample> data(static_cast<std::size_t>(state.range(0)));
  for (auto& s : data) {
    for (std::size_t k = 0; k < kConstantMember; ++k) s.c[k] = uniform01(rng);
    s.c[kConstantMember] = 1.0;
    s.f = 0.05 + 0.9 * uniform01(rng);
    s.y = bernoulli(rng, 0.2 + 0.3 * s.c[0]) ? 1.0 : 0.0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_calibration(data, 0.1));
  }
}
BENCHMARK(BM_SolveCalibration)->Arg(1561)->Arg(15000);

void BM_TrainPhase(benchmark::State& state) {
  TrainConfig cfg = desk_profile();
  cfg.fair_batches = 1;
  const Trainer trainer(cfg);
  auto run = trainer.initial_state();
  for (auto _ : state) {
    trainer.train_phase(run);
  }
}
BENCHMARK(BM_TrainPhase)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
