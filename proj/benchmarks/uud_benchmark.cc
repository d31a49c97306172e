// Copyright 2026 The uudiscover Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "uud/bandit.h"
#include "uud/corpus.h"
#include "uud/dsp.h"
#include "uud/eval.h"
#include "uud/patterns.h"

namespace uud {
namespace {

// Discretized bias benchmark; shared by the mining and cover benchmarks.
const SearchSpace& BiasSpace() {
  static const SearchSpace space = [] {
    const GeneratedData data = InjectBias(DefaultBiasConfig(), 1);
    return BuildSearchSpace(Discretize(data.dataset, 4), data.critical_class,
                            kDefaultTau);
  }();
  return space;
}

void BM_MinePatterns(benchmark::State& state) {
  const SearchSpace& space = BiasSpace();
  MinerOptions options = MinerOptions::Defaults(space.size());
  options.max_length = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(MinePatterns(space, options));
  }
  state.counters["N"] = static_cast<double>(space.size());
}
BENCHMARK(BM_MinePatterns)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ScorePatterns(benchmark::State& state) {
  const SearchSpace& space = BiasSpace();
  const PatternSet set = MinePatterns(space, MinerOptions::Defaults(space.size()));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ScorePatterns(space, set));
  }
  state.counters["patterns"] = static_cast<double>(set.size());
}
BENCHMARK(BM_ScorePatterns)->Unit(benchmark::kMillisecond);

void BM_GreedyPartition(benchmark::State& state) {
  const SearchSpace& space = BiasSpace();
  const PatternSet set = MinePatterns(space, MinerOptions::Defaults(space.size()));
  const ScoredPatterns scored = ScorePatterns(space, set);
  for (auto _ : state) {
    benchmark::DoNotOptimize(GreedyPartition(scored, LambdaWeights{}));
  }
}
BENCHMARK(BM_GreedyPartition)->Unit(benchmark::kMicrosecond);

class CountingOracle : public Oracle {
 public:
  QueryResult Query(const std::string& id) override {
    ++queries_;
    OracleVerdict v;
    v.instance_id = id;
    v.is_unknown_unknown = id.back() == '0';
    v.cost = 1.0;
    return {QueryStatus::kAnswered, v};
  }
  std::size_t queries_made() const override { return queries_; }
  std::size_t budget() const override { return 1u << 30; }

 private:
  std::size_t queries_ = 0;
};

void BM_RunPolicy(benchmark::State& state) {
  const auto arms_count = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<std::string>> arms(arms_count);
  for (std::size_t a = 0; a < arms_count; ++a) {
    for (std::size_t i = 0; i < 100; ++i) {
      arms[a].push_back(std::to_string(a) + "-" + std::to_string(i * (a + 1)));
    }
  }
  const std::size_t budget = DefaultBudget(arms_count * 100);
  unsigned long long seed = 0;
  for (auto _ : state) {
    CountingOracle oracle;
    benchmark::DoNotOptimize(RunPolicy(PolicySpec{}, arms, oracle,
                                       {0.2, "pos"}, budget, seed++));
  }
  state.counters["budget"] = static_cast<double>(budget);
}
BENCHMARK(BM_RunPolicy)->Arg(6)->Arg(24)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace uud

BENCHMARK_MAIN();
