#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hsed/encoders.hpp"
#include "hsed/manifold.hpp"
#include "hsed/metrics.hpp"
#include "hsed/synth.hpp"

using namespace hsed;
using manifold::Kind;
using manifold::Spec;

namespace {

std::vector<std::vector<double>> sample_points(const Spec& spec, int n, int dim) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 0.6);
  std::vector<std::vector<double>> points;
  points.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> t(dim);
    for (double& v : t) v = g(rng);
    if (spec.kind == Kind::Hyperboloid) t.insert(t.begin(), 0.0);
    points.push_back(manifold::exp_map_origin(t, spec));
  }
  return points;
}

void bench_distance(benchmark::State& state, Kind kind) {
  const Spec spec{kind, 1.0};
  const auto pts = sample_points(spec, 256, 16);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& a = pts[i % pts.size()];
    const auto& b = pts[(i * 7 + 3) % pts.size()];
    benchmark::DoNotOptimize(manifold::distance(a, b, spec));
    ++i;
  }
}

void bench_exp_log_roundtrip(benchmark::State& state, Kind kind) {
  const Spec spec{kind, 1.0};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 0.6);
  std::vector<double> t(kind == Kind::Hyperboloid ? 17 : 16, 0.0);
  for (auto _ : state) {
    for (std::size_t j = (kind == Kind::Hyperboloid ? 1 : 0); j < t.size(); ++j) t[j] = g(rng);
    const auto x = manifold::exp_map_origin(t, spec);
    benchmark::DoNotOptimize(manifold::log_map_origin(x, spec));
  }
}

void bench_hgcn_layer(benchmark::State& state, Kind kind) {
  const Spec spec{kind, 1.0};
  synth::TreeSpec tree;
  tree.branching = 3;
  tree.depth = 5;
  tree.feature_dim = 16;
  const auto g = synth::make_tree_graph(tree);
  const auto ew = enc::aggregation_weights(g.edges, g.num_nodes);
  const auto p = enc::init_layer(g.feature_dim, 32, 1);
  Tensor x = Tensor::leaf(g.num_nodes, g.feature_dim, g.features);
  Tensor h = enc::lift_features(x, spec);
  for (auto _ : state) benchmark::DoNotOptimize(enc::hgcn_layer(h, p, ew, spec));
  state.SetItemsProcessed(state.iterations() * g.num_nodes);
}

void bench_nmi(benchmark::State& state) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> cls(0, 9);
  std::vector<int> u(2000), v(2000);
  for (auto& x : u) x = cls(rng);
  for (auto& x : v) x = cls(rng);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::nmi(u, v));
}

}  // namespace

BENCHMARK_CAPTURE(bench_distance, poincare, Kind::PoincareBall);
BENCHMARK_CAPTURE(bench_distance, hyperboloid, Kind::Hyperboloid);
BENCHMARK_CAPTURE(bench_exp_log_roundtrip, poincare, Kind::PoincareBall);
BENCHMARK_CAPTURE(bench_exp_log_roundtrip, hyperboloid, Kind::Hyperboloid);
BENCHMARK_CAPTURE(bench_hgcn_layer, poincare, Kind::PoincareBall);
BENCHMARK_CAPTURE(bench_hgcn_layer, hyperboloid, Kind::Hyperboloid);
BENCHMARK_CAPTURE(bench_hgcn_layer, euclidean, Kind::Euclidean);
BENCHMARK(bench_nmi);

BENCHMARK_MAIN();
