#include "hsed/synth.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsed::synth {

using ingest::MessageGraph;

namespace {

std::vector<std::vector<double>> class_means(int classes, int dim, double scale,
                                             std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> means(classes, std::vector<double>(dim));
  for (auto& m : means) {
    double norm = 0.0;
    for (double& v : m) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : m) v = scale * v / norm;
  }
  return means;
}

}  // namespace

MessageGraph make_tree_graph(const TreeSpec& spec) {
  if (spec.branching < 2 || spec.depth < 2)
    throw std::invalid_argument("make_tree_graph: branching and depth must be >= 2");
  if (spec.feature_dim < 1) throw std::invalid_argument("make_tree_graph: feature_dim >= 1");

  MessageGraph g;
  g.feature_dim = spec.feature_dim;

  // BFS construction: root, then branching children per node, depth levels.
  std::vector<int> parent{-1};
  std::vector<int> level{0};
  for (int i = 0; level[std::size_t(i)] < spec.depth; ++i) {
    for (int c = 0; c < spec.branching; ++c) {
      parent.push_back(i);
      level.push_back(level[std::size_t(i)] + 1);
    }
  }
  g.num_nodes = int(parent.size());
  g.labels.resize(g.num_nodes, 0);
  for (int i = 1; i < g.num_nodes; ++i) {
    g.edges.emplace_back(parent[i], i);  // parent index always < child index
    // Root-child subtree membership: walk up to depth-1 ancestor.
    int a = i;
    while (parent[a] != 0) a = parent[a];
    g.labels[i] = (a - 1) % spec.branching;
  }

  std::mt19937_64 rng(spec.seed);
  const auto means = class_means(spec.branching, spec.feature_dim, spec.mean_scale, rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  g.features.reserve(std::size_t(g.num_nodes) * g.feature_dim);
  for (int i = 0; i < g.num_nodes; ++i) {
    const auto& m = means[g.labels[i]];
    for (int j = 0; j < g.feature_dim; ++j)
      g.features.push_back(m[j] + spec.feature_noise * noise(rng));
  }
  for (int i = 0; i < g.num_nodes; ++i) g.node_ids.push_back("t" + std::to_string(i));
  return g;
}

MessageGraph make_community_graph(const CommunitySpec& spec) {
  if (spec.nodes_per_community < 2)
    throw std::invalid_argument("make_community_graph: need at least 2 nodes per community");
  MessageGraph g;
  g.num_nodes = 2 * spec.nodes_per_community;
  g.feature_dim = spec.feature_dim;
  g.labels.resize(g.num_nodes);
  for (int i = 0; i < g.num_nodes; ++i) g.labels[i] = i < spec.nodes_per_community ? 0 : 1;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < g.num_nodes; ++i)
    for (int j = i + 1; j < g.num_nodes; ++j) {
      const double p = g.labels[i] == g.labels[j] ? spec.p_in : spec.p_out;
      if (coin(rng) < p) g.edges.emplace_back(i, j);
    }

  const auto means = class_means(2, spec.feature_dim, 1.0, rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  g.features.reserve(std::size_t(g.num_nodes) * g.feature_dim);
  for (int i = 0; i < g.num_nodes; ++i)
    for (int j = 0; j < g.feature_dim; ++j)
      g.features.push_back(means[g.labels[i]][j] + spec.feature_noise * noise(rng));
  for (int i = 0; i < g.num_nodes; ++i) g.node_ids.push_back("c" + std::to_string(i));
  return g;
}

}  // namespace hsed::synth
