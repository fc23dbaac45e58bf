#pragma once

#include <cstdint>

#include "hsed/ingest.hpp"

namespace hsed::synth {

// Rooted (branching, depth) tree rendered as a message graph. Node labels are
// the index of the root child whose subtree contains the node (root gets 0),
// so the task is solvable from structure. Features are a class-dependent mean
// direction plus seeded Gaussian noise of scale feature_noise.
struct TreeSpec {
  int branching = 3;
  int depth = 6;
  int feature_dim = 16;
  double feature_noise = 1.0;
  double mean_scale = 1.0;
  std::uint64_t seed = 0;
};

ingest::MessageGraph make_tree_graph(const TreeSpec& spec);

// Seeded two-community graph for contrastive smoke tests: intra-community
// edges with probability p_in, inter with p_out, community-mean features.
struct CommunitySpec {
  int nodes_per_community = 100;
  int feature_dim = 8;
  double p_in = 0.05;
  double p_out = 0.002;
  double feature_noise = 1.0;
  std::uint64_t seed = 0;
};

ingest::MessageGraph make_community_graph(const CommunitySpec& spec);

}  // namespace hsed::synth
