#pragma once

#include <cstdint>
#include <vector>

#include "hsed/ingest.hpp"
#include "hsed/manifold.hpp"
#include "hsed/metrics.hpp"
#include "hsed/optim.hpp"
#include "hsed/tensor.hpp"

namespace hsed::enc {

enum class EncoderKind { HyperbolicMLP, HyperbolicGCN };

struct EncoderConfig {
  EncoderKind encoder_kind = EncoderKind::HyperbolicMLP;
  manifold::Spec spec;
  int hidden_layers = 2;
  int hidden_dim = 512;
  int epochs = 100;
  AdamConfig adam;
};

// W stored input x output (features are rows); b is 1 x output.
struct LayerParams {
  Tensor W;
  Tensor b;
};

LayerParams init_layer(int in, int out, std::uint64_t seed);

// ---- differentiable manifold maps over feature rows ----
// Tangent rows -> manifold rows (projected back onto the manifold) and back.
Tensor exp_map_origin_rows(const Tensor& v, const manifold::Spec& spec);
Tensor log_map_origin_rows(const Tensor& x, const manifold::Spec& spec);

// Raw features enter the manifold as origin-tangent vectors.
Tensor lift_features(const Tensor& x_raw, const manifold::Spec& spec);

// exp_o(sigma(log_o(W (x) X (+) b))); activation optional so the GCN layer can
// defer its nonlinearity until after aggregation.
Tensor hyp_linear(const Tensor& x_manifold, const LayerParams& p, const manifold::Spec& spec,
                  bool relu_activation);

// Symmetric-normalized weights with self-loops:
// w_ij = 1/sqrt((deg i + 1)(deg j + 1)), w_ii = 1/(deg i + 1).
struct EdgeWeights {
  std::vector<int> src, dst;      // both directions, self-loops excluded
  std::vector<double> w;          // per directed edge
  std::vector<double> self_w;     // per node
};
EdgeWeights aggregation_weights(const std::vector<std::pair<int, int>>& edges, int n);

// Row i <- exp_{h_i}(sum_j w_ij log_{h_i}(h_j)). The self term vanishes on the
// hyperbolic models; the Euclidean control degenerates to the normalized
// adjacency product (including the self weight).
Tensor hyp_aggregate(const Tensor& h, const EdgeWeights& ew, const manifold::Spec& spec);

// Transform (no activation), aggregate, then the tangent-space nonlinearity.
Tensor hgcn_layer(const Tensor& x_manifold, const LayerParams& p, const EdgeWeights& ew,
                  const manifold::Spec& spec);

// Hidden stack of hyp_linear layers; edges are ignored by design.
Tensor hmlp_forward(const Tensor& x_raw, const std::vector<LayerParams>& layers,
                    const manifold::Spec& spec);

// Tangent-space linear decoder: Z = log_o(H) W + b.
Tensor linear_decode(const Tensor& h_manifold, const LayerParams& dec,
                     const manifold::Spec& spec);

struct HsedModel {
  EncoderConfig config;
  std::vector<LayerParams> layers;
  LayerParams decoder;

  std::vector<Tensor> parameters() const;
  std::vector<int> predict(const ingest::MessageGraph& g) const;
};

HsedModel init_hsed(const EncoderConfig& config, int in_dim, int num_classes,
                    std::uint64_t seed);

struct HsedResult {
  HsedModel model;
  metrics::EvalReport test_report;
  std::vector<int> predictions;  // full graph, argmax classes
};

// Full supervised loop: forward, masked cross-entropy, Adam; returns the
// parameters at best validation accuracy plus the test-set report.
HsedResult train_hsed(const ingest::MessageGraph& g, const EncoderConfig& config,
                      const ingest::Split& split, std::uint64_t seed);

}  // namespace hsed::enc
