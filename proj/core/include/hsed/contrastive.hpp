#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsed/encoders.hpp"
#include "hsed/ingest.hpp"

namespace hsed::contrastive {

enum class AugmentationKind { FeatureDropping, RandomMasking, FeatureCorruption };

AugmentationKind augmentation_from_name(const std::string& name);
const char* augmentation_name(AugmentationKind k);

struct AugmentationSpec {
  AugmentationKind kind = AugmentationKind::FeatureCorruption;
  double drop_rate = 0.10;  // ignored by FeatureCorruption
  std::uint64_t seed = 0;
};

// Topology-preserving feature perturbation: edges are copied bit-equal.
ingest::MessageGraph augment(const ingest::MessageGraph& g, const AugmentationSpec& spec);

struct UhsedModel {
  enc::EncoderConfig config;
  std::vector<enc::LayerParams> layers;
  Tensor score_matrix;  // h x h discriminator

  std::vector<Tensor> parameters() const;
};

UhsedModel init_uhsed(const enc::EncoderConfig& config, int in_dim, std::uint64_t seed);

// Both views through the shared hyperbolic-GCN encoder, then flattened to the
// origin tangent space for scoring.
Tensor encode_view(const UhsedModel& model, const Tensor& features,
                   const enc::EdgeWeights& ew);

// sigmoid of the row mean.
Tensor readout(const Tensor& e);

// Bilinear scores e_i W z before the sigmoid; discriminate() applies it.
Tensor discriminator_logits(const Tensor& e, const Tensor& summary, const Tensor& score_matrix);
Tensor discriminate(const Tensor& e, const Tensor& summary, const Tensor& score_matrix);

// BCE over positives (rows of E) against negatives (rows of E'), with the
// summary taken from the positive view.
Tensor uhsed_loss(const Tensor& e_pos, const Tensor& e_neg, const Tensor& summary,
                  const Tensor& score_matrix);

struct UhsedResult {
  UhsedModel model;
  std::vector<double> embeddings;  // num_nodes x hidden_dim, row-major
  int dim = 0;
};

// Alg.-2 loop: fresh negative sample per epoch, joint Adam over encoder and
// discriminator, returns the frozen positive-view embeddings.
UhsedResult train_uhsed(const ingest::MessageGraph& g, const enc::EncoderConfig& config,
                        const AugmentationSpec& aug, std::uint64_t seed);

// Downstream multinomial logistic regression on frozen embeddings.
struct LogReg {
  Tensor W;
  Tensor b;
  int num_classes = 0;
};

LogReg logreg_fit(const std::vector<double>& embeddings, int dim, const std::vector<int>& labels,
                  const ingest::Split& split, std::uint64_t seed, int epochs = 300,
                  double learning_rate = 0.1);
std::vector<int> logreg_predict(const LogReg& clf, const std::vector<double>& embeddings, int dim);

}  // namespace hsed::contrastive
