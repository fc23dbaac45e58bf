#include "hsed/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace hsed::contrastive {

using enc::EdgeWeights;
using enc::EncoderConfig;
using enc::LayerParams;
using ingest::MessageGraph;

AugmentationKind augmentation_from_name(const std::string& name) {
  if (name == "feature_dropping") return AugmentationKind::FeatureDropping;
  if (name == "random_masking") return AugmentationKind::RandomMasking;
  if (name == "feature_corruption") return AugmentationKind::FeatureCorruption;
  throw std::invalid_argument("unknown augmentation: " + name);
}

const char* augmentation_name(AugmentationKind k) {
  switch (k) {
    case AugmentationKind::FeatureDropping: return "feature_dropping";
    case AugmentationKind::RandomMasking: return "random_masking";
    case AugmentationKind::FeatureCorruption: return "feature_corruption";
  }
  return "?";
}

MessageGraph augment(const MessageGraph& g, const AugmentationSpec& spec) {
  if (spec.drop_rate < 0.0 || spec.drop_rate > 1.0)
    throw std::invalid_argument("augment: drop_rate must be in [0,1]");
  MessageGraph out = g;  // edges (and labels/ids) copied bit-equal
  std::mt19937_64 rng(spec.seed);
  const int n = g.num_nodes, d = g.feature_dim;
  switch (spec.kind) {
    case AugmentationKind::FeatureDropping: {
      // Zero all features of ceil(drop_rate * N) seeded nodes.
      std::vector<int> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::shuffle(idx.begin(), idx.end(), rng);
      const int count = int(std::ceil(spec.drop_rate * n));
      for (int t = 0; t < count && t < n; ++t)
        std::fill_n(out.features.begin() + std::size_t(idx[t]) * d, d, 0.0);
      break;
    }
    case AugmentationKind::RandomMasking: {
      std::bernoulli_distribution mask(spec.drop_rate);
      for (double& v : out.features)
        if (mask(rng)) v = 0.0;
      break;
    }
    case AugmentationKind::FeatureCorruption: {
      // Row permutation of X; the multiset of feature rows is preserved.
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (int i = 0; i < n; ++i)
        std::copy_n(g.features.begin() + std::size_t(perm[i]) * d, d,
                    out.features.begin() + std::size_t(i) * d);
      break;
    }
  }
  return out;
}

std::vector<Tensor> UhsedModel::parameters() const {
  std::vector<Tensor> ps;
  for (const auto& l : layers) {
    ps.push_back(l.W);
    ps.push_back(l.b);
  }
  ps.push_back(score_matrix);
  return ps;
}

UhsedModel init_uhsed(const EncoderConfig& config, int in_dim, std::uint64_t seed) {
  if (config.hidden_layers < 1 || config.hidden_dim < 1)
    throw std::invalid_argument("init_uhsed: hidden_layers and hidden_dim must be >= 1");
  UhsedModel m;
  m.config = config;
  std::mt19937_64 seeder(seed);
  int in = in_dim;
  for (int l = 0; l < config.hidden_layers; ++l) {
    m.layers.push_back(enc::init_layer(in, config.hidden_dim, seeder()));
    in = config.hidden_dim;
  }
  m.score_matrix = enc::init_layer(config.hidden_dim, config.hidden_dim, seeder()).W;
  return m;
}

Tensor encode_view(const UhsedModel& model, const Tensor& features, const EdgeWeights& ew) {
  const auto& spec = model.config.spec;
  Tensor h = enc::lift_features(features, spec);
  for (const auto& layer : model.layers) h = enc::hgcn_layer(h, layer, ew, spec);
  return enc::log_map_origin_rows(h, spec);
}

Tensor readout(const Tensor& e) {
  if (e.rows() < 1) throw std::invalid_argument("readout: empty embedding matrix");
  return sigmoid(row_mean(e));
}

Tensor discriminator_logits(const Tensor& e, const Tensor& summary, const Tensor& score_matrix) {
  if (summary.rows() != 1 || summary.cols() != e.cols() ||
      score_matrix.rows() != e.cols() || score_matrix.cols() != e.cols())
    throw std::invalid_argument("discriminator: shape mismatch");
  return matmul(e, matmul(score_matrix, transpose(summary)));
}

Tensor discriminate(const Tensor& e, const Tensor& summary, const Tensor& score_matrix) {
  return sigmoid(discriminator_logits(e, summary, score_matrix));
}

Tensor uhsed_loss(const Tensor& e_pos, const Tensor& e_neg, const Tensor& summary,
                  const Tensor& score_matrix) {
  Tensor s_pos = discriminator_logits(e_pos, summary, score_matrix);
  Tensor s_neg = discriminator_logits(e_neg, summary, score_matrix);
  const int count = s_pos.rows() + s_neg.rows();
  std::vector<double> targets(count, 0.0);
  std::fill_n(targets.begin(), s_pos.rows(), 1.0);
  Tensor t = Tensor::leaf(count, 1, std::move(targets));
  return bce_logits(concat_rows(s_pos, s_neg), t);
}

UhsedResult train_uhsed(const MessageGraph& g, const EncoderConfig& config,
                        const AugmentationSpec& aug, std::uint64_t seed) {
  UhsedModel model = init_uhsed(config, g.feature_dim, seed);
  Adam opt(model.parameters(), config.adam);
  const EdgeWeights ew = enc::aggregation_weights(g.edges, g.num_nodes);
  Tensor x = Tensor::leaf(g.num_nodes, g.feature_dim, g.features);

  std::mt19937_64 aug_seeds(seed ^ 0x9e3779b97f4a7c15ull);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    AugmentationSpec epoch_aug = aug;
    epoch_aug.seed = aug_seeds();  // fresh negative sample every epoch
    MessageGraph neg = augment(g, epoch_aug);
    Tensor xn = Tensor::leaf(neg.num_nodes, neg.feature_dim, neg.features);

    Tensor e_pos = encode_view(model, x, ew);
    Tensor e_neg = encode_view(model, xn, ew);
    Tensor z = readout(e_pos);
    Tensor loss = uhsed_loss(e_pos, e_neg, z, model.score_matrix);
    opt.zero_grad();
    loss.backward();
    opt.step();
  }

  UhsedResult res;
  Tensor e = encode_view(model, x, ew);
  res.embeddings = e.data();
  res.dim = e.cols();
  res.model = std::move(model);
  return res;
}

LogReg logreg_fit(const std::vector<double>& embeddings, int dim, const std::vector<int>& labels,
                  const ingest::Split& split, std::uint64_t seed, int epochs,
                  double learning_rate) {
  const int n = int(labels.size());
  if (dim <= 0 || embeddings.size() != std::size_t(n) * dim)
    throw std::invalid_argument("logreg_fit: embedding matrix shape mismatch");
  int num_classes = 0;
  for (int l : labels) num_classes = std::max(num_classes, l + 1);
  std::set<int> train_classes;
  for (int i : split.train) train_classes.insert(labels[i]);
  if (train_classes.size() < 2)
    throw std::invalid_argument("logreg_fit: training data has a single class");

  LayerParams p = enc::init_layer(dim, num_classes, seed);
  AdamConfig ac;
  ac.learning_rate = learning_rate;
  Adam opt({p.W, p.b}, ac);
  Tensor x = Tensor::leaf(n, dim, embeddings);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    Tensor probs = softmax_rows(add_rowvec(matmul(x, p.W), p.b));
    Tensor loss = cross_entropy(probs, labels, split.train);
    opt.zero_grad();
    loss.backward();
    opt.step();
  }
  return LogReg{p.W, p.b, num_classes};
}

std::vector<int> logreg_predict(const LogReg& clf, const std::vector<double>& embeddings,
                                int dim) {
  if (dim != clf.W.rows()) throw std::invalid_argument("logreg_predict: dimension mismatch");
  const int n = int(embeddings.size()) / dim;
  Tensor x = Tensor::leaf(n, dim, embeddings);
  Tensor z = add_rowvec(matmul(x, clf.W), clf.b);
  std::vector<int> pred(n, 0);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    for (int c = 1; c < z.cols(); ++c)
      if (z.at(i, c) > z.at(i, best)) best = c;
    pred[i] = best;
  }
  return pred;
}

}  // namespace hsed::contrastive
