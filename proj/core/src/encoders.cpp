#include "hsed/encoders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace hsed::enc {

using manifold::Kind;
using manifold::Spec;

namespace {

constexpr double kNormTiny = 1e-30;   // under the square root of row norms
constexpr double kBallMargin = 1e-5;  // matches manifold::project_to_manifold
// Same effective radius the ball margin enforces (artanh(1 - margin) ~ 6.1);
// keeps cosh/sinh in exp maps bounded on the hyperboloid too.
const double kTangentCap = std::atanh(1.0 - kBallMargin);

// Row-wise Euclidean norm with a tiny floor so directions at zero stay finite.
Tensor safe_row_norm(const Tensor& x) {
  return sqrt_op(add_scalar(row_dot(x, x), kNormTiny));
}

// Row-wise Minkowski inner product <a,b>_M.
Tensor mink_row_dot(const Tensor& a, const Tensor& b) {
  Tensor d = row_dot(a, b);
  Tensor t0 = hadamard(slice_cols(a, 0, 1), slice_cols(b, 0, 1));
  return sub(d, scale(t0, 2.0));
}

Tensor mobius_add_rows(const Tensor& x, const Tensor& y, double k) {
  Tensor xy = row_dot(x, y);
  Tensor x2 = row_dot(x, x);
  Tensor y2 = row_dot(y, y);
  Tensor two_k_xy = scale(xy, 2.0 * k);
  Tensor cx = add_scalar(add(two_k_xy, scale(y2, k)), 1.0);
  Tensor cy = add_scalar(scale(x2, -k), 1.0);
  Tensor den = add_scalar(add(two_k_xy, scale(hadamard(x2, y2), k * k)), 1.0);
  return div_col(add(mul_col(x, cx), mul_col(y, cy)), den);
}

Tensor lambda_col(const Tensor& x, double k) {
  // conformal factor 2 / (1 - K |x|^2), one entry per row
  Tensor x2 = row_dot(x, x);
  return div(Tensor::leaf(x2.rows(), 1, std::vector<double>(x2.rows(), 2.0)),
             add_scalar(scale(x2, -k), 1.0));
}

Tensor exp_at_rows(const Tensor& x, const Tensor& v, const Spec& spec) {
  const double k = spec.curvature_k;
  const double sk = std::sqrt(k);
  switch (spec.kind) {
    case Kind::Euclidean:
      return add(x, v);
    case Kind::PoincareBall: {
      Tensor r = safe_row_norm(v);
      Tensor lam = lambda_col(x, k);
      Tensor c = div(tanh_op(scale(hadamard(lam, r), sk / 2.0)), scale(r, sk));
      Tensor out = mobius_add_rows(x, mul_col(v, c), k);
      return clip_rows_norm(out, (1.0 - kBallMargin) / sk);
    }
    case Kind::Hyperboloid: {
      // Euclidean row norm bounds the Minkowski tangent norm, so this cap
      // keeps cosh finite without breaking tangency (pure rescale).
      Tensor vc = clip_rows_norm(v, kTangentCap / sk);
      Tensor vv = relu(mink_row_dot(vc, vc));  // tangent norm^2, clipped at 0
      Tensor r = sqrt_op(add_scalar(vv, kNormTiny));
      Tensor arg = scale(r, 1.0 / sk);
      Tensor out =
          add(mul_col(x, cosh_op(arg)), mul_col(vc, div(sinh_op(arg), scale(r, 1.0 / sk))));
      return hyperboloid_fix(out, k);
    }
  }
  throw std::logic_error("unreachable");
}

Tensor log_at_rows(const Tensor& x, const Tensor& y, const Spec& spec) {
  const double k = spec.curvature_k;
  const double sk = std::sqrt(k);
  switch (spec.kind) {
    case Kind::Euclidean:
      return sub(y, x);
    case Kind::PoincareBall: {
      Tensor w = mobius_add_rows(scale(x, -1.0), y, k);
      Tensor r = safe_row_norm(w);
      Tensor lam = lambda_col(x, k);
      Tensor c = div(scale(artanh_op(scale(r, sk)), 2.0 / sk), hadamard(lam, r));
      return mul_col(w, c);
    }
    case Kind::Hyperboloid: {
      Tensor xy = mink_row_dot(x, y);
      Tensor u = add(y, mul_col(x, scale(xy, 1.0 / k)));
      Tensor un = sqrt_op(add_scalar(relu(mink_row_dot(u, u)), kNormTiny));
      Tensor d = scale(acosh_op(scale(xy, -1.0 / k)), sk);
      return mul_col(u, div(d, un));
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

LayerParams init_layer(int in, int out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(double(in));
  std::uniform_real_distribution<double> u(-bound, bound);
  std::vector<double> w(std::size_t(in) * out);
  for (double& v : w) v = u(rng);
  LayerParams p{Tensor::leaf(in, out, std::move(w), true),
                Tensor::zeros(1, out, true)};
  return p;
}

Tensor exp_map_origin_rows(const Tensor& v, const Spec& spec) {
  const double k = spec.curvature_k;
  const double sk = std::sqrt(k);
  switch (spec.kind) {
    case Kind::Euclidean:
      return v;
    case Kind::PoincareBall: {
      Tensor r = safe_row_norm(v);
      Tensor c = div(tanh_op(scale(r, sk)), scale(r, sk));
      return clip_rows_norm(mul_col(v, c), (1.0 - kBallMargin) / sk);
    }
    case Kind::Hyperboloid: {
      Tensor vc = clip_rows_norm(v, kTangentCap / sk);
      Tensor r = safe_row_norm(vc);
      Tensor arg = scale(r, 1.0 / sk);
      Tensor spatial = mul_col(vc, div(sinh_op(arg), scale(r, 1.0 / sk)));
      Tensor x0 = cosh_op(arg);  // placeholder, fixed below
      return hyperboloid_fix(concat_cols(scale(x0, sk), spatial), k);
    }
  }
  throw std::logic_error("unreachable");
}

Tensor log_map_origin_rows(const Tensor& x, const Spec& spec) {
  const double k = spec.curvature_k;
  const double sk = std::sqrt(k);
  switch (spec.kind) {
    case Kind::Euclidean:
      return x;
    case Kind::PoincareBall: {
      Tensor r = safe_row_norm(x);
      Tensor c = div(artanh_op(scale(r, sk)), scale(r, sk));
      return mul_col(x, c);
    }
    case Kind::Hyperboloid: {
      Tensor spatial = slice_cols(x, 1, x.cols());
      Tensor rs = safe_row_norm(spatial);
      Tensor t = scale(acosh_op(scale(slice_cols(x, 0, 1), 1.0 / sk)), sk);
      return mul_col(spatial, div(t, rs));
    }
  }
  throw std::logic_error("unreachable");
}

Tensor lift_features(const Tensor& x_raw, const Spec& spec) {
  return exp_map_origin_rows(x_raw, spec);
}

Tensor hyp_linear(const Tensor& x_manifold, const LayerParams& p, const Spec& spec,
                  bool relu_activation) {
  Tensor t = log_map_origin_rows(x_manifold, spec);
  Tensor z = add_rowvec(matmul(t, p.W), p.b);
  if (relu_activation) z = relu(z);
  return exp_map_origin_rows(z, spec);
}

EdgeWeights aggregation_weights(const std::vector<std::pair<int, int>>& edges, int n) {
  std::vector<int> deg(n, 0);
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b)
      throw std::invalid_argument("aggregation_weights: invalid edge");
    ++deg[a];
    ++deg[b];
  }
  EdgeWeights ew;
  ew.src.reserve(edges.size() * 2);
  ew.dst.reserve(edges.size() * 2);
  ew.w.reserve(edges.size() * 2);
  for (const auto& [a, b] : edges) {
    const double w = 1.0 / std::sqrt(double(deg[a] + 1) * double(deg[b] + 1));
    ew.src.push_back(b);
    ew.dst.push_back(a);
    ew.w.push_back(w);
    ew.src.push_back(a);
    ew.dst.push_back(b);
    ew.w.push_back(w);
  }
  ew.self_w.resize(n);
  for (int i = 0; i < n; ++i) ew.self_w[i] = 1.0 / double(deg[i] + 1);
  return ew;
}

Tensor hyp_aggregate(const Tensor& h, const EdgeWeights& ew, const Spec& spec) {
  const int n = h.rows();
  if (int(ew.self_w.size()) != n)
    throw std::invalid_argument("hyp_aggregate: weights built for a different node count");
  Tensor wcol = Tensor::leaf(int(ew.w.size()), 1, ew.w);
  if (spec.kind == Kind::Euclidean) {
    Tensor self = mul_col(h, Tensor::leaf(n, 1, ew.self_w));
    if (ew.src.empty()) return self;
    Tensor contrib = mul_col(gather_rows(h, ew.src), wcol);
    return add(scatter_sum_rows(contrib, ew.dst, n), self);
  }
  if (ew.src.empty()) return h;  // log_h(h) = 0, so every row maps to itself
  Tensor bases = gather_rows(h, ew.dst);
  Tensor nbrs = gather_rows(h, ew.src);
  Tensor tangent = mul_col(log_at_rows(bases, nbrs, spec), wcol);
  Tensor summed = scatter_sum_rows(tangent, ew.dst, n);
  return exp_at_rows(h, summed, spec);
}

Tensor hgcn_layer(const Tensor& x_manifold, const LayerParams& p, const EdgeWeights& ew,
                  const Spec& spec) {
  Tensor m = hyp_linear(x_manifold, p, spec, /*relu_activation=*/false);
  Tensor agg = hyp_aggregate(m, ew, spec);
  return exp_map_origin_rows(relu(log_map_origin_rows(agg, spec)), spec);
}

Tensor hmlp_forward(const Tensor& x_raw, const std::vector<LayerParams>& layers,
                    const Spec& spec) {
  Tensor h = lift_features(x_raw, spec);
  for (const auto& layer : layers) h = hyp_linear(h, layer, spec, /*relu_activation=*/true);
  return h;
}

Tensor linear_decode(const Tensor& h_manifold, const LayerParams& dec, const Spec& spec) {
  return add_rowvec(matmul(log_map_origin_rows(h_manifold, spec), dec.W), dec.b);
}

std::vector<Tensor> HsedModel::parameters() const {
  std::vector<Tensor> ps;
  for (const auto& l : layers) {
    ps.push_back(l.W);
    ps.push_back(l.b);
  }
  ps.push_back(decoder.W);
  ps.push_back(decoder.b);
  return ps;
}

std::vector<int> HsedModel::predict(const ingest::MessageGraph& g) const {
  Tensor x = Tensor::leaf(g.num_nodes, g.feature_dim, g.features);
  Tensor h = hmlp_forward(x, layers, config.spec);
  Tensor z = linear_decode(h, decoder, config.spec);
  std::vector<int> pred(g.num_nodes, 0);
  for (int i = 0; i < g.num_nodes; ++i) {
    int best = 0;
    for (int c = 1; c < z.cols(); ++c)
      if (z.at(i, c) > z.at(i, best)) best = c;
    pred[i] = best;
  }
  return pred;
}

HsedModel init_hsed(const EncoderConfig& config, int in_dim, int num_classes,
                    std::uint64_t seed) {
  if (config.hidden_layers < 1 || config.hidden_dim < 1)
    throw std::invalid_argument("init_hsed: hidden_layers and hidden_dim must be >= 1");
  HsedModel m;
  m.config = config;
  std::mt19937_64 seeder(seed);
  int in = in_dim;
  for (int l = 0; l < config.hidden_layers; ++l) {
    m.layers.push_back(init_layer(in, config.hidden_dim, seeder()));
    in = config.hidden_dim;
  }
  m.decoder = init_layer(in, num_classes, seeder());
  return m;
}

namespace {

double subset_accuracy(const std::vector<int>& truth, const std::vector<int>& pred,
                       const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  long hits = 0;
  for (int i : idx) hits += truth[i] == pred[i];
  return double(hits) / double(idx.size());
}

std::vector<int> argmax_rows(const Tensor& z) {
  std::vector<int> pred(z.rows(), 0);
  for (int i = 0; i < z.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < z.cols(); ++c)
      if (z.at(i, c) > z.at(i, best)) best = c;
    pred[i] = best;
  }
  return pred;
}

std::vector<int> subset(const std::vector<int>& v, const std::vector<int>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(v[i]);
  return out;
}

}  // namespace

HsedResult train_hsed(const ingest::MessageGraph& g, const EncoderConfig& config,
                      const ingest::Split& split, std::uint64_t seed) {
  if (!g.labeled()) throw std::invalid_argument("train_hsed: graph has no labels");
  const auto t0 = std::chrono::steady_clock::now();
  const int num_classes = g.num_classes();
  HsedModel model = init_hsed(config, g.feature_dim, num_classes, seed);
  Adam opt(model.parameters(), config.adam);
  Tensor x = Tensor::leaf(g.num_nodes, g.feature_dim, g.features);

  auto forward = [&]() {
    Tensor h = hmlp_forward(x, model.layers, config.spec);
    return linear_decode(h, model.decoder, config.spec);
  };

  double best_val = -1.0;
  std::vector<std::vector<double>> best_params;
  auto snapshot = [&]() {
    best_params.clear();
    for (const auto& p : model.parameters()) best_params.push_back(p.data());
  };
  snapshot();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Tensor z = forward();
    Tensor probs = softmax_rows(z);
    Tensor loss = cross_entropy(probs, g.labels, split.train);
    opt.zero_grad();
    loss.backward();
    opt.step();

    const auto pred = argmax_rows(forward());
    const double val_acc = subset_accuracy(g.labels, pred, split.val);
    if (val_acc > best_val) {
      best_val = val_acc;
      snapshot();
    }
  }

  {
    auto params = model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) params[i].update_data(best_params[i]);
  }

  HsedResult res;
  res.predictions = argmax_rows(forward());
  res.test_report = metrics::evaluate(subset(g.labels, split.test),
                                      subset(res.predictions, split.test));
  res.test_report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.model = std::move(model);
  return res;
}

}  // namespace hsed::enc
