#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hsed {

// Dense 2-D tensor of doubles with reverse-mode gradient tracking.
// Tensors are cheap handles onto graph nodes; ops record a backward rule.
// Every op fails fast on non-finite results, naming the offending op.
class Tensor {
 public:
  struct Node {
    int rows = 0, cols = 0;
    std::vector<double> val;
    std::vector<double> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backfn;  // accumulates into parents' grad
  };

  Tensor() = default;

  static Tensor leaf(int rows, int cols, std::vector<double> data, bool requires_grad = false);
  static Tensor zeros(int rows, int cols, bool requires_grad = false);
  static Tensor scalar(double v);

  int rows() const { return n_->rows; }
  int cols() const { return n_->cols; }
  std::size_t size() const { return n_->val.size(); }
  bool requires_grad() const { return n_->requires_grad; }

  const std::vector<double>& data() const { return n_->val; }
  const std::vector<double>& grad() const { return n_->grad; }
  double at(int r, int c) const { return n_->val[std::size_t(r) * n_->cols + c]; }
  double item() const;  // 1x1 only

  // Gradients of all reachable leaves; accumulates across calls.
  void backward() const;
  void zero_grad() { n_->grad.assign(n_->val.size(), 0.0); }

  // In-place update, reserved for the optimizer.
  void update_data(const std::vector<double>& v);

  std::shared_ptr<Node> node() const { return n_; }
  explicit Tensor(std::shared_ptr<Node> n) : n_(std::move(n)) {}

 private:
  std::shared_ptr<Node> n_;
};

// ---- elementwise / structural ops ----
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor add_rowvec(const Tensor& a, const Tensor& b);  // b is 1 x cols
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor concat_rows(const Tensor& a, const Tensor& b);
Tensor slice_cols(const Tensor& a, int c0, int c1);  // [c0, c1)

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh_op(const Tensor& a);
Tensor artanh_op(const Tensor& a);  // clamped to |z| <= 1 - 1e-15
Tensor sqrt_op(const Tensor& a);
Tensor cosh_op(const Tensor& a);
Tensor sinh_op(const Tensor& a);
Tensor acosh_op(const Tensor& a);  // clamped to z >= 1

// ---- reductions / broadcasts ----
Tensor row_sum(const Tensor& a);            // N x 1
Tensor row_dot(const Tensor& a, const Tensor& b);  // N x 1
Tensor mul_col(const Tensor& a, const Tensor& c);  // scale row i by c[i]
Tensor div_col(const Tensor& a, const Tensor& c);
Tensor row_mean(const Tensor& a);           // 1 x cols
Tensor sum_all(const Tensor& a);            // 1 x 1
Tensor mean_all(const Tensor& a);           // 1 x 1

Tensor softmax_rows(const Tensor& a);

// ---- indexed ops (graph aggregation) ----
Tensor gather_rows(const Tensor& a, const std::vector<int>& idx);
Tensor scatter_sum_rows(const Tensor& a, const std::vector<int>& idx, int n);

// ---- manifold numerics ----
// Rescales any row with Euclidean norm > max_norm back onto that radius.
Tensor clip_rows_norm(const Tensor& a, double max_norm);
// Recomputes column 0 as sqrt(k + sum of squared spatial coords).
Tensor hyperboloid_fix(const Tensor& a, double k);

// ---- losses ----
Tensor cross_entropy(const Tensor& probs, const std::vector<int>& labels,
                     const std::vector<int>& mask);
Tensor bce_logits(const Tensor& scores, const Tensor& targets);

}  // namespace hsed
