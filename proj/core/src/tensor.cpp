#include "hsed/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace hsed {

namespace {

using Node = Tensor::Node;
using NodePtr = std::shared_ptr<Node>;

void check_finite(const std::vector<double>& v, const char* op) {
  for (double x : v)
    if (!std::isfinite(x))
      throw std::runtime_error(std::string("numeric error (non-finite result) in op: ") + op);
}

Tensor make(int rows, int cols, std::vector<double> val, std::vector<NodePtr> parents,
            std::function<void(Node&)> backfn, const char* op) {
  check_finite(val, op);
  auto n = std::make_shared<Node>();
  n->rows = rows;
  n->cols = cols;
  n->val = std::move(val);
  for (auto& p : parents) n->requires_grad = n->requires_grad || p->requires_grad;
  if (n->requires_grad) {
    n->parents = std::move(parents);
    n->backfn = std::move(backfn);
  }
  return Tensor(std::move(n));
}

void ensure_grad(Node& n) {
  if (n.grad.size() != n.val.size()) n.grad.assign(n.val.size(), 0.0);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

Tensor elementwise(const Tensor& a, const char* op, double (*f)(double),
                   double (*df)(double, double) /* (x, y) -> dy/dx */) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a.data()[i]);
  auto pa = a.node();
  return make(
      a.rows(), a.cols(), std::move(out), {pa},
      [pa, df](Node& self) {
        ensure_grad(*pa);
        for (std::size_t i = 0; i < self.val.size(); ++i)
          pa->grad[i] += self.grad[i] * df(pa->val[i], self.val[i]);
      },
      op);
}

constexpr double kArtanhClamp = 1e-15;

}  // namespace

Tensor Tensor::leaf(int rows, int cols, std::vector<double> data, bool requires_grad) {
  if (rows < 0 || cols < 0 || data.size() != std::size_t(rows) * cols)
    throw std::invalid_argument("Tensor::leaf: data length must equal rows*cols");
  check_finite(data, "leaf");
  auto n = std::make_shared<Node>();
  n->rows = rows;
  n->cols = cols;
  n->val = std::move(data);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::zeros(int rows, int cols, bool requires_grad) {
  return leaf(rows, cols, std::vector<double>(std::size_t(rows) * cols, 0.0), requires_grad);
}

Tensor Tensor::scalar(double v) { return leaf(1, 1, {v}); }

double Tensor::item() const {
  if (rows() != 1 || cols() != 1) throw std::invalid_argument("Tensor::item: not a scalar");
  return n_->val[0];
}

void Tensor::update_data(const std::vector<double>& v) {
  if (v.size() != n_->val.size()) throw std::invalid_argument("update_data: size mismatch");
  check_finite(v, "update_data");
  n_->val = v;
}

void Tensor::backward() const {
  if (rows() != 1 || cols() != 1)
    throw std::invalid_argument("backward: loss must be a scalar");
  // Topological order by DFS over parents.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{n_.get(), 0}};
  seen.insert(n_.get());
  while (!stack.empty()) {
    auto& [node, i] = stack.back();
    if (i < node->parents.size()) {
      Node* p = node->parents[i++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  ensure_grad(*n_);
  n_->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backfn) {
      ensure_grad(*node);
      node->backfn(*node);
    }
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  const int m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(std::size_t(m) * n, 0.0);
  const double* A = a.data().data();
  const double* B = b.data().data();
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < k; ++p) {
      const double av = A[std::size_t(i) * k + p];
      const double* brow = B + std::size_t(p) * n;
      double* orow = out.data() + std::size_t(i) * n;
      for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  auto pa = a.node(), pb = b.node();
  return make(
      m, n, std::move(out), {pa, pb},
      [pa, pb, m, k, n](Node& self) {
        if (pa->requires_grad) {
          ensure_grad(*pa);  // dA = dC * B^T
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
              const double g = self.grad[std::size_t(i) * n + j];
              for (int p = 0; p < k; ++p)
                pa->grad[std::size_t(i) * k + p] += g * pb->val[std::size_t(p) * n + j];
            }
        }
        if (pb->requires_grad) {
          ensure_grad(*pb);  // dB = A^T * dC
          for (int i = 0; i < m; ++i)
            for (int p = 0; p < k; ++p) {
              const double av = pa->val[std::size_t(i) * k + p];
              for (int j = 0; j < n; ++j)
                pb->grad[std::size_t(p) * n + j] += av * self.grad[std::size_t(i) * n + j];
            }
        }
      },
      "matmul");
}

Tensor transpose(const Tensor& a) {
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(a.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[std::size_t(j) * m + i] = a.at(i, j);
  auto pa = a.node();
  return make(
      n, m, std::move(out), {pa},
      [pa, m, n](Node& self) {
        ensure_grad(*pa);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < m; ++i)
            pa->grad[std::size_t(i) * n + j] += self.grad[std::size_t(j) * m + i];
      },
      "transpose");
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  auto pa = a.node(), pb = b.node();
  return make(
      a.rows(), a.cols(), std::move(out), {pa, pb},
      [pa, pb](Node& self) {
        if (pa->requires_grad) {
          ensure_grad(*pa);
          for (std::size_t i = 0; i < self.val.size(); ++i) pa->grad[i] += self.grad[i];
        }
        if (pb->requires_grad) {
          ensure_grad(*pb);
          for (std::size_t i = 0; i < self.val.size(); ++i) pb->grad[i] += self.grad[i];
        }
      },
      "add");
}

Tensor add_rowvec(const Tensor& a, const Tensor& b) {
  if (b.rows() != 1 || b.cols() != a.cols())
    throw std::invalid_argument("add_rowvec: b must be 1 x cols(a)");
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(a.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[std::size_t(i) * n + j] = a.at(i, j) + b.data()[j];
  auto pa = a.node(), pb = b.node();
  return make(
      m, n, std::move(out), {pa, pb},
      [pa, pb, m, n](Node& self) {
        if (pa->requires_grad) {
          ensure_grad(*pa);
          for (std::size_t i = 0; i < self.val.size(); ++i) pa->grad[i] += self.grad[i];
        }
        if (pb->requires_grad) {
          ensure_grad(*pb);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) pb->grad[j] += self.grad[std::size_t(i) * n + j];
        }
      },
      "add_rowvec");
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  auto pa = a.node(), pb = b.node();
  return make(
      a.rows(), a.cols(), std::move(out), {pa, pb},
      [pa, pb](Node& self) {
        if (pa->requires_grad) {
          ensure_grad(*pa);
          for (std::size_t i = 0; i < self.val.size(); ++i) pa->grad[i] += self.grad[i];
        }
        if (pb->requires_grad) {
          ensure_grad(*pb);
          for (std::size_t i = 0; i < self.val.size(); ++i) pb->grad[i] -= self.grad[i];
        }
      },
      "sub");
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "hadamard");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  auto pa = a.node(), pb = b.node();
  return make(
      a.rows(), a.cols(), std::move(out), {pa, pb},
      [pa, pb](Node& self) {
        if (pa->requires_grad) {
          ensure_grad(*pa);
          for (std::size_t i = 0; i < self.val.size(); ++i)
            pa->grad[i] += self.grad[i] * pb->val[i];
        }
        if (pb->requires_grad) {
          ensure_grad(*pb);
          for (std::size_t i = 0; i < self.val.size(); ++i)
            pb->grad[i] += self.grad[i] * pa->val[i];
        }
      },
      "hadamard");
}

Tensor div(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "div");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a.data()[i] / b.data()[i];
  auto pa = a.node(), pb = b.node();
  return make(
      a.rows(), a.cols(), std::move(out), {pa, pb},
      [pa, pb](Node& self) {
        if (pa->requires_grad) {
          ensure_grad(*pa);
          for (std::size_t i = 0; i < self.val.size(); ++i)
            pa->grad[i] += self.grad[i] / pb->val[i];
        }
        if (pb->requires_grad) {
          ensure_grad(*pb);
          for (std::size_t i = 0; i < self.val.size(); ++i)
            pb->grad[i] -= self.grad[i] * self.val[i] / pb->val[i];
        }
      },
      "div");
}

Tensor scale(const Tensor& a, double c) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = c * a.data()[i];
  auto pa = a.node();
  return make(
      a.rows(), a.cols(), std::move(out), {pa},
      [pa, c](Node& self) {
        ensure_grad(*pa);
        for (std::size_t i = 0; i < self.val.size(); ++i) pa->grad[i] += c * self.grad[i];
      },
      "scale");
}

Tensor add_scalar(const Tensor& a, double c) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a.data()[i] + c;
  auto pa = a.node();
  return make(
      a.rows(), a.cols(), std::move(out), {pa},
      [pa](Node& self) {
        ensure_grad(*pa);
        for (std::size_t i = 0; i < self.val.size(); ++i) pa->grad[i] += self.grad[i];
      },
      "add_scalar");
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("concat_cols: row counts differ");
  const int m = a.rows(), na = a.cols(), nb = b.cols(), n = na + nb;
  std::vector<double> out(std::size_t(m) * n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < na; ++j) out[std::size_t(i) * n + j] = a.at(i, j);
    for (int j = 0; j < nb; ++j) out[std::size_t(i) * n + na + j] = b.at(i, j);
  }
  auto pa = a.node(), pb = b.node();
  return make(
      m, n, std::move(out), {pa, pb},
      [pa, pb, m, na, nb, n](Node& self) {
        if (pa->requires_grad) {
          ensure_grad(*pa);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < na; ++j)
              pa->grad[std::size_t(i) * na + j] += self.grad[std::size_t(i) * n + j];
        }
        if (pb->requires_grad) {
          ensure_grad(*pb);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < nb; ++j)
              pb->grad[std::size_t(i) * nb + j] += self.grad[std::size_t(i) * n + na + j];
        }
      },
      "concat_cols");
}

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("concat_rows: column counts differ");
  const int n = a.cols(), ma = a.rows(), mb = b.rows();
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.data().begin(), a.data().end());
  out.insert(out.end(), b.data().begin(), b.data().end());
  auto pa = a.node(), pb = b.node();
  return make(
      ma + mb, n, std::move(out), {pa, pb},
      [pa, pb, ma, mb, n](Node& self) {
        const std::size_t asz = std::size_t(ma) * n;
        if (pa->requires_grad) {
          ensure_grad(*pa);
          for (std::size_t i = 0; i < asz; ++i) pa->grad[i] += self.grad[i];
        }
        if (pb->requires_grad) {
          ensure_grad(*pb);
          for (std::size_t i = 0; i < std::size_t(mb) * n; ++i)
            pb->grad[i] += self.grad[asz + i];
        }
      },
      "concat_rows");
}

Tensor slice_cols(const Tensor& a, int c0, int c1) {
  if (c0 < 0 || c1 > a.cols() || c0 >= c1) throw std::invalid_argument("slice_cols: bad range");
  const int m = a.rows(), n = a.cols(), w = c1 - c0;
  std::vector<double> out(std::size_t(m) * w);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < w; ++j) out[std::size_t(i) * w + j] = a.at(i, c0 + j);
  auto pa = a.node();
  return make(
      m, w, std::move(out), {pa},
      [pa, m, n, w, c0](Node& self) {
        ensure_grad(*pa);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < w; ++j)
            pa->grad[std::size_t(i) * n + c0 + j] += self.grad[std::size_t(i) * w + j];
      },
      "slice_cols");
}

Tensor relu(const Tensor& a) {
  return elementwise(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return elementwise(
      a, "sigmoid",
      [](double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh_op(const Tensor& a) {
  return elementwise(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor artanh_op(const Tensor& a) {
  return elementwise(
      a, "artanh",
      [](double x) { return std::atanh(std::clamp(x, -(1.0 - kArtanhClamp), 1.0 - kArtanhClamp)); },
      [](double x, double) {
        const double z = std::clamp(x, -(1.0 - kArtanhClamp), 1.0 - kArtanhClamp);
        return 1.0 / (1.0 - z * z);
      });
}

Tensor sqrt_op(const Tensor& a) {
  return elementwise(
      a, "sqrt", [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / std::max(y, 1e-154); });
}

Tensor cosh_op(const Tensor& a) {
  return elementwise(
      a, "cosh", [](double x) { return std::cosh(x); },
      [](double x, double) { return std::sinh(x); });
}

Tensor sinh_op(const Tensor& a) {
  return elementwise(
      a, "sinh", [](double x) { return std::sinh(x); },
      [](double x, double) { return std::cosh(x); });
}

Tensor acosh_op(const Tensor& a) {
  return elementwise(
      a, "acosh", [](double x) { return std::acosh(std::max(x, 1.0)); },
      [](double x, double) {
        const double z = std::max(x, 1.0 + 1e-12);
        return 1.0 / std::sqrt(z * z - 1.0);
      });
}

Tensor row_sum(const Tensor& a) {
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[i] += a.at(i, j);
  auto pa = a.node();
  return make(
      m, 1, std::move(out), {pa},
      [pa, m, n](Node& self) {
        ensure_grad(*pa);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < n; ++j) pa->grad[std::size_t(i) * n + j] += self.grad[i];
      },
      "row_sum");
}

Tensor row_dot(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "row_dot");
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[i] += a.at(i, j) * b.at(i, j);
  auto pa = a.node(), pb = b.node();
  return make(
      m, 1, std::move(out), {pa, pb},
      [pa, pb, m, n](Node& self) {
        for (int i = 0; i < m; ++i) {
          const double g = self.grad[i];
          for (int j = 0; j < n; ++j) {
            const std::size_t idx = std::size_t(i) * n + j;
            if (pa->requires_grad) {
              ensure_grad(*pa);
              pa->grad[idx] += g * pb->val[idx];
            }
            if (pb->requires_grad) {
              ensure_grad(*pb);
              pb->grad[idx] += g * pa->val[idx];
            }
          }
        }
      },
      "row_dot");
}

Tensor mul_col(const Tensor& a, const Tensor& c) {
  if (c.rows() != a.rows() || c.cols() != 1)
    throw std::invalid_argument("mul_col: c must be rows(a) x 1");
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(a.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[std::size_t(i) * n + j] = a.at(i, j) * c.data()[i];
  auto pa = a.node(), pc = c.node();
  return make(
      m, n, std::move(out), {pa, pc},
      [pa, pc, m, n](Node& self) {
        if (pa->requires_grad) {
          ensure_grad(*pa);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
              pa->grad[std::size_t(i) * n + j] += self.grad[std::size_t(i) * n + j] * pc->val[i];
        }
        if (pc->requires_grad) {
          ensure_grad(*pc);
          for (int i = 0; i < m; ++i) {
            double g = 0.0;
            for (int j = 0; j < n; ++j)
              g += self.grad[std::size_t(i) * n + j] * pa->val[std::size_t(i) * n + j];
            pc->grad[i] += g;
          }
        }
      },
      "mul_col");
}

Tensor div_col(const Tensor& a, const Tensor& c) {
  if (c.rows() != a.rows() || c.cols() != 1)
    throw std::invalid_argument("div_col: c must be rows(a) x 1");
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(a.size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[std::size_t(i) * n + j] = a.at(i, j) / c.data()[i];
  auto pa = a.node(), pc = c.node();
  return make(
      m, n, std::move(out), {pa, pc},
      [pa, pc, m, n](Node& self) {
        if (pa->requires_grad) {
          ensure_grad(*pa);
          for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
              pa->grad[std::size_t(i) * n + j] += self.grad[std::size_t(i) * n + j] / pc->val[i];
        }
        if (pc->requires_grad) {
          ensure_grad(*pc);
          for (int i = 0; i < m; ++i) {
            double g = 0.0;
            for (int j = 0; j < n; ++j)
              g += self.grad[std::size_t(i) * n + j] * self.val[std::size_t(i) * n + j];
            pc->grad[i] -= g / pc->val[i];
          }
        }
      },
      "div_col");
}

Tensor row_mean(const Tensor& a) {
  if (a.rows() < 1) throw std::invalid_argument("row_mean: empty tensor");
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[j] += a.at(i, j) / m;
  auto pa = a.node();
  return make(
      1, n, std::move(out), {pa},
      [pa, m, n](Node& self) {
        ensure_grad(*pa);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < n; ++j) pa->grad[std::size_t(i) * n + j] += self.grad[j] / m;
      },
      "row_mean");
}

Tensor sum_all(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  auto pa = a.node();
  return make(
      1, 1, {s}, {pa},
      [pa](Node& self) {
        ensure_grad(*pa);
        for (double& g : pa->grad) g += self.grad[0];
      },
      "sum_all");
}

Tensor mean_all(const Tensor& a) {
  if (a.size() == 0) throw std::invalid_argument("mean_all: empty tensor");
  return scale(sum_all(a), 1.0 / double(a.size()));
}

Tensor softmax_rows(const Tensor& a) {
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(a.size());
  for (int i = 0; i < m; ++i) {
    double mx = a.at(i, 0);
    for (int j = 1; j < n; ++j) mx = std::max(mx, a.at(i, j));
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      out[std::size_t(i) * n + j] = std::exp(a.at(i, j) - mx);
      s += out[std::size_t(i) * n + j];
    }
    for (int j = 0; j < n; ++j) out[std::size_t(i) * n + j] /= s;
  }
  auto pa = a.node();
  return make(
      m, n, std::move(out), {pa},
      [pa, m, n](Node& self) {
        ensure_grad(*pa);
        for (int i = 0; i < m; ++i) {
          double dot = 0.0;
          for (int j = 0; j < n; ++j)
            dot += self.grad[std::size_t(i) * n + j] * self.val[std::size_t(i) * n + j];
          for (int j = 0; j < n; ++j) {
            const std::size_t idx = std::size_t(i) * n + j;
            pa->grad[idx] += self.val[idx] * (self.grad[idx] - dot);
          }
        }
      },
      "softmax_rows");
}

Tensor gather_rows(const Tensor& a, const std::vector<int>& idx) {
  const int n = a.cols();
  std::vector<double> out(idx.size() * std::size_t(n));
  for (std::size_t e = 0; e < idx.size(); ++e) {
    if (idx[e] < 0 || idx[e] >= a.rows()) throw std::invalid_argument("gather_rows: index out of range");
    for (int j = 0; j < n; ++j) out[e * n + j] = a.at(idx[e], j);
  }
  auto pa = a.node();
  auto ids = idx;
  return make(
      int(idx.size()), n, std::move(out), {pa},
      [pa, ids, n](Node& self) {
        ensure_grad(*pa);
        for (std::size_t e = 0; e < ids.size(); ++e)
          for (int j = 0; j < n; ++j)
            pa->grad[std::size_t(ids[e]) * n + j] += self.grad[e * n + j];
      },
      "gather_rows");
}

Tensor scatter_sum_rows(const Tensor& a, const std::vector<int>& idx, int n_rows) {
  if (idx.size() != std::size_t(a.rows()))
    throw std::invalid_argument("scatter_sum_rows: index length must equal rows(a)");
  const int n = a.cols();
  std::vector<double> out(std::size_t(n_rows) * n, 0.0);
  for (std::size_t e = 0; e < idx.size(); ++e) {
    if (idx[e] < 0 || idx[e] >= n_rows)
      throw std::invalid_argument("scatter_sum_rows: index out of range");
    for (int j = 0; j < n; ++j) out[std::size_t(idx[e]) * n + j] += a.at(int(e), j);
  }
  auto pa = a.node();
  auto ids = idx;
  return make(
      n_rows, n, std::move(out), {pa},
      [pa, ids, n](Node& self) {
        ensure_grad(*pa);
        for (std::size_t e = 0; e < ids.size(); ++e)
          for (int j = 0; j < n; ++j)
            pa->grad[e * n + j] += self.grad[std::size_t(ids[e]) * n + j];
      },
      "scatter_sum_rows");
}

Tensor clip_rows_norm(const Tensor& a, double max_norm) {
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(a.size());
  std::vector<double> norms(m);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += a.at(i, j) * a.at(i, j);
    norms[i] = std::sqrt(s);
    const double c = norms[i] > max_norm ? max_norm / norms[i] : 1.0;
    for (int j = 0; j < n; ++j) out[std::size_t(i) * n + j] = c * a.at(i, j);
  }
  auto pa = a.node();
  return make(
      m, n, std::move(out), {pa},
      [pa, norms, max_norm, m, n](Node& self) {
        ensure_grad(*pa);
        for (int i = 0; i < m; ++i) {
          if (norms[i] <= max_norm) {
            for (int j = 0; j < n; ++j)
              pa->grad[std::size_t(i) * n + j] += self.grad[std::size_t(i) * n + j];
          } else {
            // y = c * x / |x|: dx = (c/|x|) (I - xhat xhat^T) dy
            const double c = max_norm / norms[i];
            double dot = 0.0;
            for (int j = 0; j < n; ++j)
              dot += self.grad[std::size_t(i) * n + j] * pa->val[std::size_t(i) * n + j];
            dot /= norms[i] * norms[i];
            for (int j = 0; j < n; ++j)
              pa->grad[std::size_t(i) * n + j] +=
                  c * (self.grad[std::size_t(i) * n + j] - dot * pa->val[std::size_t(i) * n + j]);
          }
        }
      },
      "clip_rows_norm");
}

Tensor hyperboloid_fix(const Tensor& a, double k) {
  if (a.cols() < 2) throw std::invalid_argument("hyperboloid_fix: need at least 2 columns");
  const int m = a.rows(), n = a.cols();
  std::vector<double> out(a.data());
  for (int i = 0; i < m; ++i) {
    double s = k;
    for (int j = 1; j < n; ++j) s += a.at(i, j) * a.at(i, j);
    out[std::size_t(i) * n] = std::sqrt(s);
  }
  auto pa = a.node();
  return make(
      m, n, std::move(out), {pa},
      [pa, m, n](Node& self) {
        ensure_grad(*pa);
        for (int i = 0; i < m; ++i) {
          const double g0 = self.grad[std::size_t(i) * n];
          const double x0 = self.val[std::size_t(i) * n];
          for (int j = 1; j < n; ++j) {
            const std::size_t idx = std::size_t(i) * n + j;
            pa->grad[idx] += self.grad[idx] + g0 * pa->val[idx] / x0;
          }
        }
      },
      "hyperboloid_fix");
}

Tensor cross_entropy(const Tensor& probs, const std::vector<int>& labels,
                     const std::vector<int>& mask) {
  const int m = probs.rows(), c = probs.cols();
  if (labels.size() != std::size_t(m))
    throw std::invalid_argument("cross_entropy: labels length must equal rows");
  if (mask.empty()) throw std::invalid_argument("cross_entropy: empty mask");
  for (int i : mask) {
    if (i < 0 || i >= m) throw std::invalid_argument("cross_entropy: mask row out of range");
    if (labels[i] < 0 || labels[i] >= c)
      throw std::invalid_argument("cross_entropy: label out of range");
  }
  double loss = 0.0;
  for (int i : mask) loss -= std::log(std::max(probs.at(i, labels[i]), 1e-300));
  loss /= double(mask.size());
  auto pp = probs.node();
  auto lab = labels;
  auto msk = mask;
  return make(
      1, 1, {loss}, {pp},
      [pp, lab, msk, c](Node& self) {
        ensure_grad(*pp);
        const double g = self.grad[0] / double(msk.size());
        for (int i : msk) {
          const std::size_t idx = std::size_t(i) * c + lab[i];
          pp->grad[idx] -= g / std::max(pp->val[idx], 1e-300);
        }
      },
      "cross_entropy");
}

Tensor bce_logits(const Tensor& scores, const Tensor& targets) {
  check_same_shape(scores, targets, "bce_logits");
  for (double t : targets.data())
    if (t != 0.0 && t != 1.0) throw std::invalid_argument("bce_logits: targets must be 0 or 1");
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores.data()[i], t = targets.data()[i];
    loss += std::max(s, 0.0) - s * t + std::log1p(std::exp(-std::abs(s)));
  }
  loss /= double(scores.size());
  auto ps = scores.node();
  auto pt = targets.node();
  return make(
      1, 1, {loss}, {ps, pt},
      [ps, pt](Node& self) {
        if (!ps->requires_grad) return;
        ensure_grad(*ps);
        const double g = self.grad[0] / double(ps->val.size());
        for (std::size_t i = 0; i < ps->val.size(); ++i) {
          const double s = ps->val[i];
          const double sig = s >= 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
          ps->grad[i] += g * (sig - pt->val[i]);
        }
      },
      "bce_logits");
}

}  // namespace hsed
