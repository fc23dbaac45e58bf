#include "hsed/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsed::manifold {

namespace {

constexpr double kBallMargin = 1e-5;        // boundary margin used by projection
constexpr double kArtanhClamp = 1e-15;      // artanh arguments clamped to <= 1 - this

double sq_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double safe_acosh(double z) { return std::acosh(std::max(z, 1.0)); }

double safe_artanh(double z) {
  return std::atanh(std::clamp(z, -(1.0 - kArtanhClamp), 1.0 - kArtanhClamp));
}

void check_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("manifold: non-finite input");
}

void check_curvature(const Spec& spec) {
  if (spec.kind != Kind::Euclidean && !(spec.curvature_k > 0.0))
    throw std::invalid_argument("manifold: curvature_k must be positive");
}

}  // namespace

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::PoincareBall: return "poincare";
    case Kind::Hyperboloid: return "hyperboloid";
    case Kind::Euclidean: return "euclidean";
  }
  return "?";
}

Kind kind_from_name(const std::string& name) {
  if (name == "poincare") return Kind::PoincareBall;
  if (name == "hyperboloid") return Kind::Hyperboloid;
  if (name == "euclidean") return Kind::Euclidean;
  throw std::invalid_argument("unknown manifold kind: " + name);
}

double minkowski_inner(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("minkowski_inner: dimension mismatch");
  if (x.size() < 2) throw std::invalid_argument("minkowski_inner: dimension must be >= 2");
  double s = -x[0] * y[0];
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

bool is_poincare_point(std::span<const double> x, double k) {
  return k * sq_norm(x) < 1.0;
}

bool is_hyperboloid_point(std::span<const double> x, double k, double tol) {
  if (x.size() < 2 || x[0] <= 0.0) return false;
  return std::abs(minkowski_inner(x, x) + k) <= tol;
}

void check_point(std::span<const double> x, const Spec& spec) {
  check_finite(x);
  check_curvature(spec);
  switch (spec.kind) {
    case Kind::PoincareBall:
      if (!is_poincare_point(x, spec.curvature_k))
        throw std::domain_error("point not inside the Poincare ball");
      break;
    case Kind::Hyperboloid:
      if (!is_hyperboloid_point(x, spec.curvature_k))
        throw std::domain_error("point not on the hyperboloid sheet");
      break;
    case Kind::Euclidean:
      break;
  }
}

double poincare_distance(std::span<const double> a, std::span<const double> b, double k) {
  check_point(a, {Kind::PoincareBall, k});
  check_point(b, {Kind::PoincareBall, k});
  if (a.size() != b.size()) throw std::invalid_argument("poincare_distance: dimension mismatch");
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] - b[i]) * (a[i] - b[i]);
  const double den = (1.0 - k * sq_norm(a)) * (1.0 - k * sq_norm(b));
  // arcosh(1 + x) = log1p(x + sqrt(x (x + 2))), stable near coincident points
  // where acosh itself would amplify rounding to ~sqrt(eps).
  const double x = std::max(2.0 * k * diff / den, 0.0);
  return std::log1p(x + std::sqrt(x * (x + 2.0))) / std::sqrt(k);
}

double hyperboloid_distance(std::span<const double> a, std::span<const double> b, double k) {
  check_point(a, {Kind::Hyperboloid, k});
  check_point(b, {Kind::Hyperboloid, k});
  // <a-b, a-b>_M = 4K sinh^2(d / (2 sqrt(K))): built from coordinate
  // differences, so it avoids the catastrophic cancellation of
  // arcosh(-<a,b>/K) when the points nearly coincide.
  Vec d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double m = std::max(minkowski_inner(d, d), 0.0);
  const double sk = std::sqrt(k);
  return 2.0 * sk * std::asinh(std::sqrt(m) / (2.0 * sk));
}

double distance(std::span<const double> a, std::span<const double> b, const Spec& spec) {
  switch (spec.kind) {
    case Kind::PoincareBall: return poincare_distance(a, b, spec.curvature_k);
    case Kind::Hyperboloid: return hyperboloid_distance(a, b, spec.curvature_k);
    case Kind::Euclidean: {
      if (a.size() != b.size()) throw std::invalid_argument("distance: dimension mismatch");
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(s);
    }
  }
  throw std::logic_error("unreachable");
}

Vec origin(std::size_t dim, const Spec& spec) {
  if (spec.kind == Kind::Hyperboloid) {
    Vec o(dim + 1, 0.0);
    o[0] = std::sqrt(spec.curvature_k);
    return o;
  }
  return Vec(dim, 0.0);
}

Vec exp_map_origin(std::span<const double> v, const Spec& spec) {
  check_finite(v);
  check_curvature(spec);
  const double k = spec.curvature_k;
  switch (spec.kind) {
    case Kind::Euclidean:
      return Vec(v.begin(), v.end());
    case Kind::PoincareBall: {
      const double r = std::sqrt(sq_norm(v));
      Vec out(v.size(), 0.0);
      if (r > 0.0) {
        const double c = std::tanh(std::sqrt(k) * r) / (std::sqrt(k) * r);
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
      }
      return out;
    }
    case Kind::Hyperboloid: {
      // Tangent at the origin: leading coordinate must vanish.
      if (v.size() < 2) throw std::invalid_argument("exp_map_origin: dimension must be >= 2");
      if (std::abs(v[0]) > 1e-9)
        throw std::invalid_argument("exp_map_origin: vector not tangent at the origin");
      double r2 = 0.0;
      for (std::size_t i = 1; i < v.size(); ++i) r2 += v[i] * v[i];
      const double r = std::sqrt(r2);
      Vec out(v.size(), 0.0);
      const double sk = std::sqrt(k);
      out[0] = sk * std::cosh(r / sk);
      if (r > 0.0) {
        const double c = sk * std::sinh(r / sk) / r;
        for (std::size_t i = 1; i < v.size(); ++i) out[i] = c * v[i];
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

Vec log_map_origin(std::span<const double> x, const Spec& spec) {
  check_point(x, spec);
  const double k = spec.curvature_k;
  switch (spec.kind) {
    case Kind::Euclidean:
      return Vec(x.begin(), x.end());
    case Kind::PoincareBall: {
      const double r = std::sqrt(sq_norm(x));
      Vec out(x.size(), 0.0);
      if (r > 0.0) {
        const double c = safe_artanh(std::sqrt(k) * r) / (std::sqrt(k) * r);
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i];
      }
      return out;
    }
    case Kind::Hyperboloid: {
      const double sk = std::sqrt(k);
      double r2 = 0.0;
      for (std::size_t i = 1; i < x.size(); ++i) r2 += x[i] * x[i];
      const double rs = std::sqrt(r2);
      Vec out(x.size(), 0.0);
      if (rs > 0.0) {
        const double t = sk * safe_acosh(x[0] / sk);
        for (std::size_t i = 1; i < x.size(); ++i) out[i] = t * x[i] / rs;
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

Vec mobius_add(std::span<const double> x, std::span<const double> y, double k) {
  check_point(x, {Kind::PoincareBall, k});
  check_point(y, {Kind::PoincareBall, k});
  if (x.size() != y.size()) throw std::invalid_argument("mobius_add: dimension mismatch");
  double xy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) xy += x[i] * y[i];
  const double x2 = sq_norm(x), y2 = sq_norm(y);
  const double cx = 1.0 + 2.0 * k * xy + k * y2;
  const double cy = 1.0 - k * x2;
  const double den = 1.0 + 2.0 * k * xy + k * k * x2 * y2;
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (cx * x[i] + cy * y[i]) / den;
  return out;
}

Vec exp_map_at(std::span<const double> x, std::span<const double> v, const Spec& spec) {
  check_point(x, spec);
  check_finite(v);
  const double k = spec.curvature_k;
  switch (spec.kind) {
    case Kind::Euclidean: {
      Vec out(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + v[i];
      return out;
    }
    case Kind::PoincareBall: {
      const double r = std::sqrt(sq_norm(v));
      if (r == 0.0) return Vec(x.begin(), x.end());
      const double lam = 2.0 / (1.0 - k * sq_norm(x));
      const double c = std::tanh(std::sqrt(k) * lam * r / 2.0) / (std::sqrt(k) * r);
      Vec step(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) step[i] = c * v[i];
      return mobius_add(x, step, k);
    }
    case Kind::Hyperboloid: {
      if (v.size() != x.size()) throw std::invalid_argument("exp_map_at: dimension mismatch");
      if (std::abs(minkowski_inner(x, v)) > 1e-6)
        throw std::invalid_argument("exp_map_at: vector not tangent at base point");
      const double vv = minkowski_inner(v, v);
      const double r = std::sqrt(std::max(vv, 0.0));
      if (r == 0.0) return Vec(x.begin(), x.end());
      const double sk = std::sqrt(k);
      const double ch = std::cosh(r / sk), sh = std::sinh(r / sk);
      Vec out(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = ch * x[i] + sk * sh * v[i] / r;
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

Vec log_map_at(std::span<const double> x, std::span<const double> y, const Spec& spec) {
  check_point(x, spec);
  check_point(y, spec);
  const double k = spec.curvature_k;
  switch (spec.kind) {
    case Kind::Euclidean: {
      Vec out(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = y[i] - x[i];
      return out;
    }
    case Kind::PoincareBall: {
      Vec nx(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) nx[i] = -x[i];
      Vec w = mobius_add(nx, y, k);
      const double r = std::sqrt(sq_norm(w));
      Vec out(x.size(), 0.0);
      if (r > 0.0) {
        const double lam = 2.0 / (1.0 - k * sq_norm(x));
        const double c = (2.0 / (std::sqrt(k) * lam)) * safe_artanh(std::sqrt(k) * r) / r;
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * w[i];
      }
      return out;
    }
    case Kind::Hyperboloid: {
      const double xy = minkowski_inner(x, y);
      Vec u(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) u[i] = y[i] + (xy / k) * x[i];
      const double un = std::sqrt(std::max(minkowski_inner(u, u), 0.0));
      Vec out(x.size(), 0.0);
      if (un > 0.0) {
        const double d = std::sqrt(k) * safe_acosh(-xy / k);
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = d * u[i] / un;
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

Vec convert(std::span<const double> x, const Spec& from, const Spec& to) {
  check_curvature(from);
  check_curvature(to);
  if (from.kind == Kind::Euclidean || to.kind == Kind::Euclidean)
    throw std::invalid_argument("convert: only defined between the hyperbolic models");
  if (std::abs(from.curvature_k - to.curvature_k) > 0.0)
    throw std::invalid_argument("convert: curvature mismatch");
  check_point(x, from);
  const double k = from.curvature_k;
  const double sk = std::sqrt(k);
  if (from.kind == to.kind) return Vec(x.begin(), x.end());
  if (from.kind == Kind::Hyperboloid) {
    // x -> spatial part scaled through the sheet bottom.
    Vec out(x.size() - 1);
    const double den = sk * (x[0] + sk);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) out[i] = x[i + 1] / den;
    return out;
  }
  // ball -> hyperboloid
  const double r = std::sqrt(sq_norm(x));
  Vec out(x.size() + 1, 0.0);
  const double t = 2.0 * safe_artanh(sk * r);
  out[0] = sk * std::cosh(t);
  if (r > 0.0) {
    const double c = sk * std::sinh(t) / r;
    for (std::size_t i = 0; i < x.size(); ++i) out[i + 1] = c * x[i];
  }
  return out;
}

Vec project_to_manifold(std::span<const double> x, const Spec& spec) {
  check_finite(x);
  check_curvature(spec);
  const double k = spec.curvature_k;
  switch (spec.kind) {
    case Kind::Euclidean:
      return Vec(x.begin(), x.end());
    case Kind::PoincareBall: {
      const double max_norm = (1.0 - kBallMargin) / std::sqrt(k);
      const double r = std::sqrt(sq_norm(x));
      Vec out(x.begin(), x.end());
      if (r > max_norm) {
        const double c = max_norm / r;
        for (double& v : out) v *= c;
      }
      return out;
    }
    case Kind::Hyperboloid: {
      Vec out(x.begin(), x.end());
      double s = k;
      for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
      out[0] = std::sqrt(s);
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace hsed::manifold
