#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "hsed/manifold.hpp"

using namespace hsed::manifold;

namespace {

const Spec ball1{Kind::PoincareBall, 1.0};
const Spec hyp1{Kind::Hyperboloid, 1.0};

std::vector<double> rand_tangent(std::mt19937_64& rng, std::size_t dim, double max_norm) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, max_norm);
  std::vector<double> v(dim);
  double n = 0.0;
  for (double& x : v) {
    x = g(rng);
    n += x * x;
  }
  n = std::sqrt(n);
  const double r = u(rng);
  for (double& x : v) x = n > 0.0 ? x * r / n : 0.0;
  return v;
}

// Tangent at the hyperboloid origin carries a leading zero coordinate.
std::vector<double> lift0(const std::vector<double>& v) {
  std::vector<double> out(v.size() + 1, 0.0);
  std::copy(v.begin(), v.end(), out.begin() + 1);
  return out;
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("minkowski inner product") {
  CHECK(minkowski_inner(std::vector<double>{1, 0}, std::vector<double>{1, 0}) == -1.0);
  CHECK(minkowski_inner(std::vector<double>{2, 1}, std::vector<double>{2, 1}) == -3.0);
  CHECK(minkowski_inner(std::vector<double>{1.2, 0.3, 0.4}, std::vector<double>{0.9, -0.1, 0.2}) ==
        doctest::Approx(-1.03).epsilon(1e-15));
  CHECK_THROWS_AS(minkowski_inner(std::vector<double>{1, 0}, std::vector<double>{1, 0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(minkowski_inner(std::vector<double>{1}, std::vector<double>{1}),
                  std::invalid_argument);
}

TEST_CASE("poincare distance closed forms") {
  const std::vector<double> o{0, 0}, a{0.5, 0};
  CHECK(poincare_distance(o, o, 1.0) == 0.0);
  CHECK(std::abs(poincare_distance(o, a, 1.0) - std::log(3.0)) <= 1e-12);
  CHECK(poincare_distance(a, o, 1.0) == poincare_distance(o, a, 1.0));
  CHECK_THROWS_AS(poincare_distance(std::vector<double>{1.0, 0.0}, o, 1.0), std::domain_error);
}

TEST_CASE("hyperboloid distance closed forms") {
  const std::vector<double> o{1, 0};
  const std::vector<double> a{std::cosh(1.0), std::sinh(1.0)};
  const std::vector<double> b{std::cosh(2.0), -std::sinh(2.0)};
  CHECK(hyperboloid_distance(o, o, 1.0) == 0.0);
  CHECK(std::abs(hyperboloid_distance(a, o, 1.0) - 1.0) <= 1e-12);
  CHECK(std::abs(hyperboloid_distance(a, b, 1.0) - 3.0) <= 1e-12);
  CHECK_THROWS_AS(hyperboloid_distance(std::vector<double>{2, 0}, o, 1.0), std::domain_error);
}

TEST_CASE("exp map origin") {
  CHECK(exp_map_origin(std::vector<double>{0, 0}, ball1) == std::vector<double>{0, 0});
  CHECK(exp_map_origin(std::vector<double>{0, 0, 0}, hyp1) == std::vector<double>{1, 0, 0});
  const auto p = exp_map_origin(std::vector<double>{0.3, 0.4}, ball1);
  CHECK(p[0] == doctest::Approx(std::tanh(0.5) * 0.6).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(std::tanh(0.5) * 0.8).epsilon(1e-12));
  CHECK_THROWS_AS(exp_map_origin(std::vector<double>{0.5, 0.1, 0.1}, hyp1), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(exp_map_origin(std::vector<double>{inf, 0.0}, ball1), std::invalid_argument);
}

TEST_CASE("log map origin inverts exp") {
  CHECK(log_map_origin(std::vector<double>{0, 0}, ball1) == std::vector<double>{0, 0});
  const auto p = exp_map_origin(std::vector<double>{0.3, 0.4}, ball1);
  const auto v = log_map_origin(p, ball1);
  CHECK(v[0] == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(v[1] == doctest::Approx(0.4).epsilon(1e-9));
  CHECK_THROWS_AS(log_map_origin(std::vector<double>{1.2, 0.0}, ball1), std::domain_error);
}

TEST_CASE("exp/log roundtrip property, both models, K in {0.5,1,2}") {
  std::mt19937_64 rng(20240501);
  for (double k : {0.5, 1.0, 2.0}) {
    const Spec b{Kind::PoincareBall, k}, h{Kind::Hyperboloid, k};
    for (int i = 0; i < 1000; ++i) {
      const auto v = rand_tangent(rng, 3, 2.0);
      CHECK(linf(log_map_origin(exp_map_origin(v, b), b), v) <= 1e-9);
      const auto vh = lift0(v);
      CHECK(linf(log_map_origin(exp_map_origin(vh, h), h), vh) <= 1e-9);
    }
  }
}

TEST_CASE("distance axioms on sampled triples") {
  std::mt19937_64 rng(7);
  for (double k : {0.5, 1.0, 2.0}) {
    for (auto kind : {Kind::PoincareBall, Kind::Hyperboloid}) {
      const Spec s{kind, k};
      for (int i = 0; i < 1000; ++i) {
        const auto a = exp_map_origin(kind == Kind::Hyperboloid ? lift0(rand_tangent(rng, 3, 2.0))
                                                                : rand_tangent(rng, 3, 2.0),
                                      s);
        const auto b = exp_map_origin(kind == Kind::Hyperboloid ? lift0(rand_tangent(rng, 3, 2.0))
                                                                : rand_tangent(rng, 3, 2.0),
                                      s);
        const auto c = exp_map_origin(kind == Kind::Hyperboloid ? lift0(rand_tangent(rng, 3, 2.0))
                                                                : rand_tangent(rng, 3, 2.0),
                                      s);
        CHECK(std::abs(distance(a, b, s) - distance(b, a, s)) <= 1e-12);
        CHECK(distance(a, a, s) <= 1e-12);
        CHECK(distance(a, c, s) <= distance(a, b, s) + distance(b, c, s) + 1e-9);
      }
    }
  }
}

TEST_CASE("mobius addition") {
  const std::vector<double> o{0, 0}, y{0.3, 0.1}, x{0.2, 0.5};
  CHECK(mobius_add(o, y, 1.0) == y);
  std::vector<double> nx{-x[0], -x[1]};
  const auto z = mobius_add(x, nx, 1.0);
  CHECK(std::abs(z[0]) <= 1e-12);
  CHECK(std::abs(z[1]) <= 1e-12);
  const auto w = mobius_add(std::vector<double>{0.1, 0}, std::vector<double>{0.2, 0}, 1.0);
  CHECK(w[0] == doctest::Approx(0.3 / 1.02).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.0));
}

TEST_CASE("base-point exp/log maps") {
  const std::vector<double> x{0.2, -0.1};
  CHECK(exp_map_at(x, std::vector<double>{0, 0}, ball1) == x);

  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const auto base = exp_map_origin(rand_tangent(rng, 2, 1.0), ball1);
    const auto v = rand_tangent(rng, 2, 0.7);
    const auto y = exp_map_at(base, v, ball1);
    CHECK(linf(log_map_at(base, y, ball1), v) <= 1e-8);
  }

  // Closed-form geodesic on the hyperboloid.
  const std::vector<double> ho{1, 0}, hv{0, 1};
  const auto hy = exp_map_at(ho, hv, hyp1);
  CHECK(hy[0] == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
  CHECK(hy[1] == doctest::Approx(std::sinh(1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(exp_map_at(ho, std::vector<double>{0.5, 0.0}, hyp1), std::invalid_argument);
}

TEST_CASE("geodesic speed matches Minkowski tangent norm") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto x = exp_map_origin(lift0(rand_tangent(rng, 3, 1.5)), hyp1);
    // Build a tangent at x: project a random ambient vector onto T_x.
    auto raw = lift0(rand_tangent(rng, 3, 1.0));
    raw[0] = rand_tangent(rng, 1, 1.0)[0];
    const double c = minkowski_inner(x, raw) / minkowski_inner(x, x);
    std::vector<double> v(raw.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = raw[j] - c * x[j];
    const double vn = std::sqrt(std::max(minkowski_inner(v, v), 0.0));
    const auto y = exp_map_at(x, v, hyp1);
    CHECK(std::abs(hyperboloid_distance(x, y, 1.0) - vn) <= 1e-8);
  }
}

TEST_CASE("conversion between the models") {
  CHECK(convert(std::vector<double>{1, 0, 0}, hyp1, ball1) == std::vector<double>{0, 0});
  const auto p = convert(std::vector<double>{std::cosh(1.0), std::sinh(1.0)}, hyp1, ball1);
  CHECK(p[0] == doctest::Approx(std::tanh(0.5)).epsilon(1e-12));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto x = exp_map_origin(lift0(rand_tangent(rng, 3, 2.0)), hyp1);
    const auto back = convert(convert(x, hyp1, ball1), ball1, hyp1);
    CHECK(linf(back, x) <= 1e-10);
    const auto y = exp_map_origin(lift0(rand_tangent(rng, 3, 2.0)), hyp1);
    CHECK(std::abs(hyperboloid_distance(x, y, 1.0) -
                   poincare_distance(convert(x, hyp1, ball1), convert(y, hyp1, ball1), 1.0)) <=
          1e-8);
  }
  CHECK_THROWS_AS(convert(std::vector<double>{1, 0, 0}, hyp1, Spec{Kind::PoincareBall, 2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(convert(std::vector<double>{0, 0}, ball1, Spec{Kind::Euclidean, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("projection to the manifold") {
  const std::vector<double> in{0.1, 0.2};
  CHECK(project_to_manifold(in, ball1) == in);
  const auto p = project_to_manifold(std::vector<double>{2.0, 0.0}, ball1);
  CHECK(p[0] == doctest::Approx(1.0 - 1e-5).epsilon(1e-12));
  const auto h = project_to_manifold(std::vector<double>{0.0, 3.0, 4.0}, hyp1);
  CHECK(h[0] == doctest::Approx(std::sqrt(26.0)).epsilon(1e-12));
  CHECK(is_hyperboloid_point(h, 1.0));
}

TEST_CASE("point validation") {
  CHECK(is_poincare_point(std::vector<double>{0.5, 0.5}, 1.0));
  CHECK_FALSE(is_poincare_point(std::vector<double>{0.8, 0.8}, 1.0));
  CHECK_FALSE(is_poincare_point(std::vector<double>{0.9, 0.0}, 2.0));
  CHECK(is_hyperboloid_point(std::vector<double>{1, 0}, 1.0));
  CHECK_FALSE(is_hyperboloid_point(std::vector<double>{-1, 0}, 1.0));
  CHECK_THROWS_AS(check_point(std::vector<double>{2, 0}, ball1), std::domain_error);
  CHECK_NOTHROW(check_point(std::vector<double>{2, 0}, Spec{Kind::Euclidean, 1.0}));
}

TEST_CASE("origin and names") {
  CHECK(origin(2, ball1) == std::vector<double>{0, 0});
  CHECK(origin(2, hyp1) == std::vector<double>{1, 0, 0});
  const auto o = origin(2, Spec{Kind::Hyperboloid, 4.0});
  CHECK(o[0] == doctest::Approx(2.0));
  CHECK(kind_from_name("poincare") == Kind::PoincareBall);
  CHECK(kind_from_name(kind_name(Kind::Hyperboloid)) == Kind::Hyperboloid);
  CHECK_THROWS_AS(kind_from_name("klein"), std::invalid_argument);
}
