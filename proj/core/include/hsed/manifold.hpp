#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hsed::manifold {

enum class Kind { PoincareBall, Hyperboloid, Euclidean };

// Which model of hyperbolic space, with curvature magnitude K (curvature -K).
// K is ignored for the Euclidean control.
struct Spec {
  Kind kind = Kind::PoincareBall;
  double curvature_k = 1.0;
};

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& name);

using Vec = std::vector<double>;

// -x0*y0 + x1*y1 + ... + xn*yn
double minkowski_inner(std::span<const double> x, std::span<const double> y);

// Validation. Poincare points live strictly inside the ball K*|x|^2 < 1;
// hyperboloid points satisfy <x,x>_M = -K (tol 1e-9) on the upper sheet.
bool is_poincare_point(std::span<const double> x, double k);
bool is_hyperboloid_point(std::span<const double> x, double k, double tol = 1e-9);
void check_point(std::span<const double> x, const Spec& spec);

double poincare_distance(std::span<const double> a, std::span<const double> b, double k);
double hyperboloid_distance(std::span<const double> a, std::span<const double> b, double k);
double distance(std::span<const double> a, std::span<const double> b, const Spec& spec);

// Origin of the model: zero vector (Poincare/Euclidean), (sqrt(K), 0...) (hyperboloid).
Vec origin(std::size_t dim, const Spec& spec);

// Tangent dimension d maps to ambient dimension d (Poincare/Euclidean) or d+1
// (hyperboloid, tangent vectors at the origin carry a leading zero coordinate).
Vec exp_map_origin(std::span<const double> v, const Spec& spec);
Vec log_map_origin(std::span<const double> x, const Spec& spec);

// Gyrovector addition on the ball; reduces to + for the Euclidean control.
Vec mobius_add(std::span<const double> x, std::span<const double> y, double k);

Vec exp_map_at(std::span<const double> x, std::span<const double> v, const Spec& spec);
Vec log_map_at(std::span<const double> x, std::span<const double> y, const Spec& spec);

// Diffeomorphism between the two hyperbolic models at equal K
// (stereographic projection through the bottom of the sheet).
Vec convert(std::span<const double> x, const Spec& from, const Spec& to);

// Nearest valid point: ball points rescaled to norm <= (1-eps)/sqrt(K),
// hyperboloid x0 recomputed from the spatial part. Total on finite input.
Vec project_to_manifold(std::span<const double> x, const Spec& spec);

}  // namespace hsed::manifold
