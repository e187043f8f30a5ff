#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vopt/errors.hpp"

namespace vopt {

inline constexpr double kMembershipTol = 1e-9;

// Pointed, full-dimensional polyhedral cone kept in both representations:
//   C = cone(generators) = { x : h.x >= 0 for all h in halfspace_normals }.
// Both lists are minimal (extreme rays of C resp. of its polar), entries are
// unit length, and each list is sorted lexicographically, so equal cones have
// identical canonical data. Instances are immutable after construction and
// safe to share across threads.
class PolyhedralCone {
 public:
  static PolyhedralCone orthant(int dim);
  // Throws DegenerateConeError unless cone(generators) is pointed with
  // nonempty interior. Generators are normalized and deduplicated first.
  static PolyhedralCone from_generators(std::vector<Eigen::VectorXd> generators);
  // Same contract for { x : n.x >= 0 for all n in normals }.
  static PolyhedralCone from_halfspaces(std::vector<Eigen::VectorXd> normals);

  int ambient_dim() const { return dim_; }
  const std::vector<Eigen::VectorXd>& generators() const { return generators_; }
  const std::vector<Eigen::VectorXd>& halfspace_normals() const { return halfspace_normals_; }

  // h.x >= -tol for every stored normal.
  bool contains(const Eigen::VectorXd& x, double tol = kMembershipTol) const;
  // h.x > tol for every stored normal. The normals are exactly the extreme
  // rays of the polar cone, so this is the finite strict-positivity test for
  // interior membership.
  bool interior_contains(const Eigen::VectorXd& x, double tol = kMembershipTol) const;

  // True when the generators are a signed permutation-free standard basis,
  // i.e. the cone is the nonnegative orthant. Used for canonical output.
  bool is_orthant(double tol = 1e-12) const;

 private:
  PolyhedralCone(int dim, std::vector<Eigen::VectorXd> generators,
                 std::vector<Eigen::VectorXd> normals);

  friend PolyhedralCone polar(const PolyhedralCone& cone);

  int dim_;
  std::vector<Eigen::VectorXd> generators_;
  std::vector<Eigen::VectorXd> halfspace_normals_;
};

// Polar cone C* = { y : y.x >= 0 for all x in C }. For the sign convention
// used throughout (dual multipliers pair nonnegatively with the cone), the
// polar of a pointed full-dimensional cone is again pointed and
// full-dimensional, and polar(polar(C)) == C canonically.
using PolarCone = PolyhedralCone;
PolarCone polar(const PolyhedralCone& cone);

// Extreme rays of { x : n.x >= 0 for all n in normals } by brute-force
// enumeration of (d-1)-element normal subsets with one-dimensional kernel.
// Throws DegenerateConeError when the normals do not span (cone not pointed).
// Intended for small dimensions (cost grows as C(|normals|, d-1)).
std::vector<Eigen::VectorXd> extreme_rays(const std::vector<Eigen::VectorXd>& normals);

namespace detail {
// Core enumeration without the pointedness gate; returns whatever extreme
// rays exist (empty for the trivial cone {0}).
std::vector<Eigen::VectorXd> enumerate_extreme_rays(int dim,
                                                    const std::vector<Eigen::VectorXd>& normals,
                                                    double tol = kMembershipTol);
int rank_of(const std::vector<Eigen::VectorXd>& vectors, int dim, double tol = kMembershipTol);
bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
}  // namespace detail

// True when the two families describe the same set of rays up to positive
// scaling and permutation (entries matched pairwise within tol after
// normalization). Test helper, also used for canonical round-trip checks.
bool rays_match(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b,
                double tol = 1e-9);

}  // namespace vopt
