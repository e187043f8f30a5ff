#include "vopt/cone.hpp"

#include <algorithm>
#include <utility>

namespace vopt {

namespace {

// Validates a nonempty family of same-dimension nonzero vectors; returns the
// ambient dimension. Normalizes in place and drops near-duplicates.
int canonicalize_family(std::vector<Eigen::VectorXd>& vectors, const char* what) {
  if (vectors.empty()) throw Error(std::string(what) + ": empty vector family");
  const int dim = static_cast<int>(vectors.front().size());
  if (dim < 1) throw DimensionError(std::string(what) + ": ambient dimension must be positive");
  std::vector<Eigen::VectorXd> kept;
  for (const auto& v : vectors) {
    if (static_cast<int>(v.size()) != dim)
      throw DimensionError(std::string(what) + ": mixed vector dimensions");
    if (!v.allFinite()) throw Error(std::string(what) + ": non-finite entry");
    const double norm = v.norm();
    if (norm < 1e-12) throw Error(std::string(what) + ": zero vector in family");
    Eigen::VectorXd u = v / norm;
    bool dup = false;
    for (const auto& w : kept)
      if ((u - w).lpNorm<Eigen::Infinity>() <= 1e-9) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(std::move(u));
  }
  vectors = std::move(kept);
  return dim;
}

}  // namespace

namespace detail {

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (int i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

int rank_of(const std::vector<Eigen::VectorXd>& vectors, int dim, double tol) {
  if (vectors.empty()) return 0;
  Eigen::MatrixXd m(static_cast<int>(vectors.size()), dim);
  for (std::size_t i = 0; i < vectors.size(); ++i) m.row(static_cast<int>(i)) = vectors[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol) ++rank;
  return rank;
}

std::vector<Eigen::VectorXd> enumerate_extreme_rays(int dim,
                                                    const std::vector<Eigen::VectorXd>& normals,
                                                    double tol) {
  const int n = static_cast<int>(normals.size());
  const int k = dim - 1;  // subset size whose kernel gives a candidate ray
  std::vector<Eigen::VectorXd> rays;

  auto consider = [&](const Eigen::VectorXd& dir) {
    for (int sign : {+1, -1}) {
      Eigen::VectorXd w = sign * dir;
      bool feasible = true;
      for (const auto& h : normals)
        if (h.dot(w) < -tol) {
          feasible = false;
          break;
        }
      if (!feasible) continue;
      if (dim > 1) {
        // Extremality: the active normals must cut w down to a single ray.
        std::vector<Eigen::VectorXd> active;
        for (const auto& h : normals)
          if (std::abs(h.dot(w)) <= tol) active.push_back(h);
        if (rank_of(active, dim, tol) != dim - 1) continue;
      }
      bool dup = false;
      for (const auto& r : rays)
        if ((r - w).lpNorm<Eigen::Infinity>() <= 1e-9) {
          dup = true;
          break;
        }
      if (!dup) rays.push_back(w);
    }
  };

  if (k == 0) {
    consider(Eigen::VectorXd::Ones(1));
  } else if (n >= k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
      Eigen::MatrixXd m(k, dim);
      for (int i = 0; i < k; ++i) m.row(i) = normals[idx[i]];
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
      int rank = 0;
      for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol) ++rank;
      if (rank == k) {
        // One-dimensional kernel: last right singular vector.
        Eigen::VectorXd v = svd.matrixV().col(dim - 1);
        consider(v.normalized());
      }
      // next combination
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }

  std::sort(rays.begin(), rays.end(), lex_less);
  return rays;
}

}  // namespace detail

PolyhedralCone::PolyhedralCone(int dim, std::vector<Eigen::VectorXd> generators,
                               std::vector<Eigen::VectorXd> normals)
    : dim_(dim), generators_(std::move(generators)), halfspace_normals_(std::move(normals)) {
  std::sort(generators_.begin(), generators_.end(), detail::lex_less);
  std::sort(halfspace_normals_.begin(), halfspace_normals_.end(), detail::lex_less);
  // Dual coherence: every generator satisfies every halfspace.
  for (const auto& h : halfspace_normals_)
    for (const auto& g : generators_)
      if (h.dot(g) < -1e-9) throw DegenerateConeError("inconsistent cone representations");
  // Full-dimensionality: the generator barycenter is strictly interior.
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim_);
  for (const auto& g : generators_) sum += g;
  for (const auto& h : halfspace_normals_)
    if (h.dot(sum) <= kMembershipTol) throw DegenerateConeError("cone has empty interior");
}

PolyhedralCone PolyhedralCone::orthant(int dim) {
  if (dim < 1) throw DimensionError("orthant: dimension must be positive");
  std::vector<Eigen::VectorXd> basis;
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e[i] = 1.0;
    basis.push_back(e);
  }
  return PolyhedralCone(dim, basis, basis);
}

PolyhedralCone PolyhedralCone::from_generators(std::vector<Eigen::VectorXd> generators) {
  const int dim = canonicalize_family(generators, "from_generators");
  if (detail::rank_of(generators, dim) < dim)
    throw DegenerateConeError("generators do not span the space: cone has empty interior");
  // Extreme rays of the polar; they are the facet normals of the cone.
  auto normals = detail::enumerate_extreme_rays(dim, generators);
  if (normals.empty() || detail::rank_of(normals, dim) < dim)
    throw DegenerateConeError("cone is not pointed");
  auto minimal = detail::enumerate_extreme_rays(dim, normals);
  if (minimal.empty()) throw DegenerateConeError("cone has no extreme rays");
  return PolyhedralCone(dim, std::move(minimal), std::move(normals));
}

PolyhedralCone PolyhedralCone::from_halfspaces(std::vector<Eigen::VectorXd> normals) {
  const int dim = canonicalize_family(normals, "from_halfspaces");
  if (detail::rank_of(normals, dim) < dim) throw DegenerateConeError("cone is not pointed");
  auto generators = detail::enumerate_extreme_rays(dim, normals);
  if (generators.empty() || detail::rank_of(generators, dim) < dim)
    throw DegenerateConeError("cone has empty interior");
  auto minimal_normals = detail::enumerate_extreme_rays(dim, generators);
  if (minimal_normals.empty()) throw DegenerateConeError("cone is not pointed");
  return PolyhedralCone(dim, std::move(generators), std::move(minimal_normals));
}

bool PolyhedralCone::contains(const Eigen::VectorXd& x, double tol) const {
  if (static_cast<int>(x.size()) != dim_)
    throw DimensionError("contains: point dimension mismatch");
  for (const auto& h : halfspace_normals_)
    if (h.dot(x) < -tol) return false;
  return true;
}

bool PolyhedralCone::interior_contains(const Eigen::VectorXd& x, double tol) const {
  if (static_cast<int>(x.size()) != dim_)
    throw DimensionError("interior_contains: point dimension mismatch");
  for (const auto& h : halfspace_normals_)
    if (h.dot(x) <= tol) return false;
  return true;
}

bool PolyhedralCone::is_orthant(double tol) const {
  if (static_cast<int>(generators_.size()) != dim_) return false;
  std::vector<bool> seen(dim_, false);
  for (const auto& g : generators_) {
    int axis = -1;
    for (int i = 0; i < dim_; ++i) {
      if (std::abs(g[i] - 1.0) <= tol) {
        if (axis >= 0) return false;
        axis = i;
      } else if (std::abs(g[i]) > tol) {
        return false;
      }
    }
    if (axis < 0 || seen[axis]) return false;
    seen[axis] = true;
  }
  return true;
}

PolarCone polar(const PolyhedralCone& cone) {
  // The stored representations are dual to each other: the facet normals of C
  // are exactly the extreme rays of C*, and vice versa. Swapping them gives
  // the polar with no recomputation, so polar(polar(C)) == C bitwise.
  return PolyhedralCone(cone.dim_, cone.halfspace_normals_, cone.generators_);
}

std::vector<Eigen::VectorXd> extreme_rays(const std::vector<Eigen::VectorXd>& normals) {
  std::vector<Eigen::VectorXd> family = normals;
  const int dim = canonicalize_family(family, "extreme_rays");
  if (detail::rank_of(family, dim) < dim)
    throw DegenerateConeError("intersection is not pointed");
  return detail::enumerate_extreme_rays(dim, family);
}

bool rays_match(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b,
                double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& va : a) {
    const double na = va.norm();
    if (na < 1e-12) return false;
    bool found = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double nb = b[j].norm();
      if (nb < 1e-12) return false;
      if ((va / na - b[j] / nb).lpNorm<Eigen::Infinity>() <= tol) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace vopt
