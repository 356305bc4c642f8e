#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/IterativeLinearSolvers>

#include <memory>
#include <string>
#include <vector>

#include "conelab/mesh.hpp"
#include "conelab/parallel.hpp"

namespace conelab {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Star { Whitney, Lumped };

std::string to_string(Star s);
Star parse_star(const std::string& s);

/// Element mass matrices of Whitney k-forms on one n-simplex. Rows/cols are
/// the k-faces of the simplex in lexicographic order of local vertex subsets.
/// `X` holds the n+1 vertex coordinates as rows.
Mat whitney_element_mass(const Mat& X, int k);

/// Volume of the simplex spanned by the rows of X.
double simplex_volume(const Mat& X);

/// Link operators: per-degree mass matrices and coboundaries d[k] = ∂_{k+1}ᵀ.
class DiscreteHodge {
 public:
  static DiscreteHodge build(std::shared_ptr<const SimplicialComplex> complex, Star star = Star::Whitney,
                             Exec exec = Exec::Parallel);
  static DiscreteHodge build(const SimplicialComplex& complex, Star star = Star::Whitney,
                             Exec exec = Exec::Parallel);

  const SimplicialComplex& complex() const { return *complex_; }
  std::shared_ptr<const SimplicialComplex> complex_ptr() const { return complex_; }
  int dim() const { return complex_->dim(); }
  Star star() const { return star_; }
  Eigen::Index size(int k) const;

  const SpMat& mass(int k) const { return mass_.at(k); }
  /// Coboundary k → k+1 for 0 ≤ k < dim.
  const SpMat& d(int k) const { return d_.at(k); }

  Vec apply_d(int k, const Vec& x) const;
  /// δ_k = M_{k−1}⁻¹ d_{k−1}ᵀ M_k : k-cochains → (k−1)-cochains; zero for k = 0.
  Vec codifferential(int k, const Vec& x) const;
  /// Strong Hodge Laplacian dδ + δd on k-cochains.
  Vec laplacian_apply(int k, const Vec& x) const;
  Vec solve_mass(int k, const Vec& b) const;
  double inner(int k, const Vec& x, const Vec& y) const { return x.dot(mass_.at(k) * y); }

 private:
  std::shared_ptr<const SimplicialComplex> complex_;
  Star star_ = Star::Whitney;
  std::vector<SpMat> mass_;
  std::vector<SpMat> d_;
};

/// Solves M x = b for a mass matrix by Jacobi-preconditioned CG. Mass
/// matrices are spectrally equivalent to their diagonals, so this converges
/// in a mesh-independent number of steps. Throws if the residual stalls.
Vec mass_solve(const SpMat& M, const Vec& b, double tol = 1e-14);
Mat mass_solve(const SpMat& M, const Mat& B, double tol = 1e-14);

/// Mass matrix of degree k assembled with the chosen execution path. Each
/// element matrix is checked positive definite, which makes the sum SPD.
SpMat assemble_mass(const SimplicialComplex& c, int k, Star star, Exec exec);

/// Generalized symmetric pencil A x = λ B x with A = K + Cᵀ G⁻¹ C.
/// C may have zero rows, in which case A = K.
struct SymmetricPencil {
  SpMat K;
  SpMat C;
  SpMat G;
  SpMat B;
  Eigen::Index size() const { return B.rows(); }
  /// Dense A (for small problems and tests).
  Mat dense_A() const;
};

/// Applies A = K + Cᵀ G⁻¹ C with a cached factor of G.
class PencilOperator {
 public:
  explicit PencilOperator(const SymmetricPencil& P);
  Vec apply_A(const Vec& x) const;
  Mat apply_A(const Mat& X) const;
  Vec solve_B(const Vec& x) const;

 private:
  const SymmetricPencil* P_;
  bool has_c_ = false;
};

/// Weak form of the p-form Hodge Laplacian: K = d_pᵀM_{p+1}d_p, C = d_{p−1}ᵀM_p,
/// G = M_{p−1}, B = M_p.
SymmetricPencil laplacian(const DiscreteHodge& h, int p);

}  // namespace conelab
