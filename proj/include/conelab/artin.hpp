#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "conelab/io.hpp"
#include "conelab/rational.hpp"

namespace conelab {

using Scalar = GaussianRational;
using QVec = std::vector<Scalar>;
/// Row-major dense matrix over Q(i).
using QMat = std::vector<QVec>;

enum class BaseField { Real, Complex };

namespace qla {

QMat zeros(int rows, int cols);
QMat identity(int n);
QMat mul(const QMat& a, const QMat& b);
QVec mul(const QMat& a, const QVec& x);
QMat sub(const QMat& a, const QMat& b);
bool is_zero(const QMat& a);
bool is_zero(const QVec& v);
int rank(QMat a);
/// Basis of {x : a x = 0}; `cols` fixes the width when a has no rows. The
/// basis is the identity on the free columns, which are stored in `free`.
std::vector<QVec> nullspace(QMat a, int cols, std::vector<int>* free = nullptr);
/// Coordinates of v in a nullspace basis, read off the free columns and
/// checked by reconstruction.
std::optional<QVec> free_coordinates(const std::vector<QVec>& basis, const std::vector<int>& free, const QVec& v);
/// Coordinates c with Σ c_i basis[i] = v; nullopt when v is not in the span.
std::optional<QVec> coordinates(const std::vector<QVec>& basis, const QVec& v);

}  // namespace qla

/// Commutative local algebra with basis e₀ = 1, e₁, … spanning the maximal ideal.
class ArtinAlgebra {
 public:
  /// mult[i][j] = coordinates of e_i e_j. Throws InvalidArgument when the
  /// structure constants are not those of an Artin local algebra.
  ArtinAlgebra(BaseField base, std::vector<std::vector<QVec>> mult, std::string name = {});

  BaseField base() const { return base_; }
  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const QVec& product(int i, int j) const { return mult_[i][j]; }
  /// Smallest N with 𝔪ᴺ = 0.
  int nilpotency_index() const { return nilpotency_; }

  QVec one() const;
  QVec basis(int i) const;
  QVec mul(const QVec& x, const QVec& y) const;
  /// Matrix of y ↦ x·y.
  QMat left_mult(const QVec& x) const;
  bool in_maximal_ideal(const QVec& x) const { return x[0].is_zero(); }
  /// Exact residuals: false if any of unit, commutativity, associativity, ideal
  /// or nilpotency fails.
  bool verify() const;

  json to_json() const;
  static ArtinAlgebra from_json(const json& j, const std::string& where = "algebra");

  friend bool operator==(const ArtinAlgebra& a, const ArtinAlgebra& b) {
    return a.base_ == b.base_ && a.mult_ == b.mult_;
  }

 private:
  BaseField base_;
  int dim_;
  std::vector<std::vector<QVec>> mult_;
  std::string name_;
  int nilpotency_ = 0;
};

/// K[t]/(t^{k+1}) with basis 1, t, …, t^k.
ArtinAlgebra truncated_poly(int k, BaseField base = BaseField::Complex);
/// A ⊗_ℝ ℂ.
ArtinAlgebra complexify(const ArtinAlgebra& a);
/// A ⊗ B with basis e_i ⊗ f_j at index i·dim B + j.
ArtinAlgebra tensor(const ArtinAlgebra& a, const ArtinAlgebra& b);
/// A[ε] = A ⊗ K[ε]/(ε²).
ArtinAlgebra dual_numbers_over(const ArtinAlgebra& a);

/// Inverse when x ∉ 𝔪, by the finite geometric series.
std::optional<QVec> is_unit(const ArtinAlgebra& a, const QVec& x);

/// Linear map given by the images of the source basis.
struct AlgebraHom {
  ArtinAlgebra source;
  ArtinAlgebra target;
  QMat matrix;  ///< target.dim() × source.dim()

  QVec apply(const QVec& x) const { return qla::mul(matrix, x); }
  bool is_unital() const;
  bool is_multiplicative() const;
  bool is_homomorphism() const { return is_unital() && is_multiplicative(); }
  bool is_surjective() const;
  bool is_bijective() const;
};

AlgebraHom make_hom(const ArtinAlgebra& source, const ArtinAlgebra& target, const std::vector<QVec>& images);
AlgebraHom compose(const AlgebraHom& g, const AlgebraHom& f);
AlgebraHom identity_hom(const ArtinAlgebra& a);
/// A → K, the residue map.
AlgebraHom residue_map(const ArtinAlgebra& a);
bool same_map(const AlgebraHom& f, const AlgebraHom& g);

struct SmallExtension {
  QVec epsilon;
  ArtinAlgebra quotient;
  AlgebraHom projection;
};

/// A → A/(ε). Throws InvalidArgument unless ε ≠ 0 and ε·𝔪 = 0.
SmallExtension small_extension(const ArtinAlgebra& a, const QVec& epsilon);

struct FiberProduct {
  ArtinAlgebra algebra;
  QMat embedding;  ///< (dim A + dim B) × dim P, columns are the basis of P inside A ⊕ B
  AlgebraHom to_a;
  AlgebraHom to_b;
  /// Coordinates in P of a pair (a, b) agreeing in C.
  QVec coordinates(const QVec& a, const QVec& b) const;
};

/// A ×_C B. Throws InvalidArgument unless both maps are homomorphisms into the same C.
FiberProduct fiber_product(const AlgebraHom& f, const AlgebraHom& g);

struct LiftMaps {
  AlgebraHom pi;     ///< A_k → A_{k−1}
  AlgebraHom theta;  ///< A_k → A_{k−1}[ε], t ↦ t + ε
  AlgebraHom varpi;  ///< A_k[ε] → A_{k−1}[ε]
};

LiftMaps lift_maps(int k, BaseField base = BaseField::Complex);

/// A ×_K K[t]/(t²) → A ×_B A, (a, πa + λt) ↦ (a, a + λε), for the small extension A → B.
struct SmallExtensionIsomorphism {
  FiberProduct left;
  FiberProduct right;
  AlgebraHom map;
  bool verified = false;
};

SmallExtensionIsomorphism small_extension_isomorphism(const ArtinAlgebra& a, const QVec& epsilon);

/// Finite-dimensional module: action[i] is the matrix of e_i.
struct FiniteModule {
  ArtinAlgebra algebra;
  int rank = 0;
  std::vector<QMat> action;

  bool verify() const;
  json to_json() const;
  static FiniteModule from_json(const json& j, const std::string& where = "module");
};

/// Module over K[t]/(t^{k+1}) given by its t-action; throws unless t^{k+1} acts as 0.
FiniteModule module_from_t_action(int k, const QMat& t, BaseField base = BaseField::Complex);

struct ModuleMap {
  FiniteModule source;
  FiniteModule target;
  QMat matrix;  ///< target.rank × source.rank

  bool is_linear() const;
};

struct DualModule {
  FiniteModule module;
  /// basis[s] is the dim A × rank(M) matrix of the s-th A-linear map M → A.
  std::vector<QMat> basis;
  std::vector<int> free;  ///< free columns of the flattened basis
};

/// Hom_A(M, A) as the solution space of the A-linearity constraints.
DualModule module_dual(const FiniteModule& m);
/// φ ↦ φ∘f as a map N* → M*.
ModuleMap dual_map(const ModuleMap& f, const DualModule& m_dual, const DualModule& n_dual);

struct ReflexivityReport {
  int rank = 0;
  int dual_rank = 0;
  int bidual_rank = 0;
  int evaluation_rank = 0;
  bool evaluation_linear = false;
  bool reflexive = false;
};

/// Builds M → M**, m ↦ (φ ↦ φ(m)), and checks that it is an A-linear bijection.
ReflexivityReport reflexivity_check(const FiniteModule& m);

/// Random module over A_k of rank ≤ max_rank: a sum of cyclic modules A_j, j ≤ k,
/// conjugated by a random invertible integer matrix.
FiniteModule random_truncated_module(int k, int max_rank, std::mt19937_64& rng);

json scalar_to_json(const Scalar& s);
Scalar scalar_from_json(const json& j, const std::string& where = "scalar");

}  // namespace conelab
