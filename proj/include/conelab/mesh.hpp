#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "conelab/error.hpp"

namespace conelab {

using Simplex = std::vector<int>;
using IntSparse = Eigen::SparseMatrix<int>;

/// Raised when a complex fails validation. `simplex` names the offending
/// simplex (sorted vertex ids) when there is one.
class MeshError : public Error {
 public:
  MeshError(const std::string& what, Simplex simplex = {});
  const Simplex& simplex() const noexcept { return simplex_; }

 private:
  Simplex simplex_;
};

struct SimplexHash {
  std::size_t operator()(const Simplex& s) const noexcept;
};

/// Closed pure simplicial manifold. Simplices of every degree are stored as
/// sorted vertex tuples; orientation is the sorted order.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  /// Builds the complex from its top simplices. `vertex_count` < 0 means
  /// "max id + 1". `coords` may be empty (combinatorial use only); otherwise
  /// it has one row per vertex.
  static SimplicialComplex from_top(int dim, std::vector<Simplex> top, int vertex_count = -1,
                                    Eigen::MatrixXd coords = {});

  int dim() const { return dim_; }
  int vertex_count() const { return static_cast<int>(simplices_[0].size()); }
  std::size_t count(int k) const { return simplices_.at(k).size(); }
  std::size_t total_count() const;
  const std::vector<Simplex>& simplices(int k) const { return simplices_.at(k); }
  /// -1 when `s` (sorted) is not a k-simplex of the complex.
  int index_of(int k, const Simplex& s) const;

  bool has_coordinates() const { return coords_.size() > 0; }
  const Eigen::MatrixXd& coordinates() const { return coords_; }

  /// Boundary ∂_k: rows are (k−1)-simplices, columns k-simplices, 1 ≤ k ≤ dim.
  const IntSparse& boundary(int k) const { return boundary_.at(k); }

  long euler_characteristic() const;

  /// Same complex with vertex v renamed perm[v].
  SimplicialComplex relabeled(const std::vector<int>& perm) const;

 private:
  int dim_ = 0;
  std::vector<std::vector<Simplex>> simplices_;
  std::vector<std::unordered_map<Simplex, int, SimplexHash>> index_;
  std::vector<IntSparse> boundary_;
  Eigen::MatrixXd coords_;
};

struct BettiVector {
  std::vector<long> b;
  bool exact = true;  ///< false when the floating rank path was used
};

struct BettiOptions {
  std::size_t exact_limit = 20000;  ///< total simplices handled by exact rational rank
  double float_tol = 1e-9;          ///< relative pivot tolerance on the floating path
};

BettiVector betti(const SimplicialComplex& complex, const BettiOptions& opts = {});

/// Rank of an integer matrix over Q (exact) or by floating column reduction.
long rank_exact(const IntSparse& m);
long rank_float(const IntSparse& m, double rel_tol);

enum class BettiHypothesis { HoldsViaNMinus2, HoldsViaNMinus1, HoldsViaBoth, Fails };

std::string to_string(BettiHypothesis h);

/// Reads b[n−2] and b[n−1] for a cone of complex dimension n.
BettiHypothesis check_betti_hypothesis(const std::vector<long>& b, int n);

}  // namespace conelab
