#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "conelab/dec.hpp"

namespace conelab {

enum class EigenMethod { Auto, Dense, ShiftInvert, Lobpcg };

std::string to_string(EigenMethod m);

struct EigenOptions {
  double tol = 1e-8;                ///< relative residual: ‖Ax−λBx‖_{B⁻¹} ≤ tol·(1+|λ|)
  int block = 16;                   ///< Krylov / LOBPCG block width
  int max_iter = 400;               ///< block expansions (Krylov) or sweeps (LOBPCG)
  Eigen::Index dense_limit = 700;   ///< Auto uses the dense solver up to this size
  std::optional<double> shift;      ///< must lie below the wanted spectrum
  double factor_memory_cap = 4e9;   ///< bytes; above this Auto switches to LOBPCG
  EigenMethod method = EigenMethod::Auto;
  std::uint64_t seed = 0x5eed;
};

struct SolverInfo {
  std::string method;
  double tol = 0;
  int iterations = 0;
  Eigen::Index basis_dim = 0;
  double shift = 0;
  int shift_retries = 0;
};

/// K smallest eigenpairs of a symmetric pencil; eigenvectors are B-orthonormal.
struct SpectrumSlice {
  int degree = -1;
  Vec eigenvalues;
  Mat eigenvectors;
  Vec residuals;  ///< ‖Ax−λBx‖_{B⁻¹} / (1+|λ|)
  SolverInfo solver;
  Eigen::Index size() const { return eigenvalues.size(); }
};

class EigenError : public Error {
 public:
  EigenError(const std::string& what, SpectrumSlice partial) : Error(what), partial_(std::move(partial)) {}
  const SpectrumSlice& partial() const noexcept { return partial_; }

 private:
  SpectrumSlice partial_;
};

SpectrumSlice eigensolve(const SymmetricPencil& P, int K, const EigenOptions& opts = {});

/// Default shift −1e−3·(trace A / trace B), computed from the pencil blocks.
double default_shift(const SymmetricPencil& P);

/// Estimated bytes for the shift-invert factorization of the augmented system.
double estimate_factor_bytes(const SymmetricPencil& P);

struct NearZero {
  int count = 0;
  double threshold = 0;
  double gap_ratio = 0;  ///< λ_count / max(|λ_{count−1}|, tiny); +inf if no modes below
  bool gap_ok = true;
  std::string warning;
};

/// Counts eigenvalues below rel_threshold·median|λ| and checks that the cut
/// sits in a gap of ratio ≥ min_gap.
NearZero count_near_zero(const SpectrumSlice& s, double rel_threshold = 1e-6, double min_gap = 10.0);

}  // namespace conelab
