#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

#include "conelab/dec.hpp"
#include "conelab/eigensolver.hpp"

namespace conelab {

/// Riemannian l-cone over a discretized link of dimension l−1.
struct ConeGeometry {
  int l = 0;
  std::shared_ptr<const DiscreteHodge> link;

  static ConeGeometry over(std::shared_ptr<const DiscreteHodge> link, int l);
  static ConeGeometry over(const DiscreteHodge& link, int l);
  /// Cochain dimension of degree k on the link (0 when out of range).
  Eigen::Index size(int k) const { return link->size(k); }
};

/// r^β (d log r ∧ φ′ + φ″): φ′ a (p−1)-cochain, φ″ a p-cochain on the link.
/// Homogeneity order is β − p.
struct HomogeneousForm {
  int p = 0;
  double beta = 0;
  Vec phi_prime;
  Vec phi_dprime;

  double order() const { return beta - p; }
};

HomogeneousForm zero_form(const ConeGeometry& g, int p, double beta);

/// Exterior derivative on the cone: degree p+1, same β,
/// components (βφ″ − dφ′, dφ″).
HomogeneousForm cone_d(const HomogeneousForm& f, const ConeGeometry& g);
/// Codifferential on the cone: degree p−1, exponent β−2,
/// components (−δφ′, δφ″ − (β+l−2p)φ′).
HomogeneousForm cone_dstar(const HomogeneousForm& f, const ConeGeometry& g);
/// Hodge Laplacian on the cone: degree p, exponent β−2, components
/// (Δφ′ − (β−2)(β+l−2p)φ′ − 2δφ″, Δφ″ − β(β+l−2−2p)φ″ − 2dφ′).
HomogeneousForm cone_laplacian(const HomogeneousForm& f, const ConeGeometry& g);

/// Largest absolute component difference between two forms of equal shape.
double form_distance(const HomogeneousForm& a, const HomogeneousForm& b);
double form_norm(const HomogeneousForm& a);

/// E = ((Δ + 2l − 4p, −2δ), (−2d, Δ)) on (p−1) ⊕ p cochains, as a symmetric
/// pencil with B = diag(M_{p−1}, M_p). Valid for 0 ≤ p ≤ l; out-of-range
/// blocks are empty.
SymmetricPencil assemble_E(const ConeGeometry& g, int p);
/// Strong application of E to a stacked vector (φ′; φ″).
Vec apply_E(const ConeGeometry& g, int p, const Vec& x);

struct IndicialDatum {
  int j = 0;
  double lambda = 0;
  double alpha_root = 0;  ///< m + √(m²+λ)
  double beta_root = 0;   ///< m − √(m²+λ)
  double order_alpha = 0;
  double order_beta = 0;
  bool quarantined = false;  ///< λ < −m² beyond tolerance: complex roots, excluded
  bool double_root = false;  ///< |λ + m²| within tolerance
};

struct ExceptionalOrder {
  double order = 0;
  int multiplicity = 0;
};

struct ConeOptions {
  EigenOptions eig;
  double cluster_tol = 1e-6;  ///< relative, for multiplicities and near −m² detection
};

struct ConeReport {
  int l = 0;
  int p = 0;
  double m = 0;
  SpectrumSlice spectrum;
  std::vector<IndicialDatum> indicial;
  std::vector<ExceptionalOrder> exceptional;
  double nolog_gap = 0;
  int nolog_argmin = -1;
  double complete_lo = 0;  ///< orders in (complete_lo, complete_hi) are all resolved
  double complete_hi = 0;
  std::vector<std::string> warnings;
};

ConeReport indicial_analysis(const ConeGeometry& g, int p, int K, const ConeOptions& opts = {});

/// Roots m ± √(m²+λ) for a single eigenvalue (no tolerance handling).
IndicialDatum indicial_roots(double lambda, double m, int p);

enum class Verdict { Pass, Fail, FlaggedBoundary, Skipped };
std::string to_string(Verdict v);

struct NologResult {
  Verdict verdict = Verdict::Pass;
  double gap = 0;
  std::string note;
};

/// PASS when min_j |λ_j + m²| > gap_tol. At m = 0 a gap ≤ gap_tol is a flagged
/// boundary case (harmonic link forms give λ = 0 = −m²), never a PASS.
NologResult nolog_verdict(const ConeReport& r, double gap_tol = 0.1);

struct WindowVerdict {
  std::string name;
  std::string claim;
  bool applicable = false;
  Verdict verdict = Verdict::Skipped;
  double lo = 0, hi = 0;  ///< open order window (when the claim has one)
  std::string detail;
};

struct WindowOptions {
  double relation_tol = 1e-6;  ///< relative tolerance on eigenvector identities
  double endpoint_tol = 1e-6;  ///< orders this close to a window end are endpoint cases
  double bound_slack = 0.05;   ///< λ_min ≥ −m² − slack·(1+m²)
};

/// Checks the order-window and eigenvector-structure statements whose
/// hypotheses hold for (l, p) and the link Betti numbers.
std::vector<WindowVerdict> classify_windows(const ConeReport& r, const ConeGeometry& g,
                                            const std::vector<long>& betti, const WindowOptions& opts = {});

struct FredholmWindow {
  double lo = 0, hi = 0;
  std::string annotation;
};

/// Maximal open sub-intervals of [a, b] free of exceptional orders. Throws
/// InvalidArgument when [a, b] is not inside the resolved order range.
std::vector<FredholmWindow> fredholm_windows(const ConeReport& r, double a, double b);

struct Diagonalization {
  Eigen::Matrix2d M, P, D;
  double residual = 0;
};

/// Builds M, P, D for (β, l, p) and returns ‖P⁻¹MP − D‖_∞. Throws when
/// det P = −(2β + l − 2 − 2p) vanishes.
Diagonalization check_diagonalization(double beta, int l, int p);

}  // namespace conelab
