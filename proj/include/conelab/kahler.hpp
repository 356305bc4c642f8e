#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conelab/error.hpp"
#include "conelab/io.hpp"
#include "conelab/parallel.hpp"

namespace conelab {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

struct WeightData {
  std::vector<double> lambda;
  double alpha = 0;  ///< min λ_a
  double beta = 0;   ///< max λ_a

  /// Requires every weight in (0, 1).
  static WeightData make(std::vector<double> lambda);
  /// Same, but only requires positive weights.
  static WeightData make_positive(std::vector<double> lambda);
  int m() const { return static_cast<int>(lambda.size()); }
};

/// Unique t > 0 with Σ|z_a|² t^{−2λ_a} = 1.
double weighted_radius(const CVec& z, const WeightData& w, double tol = 1e-13);
/// Σ|z_a|² r_λ^{−2λ_a} − 1 at the computed radius.
double weighted_radius_residual(const CVec& z, const WeightData& w, double r_lambda);
/// The holomorphic ℂ-action restricted to real s: z_a ↦ e^{λ_a s} z_a.
CVec weighted_flow(const CVec& z, const WeightData& w, double s);

/// Value, complex gradient ∂f/∂z_a and Levi matrix ∂²f/∂z_a∂z̄_b of a real function.
struct Jet {
  double value = 0;
  CVec dz;
  CMat levi;

  static Jet constant(double c, int m);
  /// Flat-metric norm of the real differential, 2|∂f|.
  double grad_norm() const { return 2.0 * dz.norm(); }
  double levi_min() const;
  double levi_max() const;
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(double c, const Jet& a);
Jet product(const Jet& a, const Jet& b);
/// g∘f for a scalar g given its value and first two derivatives at f.
Jet compose(double g0, double g1, double g2, const Jet& f);

Jet radius_squared_jet(const CVec& z);
/// r_λ² with derivatives by implicit differentiation of the defining equation.
Jet weighted_radius_squared_jet(const CVec& z, const WeightData& w);

class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual int m() const = 0;
  virtual double value(const CVec& z) const = 0;
  /// Exact derivatives when the field knows them.
  virtual std::optional<Jet> exact_jet(const CVec&) const { return std::nullopt; }
  /// Points with |z| ≤ domain_radius() may be evaluated.
  virtual double domain_radius() const = 0;
};

/// Levi matrix by 4th-order central differences with step h (0: 1e−3·domain radius).
/// Throws InvalidArgument if the stencil leaves the domain.
CMat levi_form(const ScalarField& f, const CVec& z, double h = 0);
/// Exact jet when available, finite differences otherwise.
Jet field_jet(const ScalarField& f, const CVec& z, double h = 0);

class LambdaField : public ScalarField {
 public:
  using Fn = std::function<double(const CVec&)>;
  LambdaField(int m, double radius, Fn fn) : m_(m), radius_(radius), fn_(std::move(fn)) {}
  int m() const override { return m_; }
  double value(const CVec& z) const override { return fn_(z); }
  double domain_radius() const override { return radius_; }

 private:
  int m_;
  double radius_;
  Fn fn_;
};

struct Monomial {
  std::vector<int> zpow;
  std::vector<int> zbarpow;
  std::complex<double> coeff;
};

/// Real polynomial Σ c z^α z̄^β with c_{βα} = conj(c_{αβ}).
class PolynomialPotential : public ScalarField {
 public:
  PolynomialPotential(int m, std::vector<Monomial> terms, double radius = 1.0);

  /// {"z1 zbar1": 1.0, "z1^2": 0.15, "zbar1^2": 0.15, "z1 zbar2": [re, im], ...}
  static PolynomialPotential from_dictionary(const json& dict, int m = 0, double radius = 1.0);
  /// Least-squares fit of total degree ≤ degree to samples on the cube [−R, R]^{2m},
  /// n points per axis, coordinates ordered (x1, y1, x2, y2, …), last index fastest.
  static PolynomialPotential from_grid(int m, double R, int n, const std::vector<double>& values, int degree = 4);
  /// Either form: a dictionary, or {"grid": {"m":…, "radius":…, "n":…, "values":[…], "degree":…}}.
  static PolynomialPotential from_json(const json& doc, int m = 0, double radius = 1.0);

  int m() const override { return m_; }
  double value(const CVec& z) const override;
  std::optional<Jet> exact_jet(const CVec& z) const override;
  double domain_radius() const override { return radius_; }

  const std::vector<Monomial>& terms() const { return terms_; }
  double fit_residual() const { return fit_residual_; }
  json to_dictionary() const;

 private:
  int m_;
  std::vector<Monomial> terms_;
  double radius_;
  double fit_residual_ = 0;
};

/// C² quintic-spline cutoff: 1 on [0, plateau], 0 on [support, ∞).
struct Cutoff {
  double plateau = 0.5;
  double support = 1.0;

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;
  /// Exact suprema of |ψ′| and |ψ″|.
  double sup_d1() const;
  double sup_d2() const;
};

struct SampleSet {
  std::vector<CVec> points;
};

/// Dyadic radial shells [R 2^{−k−1}, R 2^{−k}], k < shells, each with per_shell
/// points uniform in direction and log-uniform in radius.
SampleSet stratified_samples(int m, double R, int shells, int per_shell, std::uint64_t seed = 0x6c7e);

struct GluingConstants {
  double M0 = 0;
  double M1 = 0;
  double nu = 0;
  double M = 0;
  double sup_psi_d1 = 0;
  double sup_psi_d2 = 0;
};

struct GluingProblem {
  WeightData weights;
  std::shared_ptr<const ScalarField> potential;
  /// φ as a function of r = |z|; ψ as a function of u = r²/δ².
  Cutoff phi{0.375, 0.75};
  Cutoff psi{0.25, 1.0};
  double hypothesis_tol = 1e-9;
};

/// Empirical suprema (with a 10% margin) of |p|/r², |dp|/r, λ_max(Levi p) (M₀),
/// of dr²∧dᶜr² against r² ddᶜr² (M₁), and the infimum of g_λ against the round
/// metric on the unit sphere (ν). Throws if p(0) ≠ 0 or ∇p(0) ≠ 0.
GluingConstants estimate_constants(const GluingProblem& prob, const SampleSet& samples);

/// q = p + εφ r_λ² − ψ(r²/δ²) p.
Jet glued_jet(const GluingProblem& prob, double eps, double delta, const CVec& z);

struct ReportItem {
  std::string name;
  bool pass = false;
  long samples = 0;
  double worst = 0;
  double worst_radius = 0;
  std::string detail;
};

struct GlueAttempt {
  double eps = 0;
  double delta = 0;
  std::string source;
  bool pass = false;
  double min_levi = 0;
  double at_radius = 0;
};

struct GlueOptions {
  int shells = 64;
  int per_shell = 160;
  std::uint64_t seed = 0x6c7e;
  int eps_halvings = 20;
  int delta_halvings = 50;
  Exec exec = Exec::Parallel;
};

struct GlueResult {
  double eps = 0;
  double delta = 0;
  std::string delta_source;
  double delta_rule = 0;
  bool delta_rule_admissible = false;
  GluingConstants constants;
  std::vector<ReportItem> items;
  std::vector<GlueAttempt> attempts;
  long samples = 0;
  bool pass() const;
};

class GlueError : public Error {
 public:
  GlueError(const std::string& what, GlueResult partial) : Error(what), partial_(std::move(partial)) {}
  const GlueResult& partial() const { return partial_; }

 private:
  GlueResult partial_;
};

/// Minimum of λ_min(Levi f) over the samples, with the radius where it occurs.
/// Stops at the first non-positive value when stop_at_nonpositive is set.
struct LeviSweep {
  double min_levi = 0;
  double at_radius = 0;
  long evaluated = 0;
};
LeviSweep levi_sweep(const std::function<Jet(const CVec&)>& f, const SampleSet& s, bool stop_at_nonpositive,
                     Exec exec = Exec::Parallel);

/// Chooses ε by halving from 1 until p + εφr_λ² is strictly PSH on the samples,
/// then δ from min{β², ν} δ^{2(1−β)} = M/ε (halved once) when that δ keeps φ ≡ 1 on
/// r ≤ δ; otherwise and when verification fails, searches ε and δ by halving.
/// Throws GlueError with the attempts when nothing verifies.
GlueResult glue_potential(const GluingProblem& prob, const GlueOptions& opts = {});

/// Verification report for a given (ε, δ): locality outside supp φ, q = εr_λ²
/// where ψ(r²/δ²) = φ = 1, and λ_min(Levi q) > 0 on all samples.
std::vector<ReportItem> verify_glue(const GluingProblem& prob, double eps, double delta, const SampleSet& s,
                                    Exec exec = Exec::Parallel);

json glue_report_json(const GluingProblem& prob, const GlueResult& r);

}  // namespace conelab
