#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "conelab/kahler.hpp"

namespace conelab {

namespace {

constexpr long kBlock = 512;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void check_problem(const GluingProblem& prob) {
  if (!prob.potential) throw InvalidArgument("gluing problem has no potential");
  if (prob.potential->m() != prob.weights.m()) throw InvalidArgument("potential and weights disagree on m");
  for (double l : prob.weights.lambda)
    if (!(l > 0 && l < 1)) throw InvalidArgument("gluing weights must lie in (0,1)");
  const Cutoff& f = prob.phi;
  const Cutoff& s = prob.psi;
  if (!(0 < f.plateau && f.plateau < f.support)) throw InvalidArgument("φ needs 0 < plateau < support");
  if (!(0 < s.plateau && s.plateau < s.support && s.support <= 1)) {
    throw InvalidArgument("ψ needs 0 < plateau < support ≤ 1");
  }
  if (f.support > prob.potential->domain_radius()) throw InvalidArgument("supp φ must lie inside the domain");
}

// φ(r) as a function of s = r²
Jet phi_jet(const Cutoff& c, const Jet& r2) {
  const double s = r2.value;
  const double r = std::sqrt(s);
  const double v = c.value(r), g1 = c.d1(r), g2 = c.d2(r);
  if (g1 == 0 && g2 == 0) return compose(v, 0, 0, r2);
  return compose(v, g1 / (2 * r), g2 / (4 * s) - g1 / (4 * s * r), r2);
}

}  // namespace

GluingConstants estimate_constants(const GluingProblem& prob, const SampleSet& samples) {
  check_problem(prob);
  const ScalarField& p = *prob.potential;
  const int m = p.m();
  const CVec zero = CVec::Zero(m);
  Jet j0 = field_jet(p, zero);
  if (std::abs(j0.value) > prob.hypothesis_tol) {
    throw InvalidArgument("potential violates p(0) = 0 (p(0) = " + fmt(j0.value) + ")");
  }
  if (j0.grad_norm() > prob.hypothesis_tol) {
    throw InvalidArgument("potential violates ∇p(0) = 0 (|dp(0)| = " + fmt(j0.grad_norm()) + ")");
  }

  double m0 = 0, m1 = 0, nu = std::numeric_limits<double>::infinity();
  long used = 0;
  for (const CVec& z : samples.points) {
    const double r = z.norm();
    if (r == 0 || r > prob.phi.support) continue;
    ++used;
    Jet j = field_jet(p, z);
    m0 = std::max({m0, std::abs(j.value) / (r * r), j.grad_norm() / r, j.levi_max()});
    // dr² ∧ dᶜr² ↔ ∂r² ∂̄r², compared with r² ddᶜr² ↔ r² I
    Jet r2 = radius_squared_jet(z);
    Eigen::SelfAdjointEigenSolver<CMat> es(r2.dz * r2.dz.adjoint(), Eigen::EigenvaluesOnly);
    m1 = std::max(m1, es.eigenvalues().maxCoeff() / (r * r));

    // g_λ on T S^{2m−1} is the Kähler metric of r_λ² at |z| = 1
    const CVec u = z / r;
    Jet rl = weighted_radius_squared_jet(u, prob.weights);
    Eigen::MatrixXd Q(2 * m, 2 * m);
    std::vector<CVec> basis;
    for (int a = 0; a < m; ++a) {
      CVec e = CVec::Zero(m);
      e(a) = 1;
      basis.push_back(e);
      e(a) = std::complex<double>(0, 1);
      basis.push_back(e);
    }
    for (int i = 0; i < 2 * m; ++i)
      for (int k = 0; k < 2 * m; ++k) Q(i, k) = (basis[i].adjoint() * rl.levi * basis[k])(0).real();
    Eigen::VectorXd n(2 * m);
    for (int a = 0; a < m; ++a) {
      n(2 * a) = u(a).real();
      n(2 * a + 1) = u(a).imag();
    }
    // orthonormal basis of n^⊥
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(2 * m, 2 * m) - n * n.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ps(P);
    Eigen::MatrixXd T = ps.eigenvectors().rightCols(2 * m - 1);
    Eigen::MatrixXd Qt = T.transpose() * Q * T;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qs(0.5 * (Qt + Qt.transpose()), Eigen::EigenvaluesOnly);
    nu = std::min(nu, qs.eigenvalues()(0));
  }
  if (used == 0) throw InvalidArgument("no samples inside the support of φ");

  GluingConstants c;
  c.M0 = 1.1 * m0;
  c.M1 = 1.1 * m1;
  c.nu = 0.9 * nu;
  c.sup_psi_d1 = prob.psi.sup_d1();
  c.sup_psi_d2 = prob.psi.sup_d2();
  c.M = c.M0 * c.M1 * c.sup_psi_d2 + 2 * c.M0 * c.sup_psi_d1 + c.M0;
  return c;
}

Jet glued_jet(const GluingProblem& prob, double eps, double delta, const CVec& z) {
  Jet p = field_jet(*prob.potential, z);
  Jet r2 = radius_squared_jet(z);
  Jet rl2 = weighted_radius_squared_jet(z, prob.weights);
  Jet phi = phi_jet(prob.phi, r2);
  const double u = r2.value / (delta * delta);
  Jet psi = compose(prob.psi.value(u), prob.psi.d1(u) / (delta * delta),
                    prob.psi.d2(u) / (delta * delta * delta * delta), r2);
  return p + eps * product(phi, rl2) - product(psi, p);
}

LeviSweep levi_sweep(const std::function<Jet(const CVec&)>& f, const SampleSet& s, bool stop_at_nonpositive,
                     Exec exec) {
  const long n = static_cast<long>(s.points.size());
  LeviSweep out;
  out.min_levi = std::numeric_limits<double>::infinity();
  std::vector<double> vals(static_cast<std::size_t>(std::min(n, kBlock)));
  // fixed blocks so the serial and parallel sweeps visit the same points
  for (long b0 = 0; b0 < n; b0 += kBlock) {
    const long b1 = std::min(n, b0 + kBlock);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
      for (long i = b0; i < b1; ++i) vals[static_cast<std::size_t>(i - b0)] = f(s.points[static_cast<std::size_t>(i)]).levi_min();
    } else {
      for (long i = b0; i < b1; ++i) vals[static_cast<std::size_t>(i - b0)] = f(s.points[static_cast<std::size_t>(i)]).levi_min();
    }
    for (long i = b0; i < b1; ++i) {
      const double v = vals[static_cast<std::size_t>(i - b0)];
      if (v < out.min_levi) {
        out.min_levi = v;
        out.at_radius = s.points[static_cast<std::size_t>(i)].norm();
      }
    }
    out.evaluated = b1;
    if (stop_at_nonpositive && !(out.min_levi > 0)) break;
  }
  return out;
}

std::vector<ReportItem> verify_glue(const GluingProblem& prob, double eps, double delta, const SampleSet& s,
                                    Exec exec) {
  check_problem(prob);
  std::vector<ReportItem> items(3);
  items[0].name = "locality-outside";
  items[1].name = "equals-eps-rlambda2-inside";
  items[2].name = "levi-positive";
  const double inner2 = prob.psi.plateau * delta * delta;
  for (const CVec& z : s.points) {
    const double r = z.norm();
    if (r >= prob.phi.support) {
      const double q = glued_jet(prob, eps, delta, z).value;
      const double p = prob.potential->value(z);
      const double d = std::abs(q - p) / (1 + std::abs(p));
      ++items[0].samples;
      if (d > items[0].worst || items[0].samples == 1) {
        items[0].worst = d;
        items[0].worst_radius = r;
      }
    }
    if (r * r <= inner2 && r <= prob.phi.plateau) {
      const double q = glued_jet(prob, eps, delta, z).value;
      const double target = eps * std::pow(weighted_radius(z, prob.weights), 2);
      const double scale = std::abs(prob.potential->value(z)) + target;
      const double d = std::abs(q - target) / std::max(scale, std::numeric_limits<double>::min());
      ++items[1].samples;
      if (d > items[1].worst || items[1].samples == 1) {
        items[1].worst = d;
        items[1].worst_radius = r;
      }
    }
  }
  items[0].pass = items[0].samples > 0 && items[0].worst <= 1e-12;
  items[0].detail = items[0].samples == 0 ? "no samples outside supp φ"
                                          : "max |q − p|/(1+|p|) = " + fmt(items[0].worst) + " over r ≥ " +
                                                fmt(prob.phi.support);
  items[1].pass = items[1].samples > 0 && items[1].worst <= 1e-12;
  items[1].detail = items[1].samples == 0 ? "no samples where ψ(r²/δ²) = φ = 1"
                                          : "max relative |q − εr_λ²| = " + fmt(items[1].worst) + " over r ≤ " +
                                                fmt(std::sqrt(inner2));

  LeviSweep sw = levi_sweep([&](const CVec& z) { return glued_jet(prob, eps, delta, z); }, s, false, exec);
  items[2].samples = sw.evaluated;
  items[2].worst = sw.min_levi;
  items[2].worst_radius = sw.at_radius;
  items[2].pass = sw.min_levi > 0;
  items[2].detail = "min λ_min(Levi q) = " + fmt(sw.min_levi) + " at r = " + fmt(sw.at_radius) + " (δ = " +
                    fmt(delta) + ")";
  return items;
}

bool GlueResult::pass() const {
  if (items.size() != 3) return false;
  return std::all_of(items.begin(), items.end(), [](const ReportItem& i) { return i.pass; });
}

GlueResult glue_potential(const GluingProblem& prob, const GlueOptions& opts) {
  check_problem(prob);
  const int m = prob.weights.m();
  const double R = prob.potential->domain_radius();
  SampleSet all = stratified_samples(m, R, opts.shells, opts.per_shell, opts.seed);

  GlueResult res;
  res.samples = static_cast<long>(all.points.size());
  res.constants = estimate_constants(prob, all);
  const GluingConstants& C = res.constants;

  auto p_plus = [&](double eps) {
    return [&prob, eps](const CVec& z) {
      Jet r2 = radius_squared_jet(z);
      return field_jet(*prob.potential, z) + eps * product(phi_jet(prob.phi, r2), weighted_radius_squared_jet(z, prob.weights));
    };
  };

  // ε: halve from 1 until p + εφr_λ² is strictly PSH on the samples
  double eps = 0;
  {
    double e = 1;
    for (int k = 0; k <= opts.eps_halvings; ++k, e /= 2) {
      LeviSweep sw = levi_sweep(p_plus(e), all, true, opts.exec);
      if (sw.min_levi > 0) {
        eps = e;
        break;
      }
    }
  }
  if (eps == 0) {
    throw GlueError("no ε in the halving range makes p + εφr_λ² strictly plurisubharmonic on the samples", res);
  }

  const double beta = prob.weights.beta;
  const double c = std::min(beta * beta, C.nu);
  auto attempt = [&](double e, double d, const std::string& src, bool stop) {
    GlueAttempt a{e, d, src, false, 0, 0};
    LeviSweep sw = levi_sweep([&](const CVec& z) { return glued_jet(prob, e, d, z); }, all, stop, opts.exec);
    a.min_levi = sw.min_levi;
    a.at_radius = sw.at_radius;
    a.pass = sw.min_levi > 0;
    res.attempts.push_back(a);
    return a.pass;
  };
  auto accept = [&](double e, double d, const std::string& src) {
    res.eps = e;
    res.delta = d;
    res.delta_source = src;
    res.items = verify_glue(prob, e, d, all, opts.exec);
    return res.pass();
  };

  // δ from min{β², ν} δ^{2(1−β)} = M/ε, halved once; admissible only if φ ≡ 1 on r ≤ δ
  res.delta_rule = std::pow(C.M / (eps * c), 1.0 / (2 * (1 - beta)));
  res.delta_rule_admissible = res.delta_rule / 2 <= prob.phi.plateau;
  if (res.delta_rule_admissible && attempt(eps, res.delta_rule / 2, "rule", true) &&
      accept(eps, res.delta_rule / 2, "rule")) {
    return res;
  }
  // the same rule with the exponent sign reversed, which is what r ≤ δ ⇒ ε ddᶜr_λ² ≥ M ddᶜr² needs
  const double d_rev = std::pow(eps * c / C.M, 1.0 / (2 * (1 - beta))) / 2;
  if (d_rev <= prob.phi.plateau && attempt(eps, d_rev, "rule-reciprocal", true) && accept(eps, d_rev, "rule-reciprocal")) {
    return res;
  }
  // fallback: ε halving from 1, δ halving from the φ plateau
  double e = 1;
  for (int k = 0; k <= opts.eps_halvings; ++k, e /= 2) {
    double d = prob.phi.plateau;
    for (int j = 0; j <= opts.delta_halvings; ++j, d /= 2) {
      if (attempt(e, d, "search", true) && accept(e, d, "search")) return res;
    }
  }

  const auto best = std::max_element(res.attempts.begin(), res.attempts.end(),
                                     [](const GlueAttempt& a, const GlueAttempt& b) { return a.min_levi < b.min_levi; });
  std::string msg = "no admissible (ε, δ) found: ";
  msg += res.delta_rule_admissible ? "the δ-rule value " : "the δ-rule value is inadmissible (δ = ";
  msg += fmt(res.delta_rule / 2) + (res.delta_rule_admissible ? " fails" : " exceeds the φ plateau)");
  if (best != res.attempts.end()) {
    msg += "; best attempt ε = " + fmt(best->eps) + ", δ = " + fmt(best->delta) + " has λ_min(Levi q) = " +
           fmt(best->min_levi) + " at r = " + fmt(best->at_radius) + " (r/δ = " + fmt(best->at_radius / best->delta) + ")";
  }
  res.eps = 0;
  res.delta = 0;
  throw GlueError(msg, res);
}

json glue_report_json(const GluingProblem& prob, const GlueResult& r) {
  json j;
  j["weights"] = prob.weights.lambda;
  j["eps"] = r.eps;
  j["delta"] = r.delta;
  j["delta_source"] = r.delta_source;
  j["delta_rule"] = r.delta_rule;
  j["delta_rule_admissible"] = r.delta_rule_admissible;
  j["constants"] = {{"M0", r.constants.M0},       {"M1", r.constants.M1},
                    {"nu", r.constants.nu},       {"M", r.constants.M},
                    {"sup_psi_d1", r.constants.sup_psi_d1}, {"sup_psi_d2", r.constants.sup_psi_d2}};
  j["cutoffs"] = {{"phi", {{"plateau", prob.phi.plateau}, {"support", prob.phi.support}}},
                  {"psi", {{"plateau", prob.psi.plateau}, {"support", prob.psi.support}}}};
  j["samples"] = r.samples;
  auto claim = [](const std::string& name) -> std::string {
    if (name == "locality-outside") return "q = p outside the support of phi";
    if (name == "equals-eps-rlambda2-inside") return "q = eps r_lambda^2 near the vertex";
    return "q is strictly plurisubharmonic";
  };
  json items = json::array();
  for (const auto& i : r.items) {
    items.push_back({{"name", i.name},
                     {"claim", claim(i.name)},
                     {"verdict", i.pass ? "PASS" : "FAIL"},
                     {"samples", i.samples},
                     {"worst", i.worst},
                     {"worst_radius", i.worst_radius},
                     {"detail", i.detail}});
  }
  j["items"] = items;
  json att = json::array();
  for (const auto& a : r.attempts) {
    att.push_back({{"eps", a.eps},
                   {"delta", a.delta},
                   {"source", a.source},
                   {"pass", a.pass},
                   {"min_levi", a.min_levi},
                   {"at_radius", a.at_radius}});
  }
  j["attempts"] = att;
  j["verdict"] = r.pass() ? "PASS" : "FAIL";
  return j;
}

}  // namespace conelab
