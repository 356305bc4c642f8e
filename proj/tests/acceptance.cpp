// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "conelab/artin.hpp"
#include "conelab/catalog.hpp"
#include "conelab/cone.hpp"
#include "conelab/dec.hpp"
#include "conelab/eigensolver.hpp"
#include "conelab/generators.hpp"
#include "conelab/kahler.hpp"
#include "conelab/mesh.hpp"
#include "oracles.hpp"

using namespace conelab;

namespace {

// Link meshes of the catalog: ∂Δ⁴, T³, icosphere × circle.
const std::vector<std::string> kLinks = {"sphere:3", "torus:3:4", "s2xs1:1:8"};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::shared_ptr<const DiscreteHodge> hodge_of(const std::string& spec) {
  auto c = std::make_shared<const SimplicialComplex>(generate(spec));
  return std::make_shared<const DiscreteHodge>(DiscreteHodge::build(c));
}

// 1
Outcome indicial_algebra() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> beta(-6.0, 6.0);
  std::uniform_int_distribution<int> ldist(2, 8);
  double worst = 0;
  int done = 0, skipped = 0;
  while (done < 1000) {
    const double b = beta(rng);
    const int l = ldist(rng);
    const int p = std::uniform_int_distribution<int>(0, l)(rng);
    if (std::abs(2 * b + l - 2 - 2 * p) < 1e-6) {
      ++skipped;
      continue;
    }
    worst = std::max(worst, check_diagonalization(b, l, p).residual);
    ++done;
  }
  return {worst < 1e-10, fmt("max |P^-1 M P - D| = %.2e over %d draws (tol 1e-10)", worst, done)};
}

// 2
Outcome cone_identity() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  int forms = 0;
  for (const auto& spec : kLinks) {
    auto h = hodge_of(spec);
    auto g = ConeGeometry::over(h, h->dim() + 1);
    for (int t = 0; t < 100; ++t) {
      const int p = t % (g.l + 1);
      HomogeneousForm f = zero_form(g, p, 4.0 * u(rng));
      for (Eigen::Index i = 0; i < f.phi_prime.size(); ++i) f.phi_prime(i) = u(rng);
      for (Eigen::Index i = 0; i < f.phi_dprime.size(); ++i) f.phi_dprime(i) = u(rng);
      HomogeneousForm a = cone_dstar(cone_d(f, g), g);
      HomogeneousForm b = cone_d(cone_dstar(f, g), g);
      a.phi_prime += b.phi_prime;
      a.phi_dprime += b.phi_dprime;
      HomogeneousForm rhs = cone_laplacian(f, g);
      worst = std::max(worst, form_distance(a, rhs) / (1 + form_norm(rhs)));
      ++forms;
    }
  }
  return {worst < 1e-10, fmt("max residual / (1 + |rhs|) = %.2e over %d forms (tol 1e-10)", worst, forms)};
}

// 3
Outcome torus_spectrum() {
  auto ref = oracle::torus_eigenvalues(3, 7);
  auto err_of = [&](int N, double& lam0, double& rel) {
    auto h = DiscreteHodge::build(flat_torus(3, N));
    auto s = eigensolve(laplacian(h, 0), 7);
    lam0 = std::abs(s.eigenvalues(0));
    double e = 0;
    rel = 0;
    for (int j = 1; j <= 6; ++j) {
      e = std::max(e, std::abs(s.eigenvalues(j) - ref[j]));
      rel = std::max(rel, std::abs(s.eigenvalues(j) - ref[j]) / ref[j]);
    }
    return e;
  };
  double l8, r8, l16, r16;
  const double e8 = err_of(8, l8, r8);
  const double e16 = err_of(16, l16, r16);
  const bool ok = l8 < 1e-8 && r8 < 0.1 && e16 <= 0.5 * e8;
  return {ok, fmt("N=8: |lam0| = %.1e, max rel err lam1..6 = %.4f (tol 0.1); N=16 error ratio %.3f (need <= 0.5)", l8,
                  r8, e16 / e8)};
}

// 4
Outcome hodge_counts() {
  struct Case {
    std::string spec;
    int maxp;
  };
  const std::vector<Case> cases = {{"torus:3:4", 3}, {"icosphere:2", 2}, {"s2xs1:1:8", 2}};
  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    auto h = DiscreteHodge::build(generate(c.spec));
    auto b = betti(h.complex()).b;
    detail += c.spec + " [";
    for (int p = 0; p <= c.maxp; ++p) {
      auto s = eigensolve(laplacian(h, p), static_cast<int>(b[p]) + 6);
      const int n = count_near_zero(s).count;
      ok = ok && n == b[p];
      detail += fmt("%s%d/%ld", p ? " " : "", n, b[p]);
    }
    detail += "] ";
  }
  return {ok, detail + "(near-zero/Betti)"};
}

// 5 and 6 share the E spectra.
struct LinkDegree {
  std::string spec;
  int p;
  ConeReport report;
};

std::vector<LinkDegree> e_spectra() {
  std::vector<LinkDegree> out;
  for (const auto& spec : kLinks) {
    auto h = hodge_of(spec);
    auto g = ConeGeometry::over(h, h->dim() + 1);
    for (int p = 0; p <= g.l; ++p) out.push_back({spec, p, indicial_analysis(g, p, 10)});
  }
  return out;
}

Outcome lower_bound(const std::vector<LinkDegree>& all) {
  double worst = INFINITY;
  std::string where;
  bool ok = true;
  for (const auto& c : all) {
    if (c.p < 1 || c.p > c.report.l - 1) continue;
    const double m = c.report.m;
    const double margin = c.report.spectrum.eigenvalues(0) + m * m + 0.05 * (1 + m * m);
    if (margin < worst) {
      worst = margin;
      where = fmt("%s p=%d", c.spec.c_str(), c.p);
    }
    ok = ok && margin >= 0;
  }
  return {ok, fmt("min (lam_min + m^2 + 0.05(1+m^2)) = %.4f at %s (need >= 0)", worst, where.c_str())};
}

Outcome nolog(const std::vector<LinkDegree>& all) {
  bool ok = true;
  std::string fails, flagged;
  int passed = 0;
  for (const auto& c : all) {
    NologResult v = nolog_verdict(c.report, 0.1);
    const std::string tag = fmt("%s p=%d gap %.3g", c.spec.c_str(), c.p, v.gap);
    if (c.report.m == 0) {
      if (v.gap <= 0.1 && v.verdict == Verdict::Pass) ok = false;
      if (v.verdict == Verdict::FlaggedBoundary) flagged += (flagged.empty() ? "" : ", ") + tag;
      continue;
    }
    if (v.verdict == Verdict::Pass) {
      ++passed;
    } else {
      ok = false;
      fails += (fails.empty() ? "" : ", ") + tag;
    }
  }
  std::string d = fmt("%d m!=0 pairs pass (gap tol 0.1)", passed);
  if (!fails.empty()) d += "; failing: " + fails;
  if (!flagged.empty()) d += "; flagged m=0: " + flagged;
  return {ok, d};
}

// 7
Outcome eigenvector_structure() {
  auto h = hodge_of("torus:3:4");
  auto g = ConeGeometry::over(h, 4);
  const int p = 1;
  ConeReport r = indicial_analysis(g, p, 8);
  const int zeros = count_near_zero(r.spectrum).count;
  const Eigen::Index n1 = g.size(p - 1), n2 = g.size(p);
  double worst_prime = 0, worst_d = 0, worst_delta = 0;
  for (int j = 0; j < zeros; ++j) {
    Vec x = r.spectrum.eigenvectors.col(j);
    Vec a = x.head(n1), b = x.tail(n2);
    const double nb = std::sqrt(h->inner(p, b, b));
    const double na = std::sqrt(h->inner(p - 1, a, a));
    Vec db = h->apply_d(p, b);
    Vec cb = h->codifferential(p, b);
    worst_prime = std::max(worst_prime, na / std::sqrt(na * na + nb * nb));
    worst_d = std::max(worst_d, std::sqrt(h->inner(p + 1, db, db)) / nb);
    worst_delta = std::max(worst_delta, std::sqrt(h->inner(p - 1, cb, cb)) / nb);
  }
  const bool ok = zeros > 0 && worst_prime < 1e-4 && worst_d < 1e-4 && worst_delta < 1e-4;
  return {ok, fmt("%d zero modes on T3 (l=4, p=1): |phi'|/|phi| = %.1e, |d phi''| = %.1e, |delta phi''| = %.1e "
                  "relative (tol 1e-4)",
                  zeros, worst_prime, worst_d, worst_delta)};
}

// 8
Outcome weighted_radius_check() {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss;
  double worst = 0;
  long violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const int m = 1 + i % 4;
    std::vector<double> lam(m);
    for (auto& l : lam) l = 0.05 + 0.9 * u(rng);
    WeightData w = WeightData::make(lam);
    CVec z(m);
    for (int a = 0; a < m; ++a) z(a) = {gauss(rng), gauss(rng)};
    z *= std::max(u(rng), 1e-3) / z.norm();
    const double rl = weighted_radius(z, w);
    worst = std::max(worst, std::abs(weighted_radius_residual(z, w, rl)));
    const double r = z.norm();
    if (rl < std::pow(r, w.beta) * (1 - 1e-12) || rl > std::pow(r, w.alpha) * (1 + 1e-12)) ++violations;
  }
  return {worst < 1e-12 && violations == 0,
          fmt("max residual %.2e (tol 1e-12); r^beta <= r_lambda <= r^alpha violated at %ld of 10000 points", worst,
              violations)};
}

// 9
Outcome gluing() {
  GluingProblem prob;
  prob.weights = WeightData::make({0.7, 0.9});
  prob.potential = std::make_shared<PolynomialPotential>(PolynomialPotential::from_dictionary(
      json{{"z1 zbar1", 1.0}, {"z2 zbar2", 1.0}, {"z1^2", 0.15}, {"zbar1^2", 0.15}}, 2, 1.0));
  try {
    GlueResult r = glue_potential(prob);
    std::string d = fmt("eps=%.3g delta=%.3g, %ld samples:", r.eps, r.delta, r.samples);
    for (const auto& it : r.items) d += " " + it.name + (it.pass ? " PASS" : " FAIL");
    return {r.pass() && r.samples >= 10000, d};
  } catch (const GlueError& e) {
    return {false, std::string("no verified (eps, delta): ") + e.what()};
  }
}

// 10
double binom(long n, long k) {
  if (k < 0 || n < k) return 0;
  double b = 1;
  for (long i = 1; i <= k; ++i) b = b * double(n - k + i) / double(i);
  return b;
}

// dim H^q(ℙⁿ, Ωᵖ(k)) from Bott's formula.
double bott_dimension(int n, int p, int q, int k) {
  double d = 0;
  if (q == 0 && k > p) d += binom(k + n - p, k) * binom(k - 1, p);
  if (q == n && k < p - n) d += binom(-k + p, -k) * binom(-k - 1, n - p);
  if (k == 0 && p == q) d += 1;
  return d;
}

Outcome bott_table() {
  long checked = 0, mismatches = 0;
  for (int n = 1; n <= 6; ++n)
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n; ++q)
        for (int k = -12; k <= 12; ++k) {
          ++checked;
          if (bott_vanishes({n, p, q, k}) != (bott_dimension(n, p, q, k) == 0)) ++mismatches;
        }
  bool instances = true;
  for (int n = 4; n <= 10; ++n) {
    instances = instances && bott_vanishes({n, n - 1, 1, n - 3});
    instances = instances && bott_vanishes({n, n - 1, 0, n - 1});
  }
  return {mismatches == 0 && instances,
          fmt("%ld mismatches against Bott's dimension formula over %ld entries; H^1(P^n, Omega^{n-1}(n-3)) and "
              "H^0(P^n, Omega^{n-1}(n-1)) vanish for n=4..10: %s",
              mismatches, checked, instances ? "yes" : "no")};
}

// 11
Outcome du_bois_ladder() {
  bool ok = true;
  std::string d;
  for (int n = 2; n <= 8; ++n) {
    const Rational alpha = minimal_exponent(std::vector<long>(n + 1, 1), 2);
    Rational half(n + 1, 2);
    half.canonicalize();
    const bool alpha_ok = alpha == half;
    // largest k with (n+1)/2 ≥ k+1
    int expect = -1;
    while (n + 1 >= 2 * (expect + 2)) ++expect;
    const auto level = du_bois_level(alpha);
    const bool level_ok = level.has_value() && *level == expect;
    ok = ok && alpha_ok && level_ok;
    d += fmt("%sn=%d a=%s k=%d", n > 2 ? ", " : "", n, to_string(alpha).c_str(), level ? *level : -1);
  }
  return {ok, d};
}

// 12
Outcome artin_suite() {
  int iso_ok = 0;
  for (int k = 1; k <= 5; ++k) {
    ArtinAlgebra a = truncated_poly(k);
    if (small_extension_isomorphism(a, a.basis(k)).verified) ++iso_ok;
  }
  std::mt19937_64 rng(1212);
  int reflexive = 0;
  for (int t = 0; t < 500; ++t) {
    const int k = std::uniform_int_distribution<int>(0, 4)(rng);
    FiniteModule m = random_truncated_module(k, 8, rng);
    if (m.verify() && reflexivity_check(m).reflexive) ++reflexive;
  }
  int squares = 0;
  for (int k = 2; k <= 5; ++k) {
    LiftMaps up = lift_maps(k), low = lift_maps(k - 1);
    const bool homs = up.pi.is_homomorphism() && up.theta.is_homomorphism() && up.varpi.is_homomorphism();
    if (homs && same_map(compose(low.varpi, up.theta), compose(low.theta, up.pi))) ++squares;
  }
  return {iso_ok == 5 && reflexive == 500 && squares == 4,
          fmt("isomorphism %d/5 (k<=5), reflexive %d/500 (k<=4, rank<=8), squares %d/4", iso_ok, reflexive, squares)};
}

}  // namespace

int main() {
  configure_threads_from_env();
  int failures = 0;
  auto run = [&](int id, const char* name, double budget_s, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0 && secs > budget_s) {
      o.pass = false;
      o.detail += fmt(" [over budget %.0f s]", budget_s);
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %-22s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  run(1, "indicial-algebra", 1, indicial_algebra);
  run(2, "cone-identity", 10, cone_identity);
  run(3, "torus-spectrum", 120, torus_spectrum);
  run(4, "hodge-counts", 120, hodge_counts);
  std::vector<LinkDegree> spectra;
  const auto t0 = std::chrono::steady_clock::now();
  spectra = e_spectra();
  const double e_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("     E spectra for %zu (link, p) pairs computed in %.2f s\n", spectra.size(), e_secs);
  run(5, "lower-bound", 0, [&] { return lower_bound(spectra); });
  run(6, "nolog-gap", 0, [&] { return nolog(spectra); });
  run(7, "eigenvector-structure", 0, eigenvector_structure);
  run(8, "weighted-radius", 5, weighted_radius_check);
  run(9, "gluing", 30, gluing);
  run(10, "bott-table", 1, bott_table);
  run(11, "du-bois-ladder", 0, du_bois_ladder);
  run(12, "artin-suite", 30, artin_suite);

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
