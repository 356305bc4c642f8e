#include "doctest.h"

#include <cmath>
#include <random>

#include "conelab/cone.hpp"
#include "conelab/error.hpp"
#include "conelab/generators.hpp"
#include "conelab/mesh.hpp"
#include "oracles.hpp"

using namespace conelab;

namespace {

std::shared_ptr<const DiscreteHodge> hodge_of(const std::string& name) {
  auto c = std::make_shared<const SimplicialComplex>(generate(name));
  return std::make_shared<const DiscreteHodge>(DiscreteHodge::build(c));
}

HomogeneousForm random_form(const ConeGeometry& g, int p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  HomogeneousForm f = zero_form(g, p, 3.0 * u(rng));
  for (Eigen::Index i = 0; i < f.phi_prime.size(); ++i) f.phi_prime(i) = u(rng);
  for (Eigen::Index i = 0; i < f.phi_dprime.size(); ++i) f.phi_dprime(i) = u(rng);
  return f;
}

HomogeneousForm add(const HomogeneousForm& a, const HomogeneousForm& b) {
  HomogeneousForm s = a;
  s.phi_prime += b.phi_prime;
  s.phi_dprime += b.phi_dprime;
  return s;
}

}  // namespace

TEST_CASE("d d* + d* d reproduces the cone Laplacian") {
  std::mt19937_64 rng(11);
  for (const char* name : {"sphere:3", "torus:3:3", "s2xs1:0:4"}) {
    auto h = hodge_of(name);
    auto g = ConeGeometry::over(h, h->dim() + 1);
    for (int p = 0; p <= g.l; ++p) {
      for (int t = 0; t < 5; ++t) {
        HomogeneousForm f = random_form(g, p, rng);
        HomogeneousForm lhs = add(cone_dstar(cone_d(f, g), g), cone_d(cone_dstar(f, g), g));
        HomogeneousForm rhs = cone_laplacian(f, g);
        CHECK(lhs.beta == doctest::Approx(f.beta - 2));
        CHECK(form_distance(lhs, rhs) < 1e-10 * (1 + form_norm(rhs)));
      }
    }
  }
}

TEST_CASE("cone d squares to zero") {
  std::mt19937_64 rng(5);
  auto h = hodge_of("sphere:3");
  auto g = ConeGeometry::over(h, 4);
  for (int p = 0; p + 2 <= g.l; ++p) {
    HomogeneousForm f = random_form(g, p, rng);
    HomogeneousForm dd = cone_d(cone_d(f, g), g);
    CHECK(form_norm(dd) < 1e-11 * (1 + form_norm(f)));
  }
}

// The cone over a circle of length 2π is the flat plane, where
// Δ(r^γ cos kθ) = (k² − γ²) r^{γ−2} cos kθ for the positive Laplacian.
TEST_CASE("cone over a circle matches the planar Laplacian") {
  const int N = 256;
  auto h = hodge_of("circle:" + std::to_string(N));
  auto g = ConeGeometry::over(h, 2);
  const auto& X = h->complex().coordinates();
  for (int k : {1, 2, 3}) {
    Vec f(N);
    for (int v = 0; v < N; ++v) f(v) = std::cos(k * std::atan2(X(v, 1), X(v, 0)));
    for (double gam : {0.5, 1.7, 3.0}) {
      const double lam = k * k - gam * gam;
      const double scale = k * k + gam * gam;
      HomogeneousForm F = zero_form(g, 0, gam);
      F.phi_dprime = f;
      HomogeneousForm L = cone_laplacian(F, g);
      CHECK((L.phi_dprime - lam * f).norm() <= 1e-3 * scale * f.norm());

      // the exact 1-form d(r^γ f) = r^γ (γ f dlog r + df)
      HomogeneousForm W = cone_d(F, g);
      CHECK((W.phi_prime - gam * f).norm() < 1e-12 * f.norm());
      HomogeneousForm LW = cone_laplacian(W, g);
      Vec df = h->apply_d(0, f);
      CHECK((LW.phi_prime - lam * (gam - 2) * f).norm() <= 1e-3 * scale * (1 + std::abs(gam - 2)) * f.norm());
      CHECK((LW.phi_dprime - lam * df).norm() <= 1e-3 * scale * df.norm());
    }
  }
}

TEST_CASE("E is a symmetric pencil whose strong form is B⁻¹A") {
  auto h = hodge_of("sphere:3");
  auto g = ConeGeometry::over(h, 4);
  std::mt19937_64 rng(3);
  for (int p = 0; p <= 4; ++p) {
    SymmetricPencil E = assemble_E(g, p);
    CHECK(E.size() == g.size(p - 1) + g.size(p));
    Mat A = E.dense_A();
    Mat B = Mat(E.B);
    CHECK((A - A.transpose()).norm() < 1e-12 * (1 + A.norm()));
    CHECK((B - B.transpose()).norm() < 1e-14 * B.norm());
    Vec x = Vec::Random(E.size());
    Vec strong = apply_E(g, p, x);
    Vec weak = B.ldlt().solve(A * x);
    CHECK((strong - weak).norm() < 1e-9 * (1 + weak.norm()));
  }
}

TEST_CASE("E eigenvectors give harmonic homogeneous forms at both roots") {
  auto h = hodge_of("sphere:3");
  auto g = ConeGeometry::over(h, 4);
  for (int p = 1; p <= 3; ++p) {
    ConeReport r = indicial_analysis(g, p, 12);
    const Eigen::Index n1 = g.size(p - 1);
    for (std::size_t j = 0; j < r.indicial.size(); ++j) {
      const IndicialDatum& d = r.indicial[j];
      if (d.quarantined) continue;
      const Vec x = r.spectrum.eigenvectors.col(static_cast<Eigen::Index>(j));
      for (double root : {d.alpha_root, d.beta_root}) {
        HomogeneousForm f = zero_form(g, p, root);
        f.phi_prime = x.head(n1);
        f.phi_dprime = x.tail(g.size(p));
        HomogeneousForm L = cone_laplacian(f, g);
        CHECK(form_norm(L) < 1e-6 * (1 + std::abs(d.lambda)) * form_norm(f));
        CHECK(f.order() == doctest::Approx(root - p));
      }
    }
  }
}

TEST_CASE("indicial root algebra") {
  for (double m : {0.5, 1.0, 2.0}) {
    IndicialDatum z = indicial_roots(0.0, m, 3);
    CHECK(z.alpha_root == doctest::Approx(2 * m));
    CHECK(z.beta_root == doctest::Approx(0.0));
    CHECK(z.order_beta == doctest::Approx(-3.0));
    IndicialDatum w = indicial_roots(-m * m, m, 1);
    CHECK(w.alpha_root == doctest::Approx(m));
    CHECK(w.beta_root == doctest::Approx(m));
  }
  IndicialDatum s = indicial_roots(2.25, 0.0, 2);
  CHECK(s.alpha_root == doctest::Approx(1.5));
  CHECK(s.beta_root == doctest::Approx(-1.5));
  CHECK(s.order_alpha + s.order_beta == doctest::Approx(-4.0));
  // both roots solve ξ² − 2mξ − λ = 0
  for (double lam : {-0.3, 0.0, 1.0, 7.5}) {
    IndicialDatum d = indicial_roots(lam, 1.5, 2);
    for (double xi : {d.alpha_root, d.beta_root}) CHECK(xi * xi - 3.0 * xi - lam == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("T3 link at the middle degree: harmonic 1-forms give the only zero modes") {
  auto h = hodge_of("torus:3:4");
  auto g = ConeGeometry::over(h, 4);
  ConeReport r = indicial_analysis(g, 1, 8);
  CHECK(r.m == 0.0);
  NearZero nz = count_near_zero(r.spectrum);
  CHECK(nz.count == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(r.indicial[j].double_root);
    CHECK(r.indicial[j].order_alpha == doctest::Approx(-1.0));
  }
  CHECK(nolog_verdict(r).verdict == Verdict::FlaggedBoundary);

  auto betti = conelab::betti(h->complex()).b;
  bool saw = false;
  for (const WindowVerdict& w : classify_windows(r, g, betti)) {
    if (w.name == "order-minus-p-closed") {
      saw = true;
      CHECK(w.applicable);
      CHECK(w.verdict == Verdict::Pass);
    }
  }
  CHECK(saw);
}

TEST_CASE("sphere link: every applicable window statement holds") {
  auto h = hodge_of("sphere:3");
  auto g = ConeGeometry::over(h, 4);
  auto betti = conelab::betti(h->complex()).b;
  for (int p = 0; p <= 4; ++p) {
    ConeReport r = indicial_analysis(g, p, 12);
    if (r.m != 0) CHECK(nolog_verdict(r).verdict == Verdict::Pass);
    CHECK(r.spectrum.eigenvalues(0) >= -r.m * r.m - 0.05 * (1 + r.m * r.m));
    for (const WindowVerdict& w : classify_windows(r, g, betti)) {
      INFO(p, " ", w.name, " ", w.detail);
      if (w.applicable) CHECK(w.verdict == Verdict::Pass);
    }
  }
}

TEST_CASE("no-log verdict policy") {
  ConeReport r;
  r.m = 1;
  r.nolog_gap = 0.05;
  CHECK(nolog_verdict(r).verdict == Verdict::Fail);
  r.nolog_gap = 0.5;
  CHECK(nolog_verdict(r).verdict == Verdict::Pass);
  r.m = 0;
  r.nolog_gap = 0.0;
  CHECK(nolog_verdict(r).verdict == Verdict::FlaggedBoundary);
}

TEST_CASE("Fredholm windows avoid every exceptional order") {
  auto h = hodge_of("sphere:3");
  auto g = ConeGeometry::over(h, 4);
  ConeReport r = indicial_analysis(g, 1, 20);
  REQUIRE(r.complete_lo < -1.5);
  REQUIRE(r.complete_hi > 1.5);
  auto ws = fredholm_windows(r, -1.5, 1.5);
  REQUIRE(!ws.empty());
  for (const auto& w : ws) {
    CHECK(w.lo < w.hi);
    for (const auto& e : r.exceptional) CHECK(!(e.order > w.lo && e.order < w.hi));
  }
  // the windows and the exceptional orders inside [a, b] tile the interval
  double cursor = -1.5;
  for (const auto& w : ws) {
    if (w.lo > cursor + 1e-12) {
      bool hit = false;
      for (const auto& e : r.exceptional) hit = hit || std::abs(e.order - w.lo) < 1e-9;
      CHECK(hit);
    }
    cursor = w.hi;
  }
  CHECK(cursor == doctest::Approx(1.5));

  ConeReport few = indicial_analysis(g, 1, 4);
  REQUIRE(std::isfinite(few.complete_hi));
  CHECK_THROWS_AS(fredholm_windows(few, -1.5, few.complete_hi + 10), InvalidArgument);
}

TEST_CASE("indicial diagonalization identity") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ub(-6, 6);
  std::uniform_int_distribution<int> ul(2, 9);
  int done = 0;
  while (done < 1000) {
    const double beta = ub(rng);
    const int l = ul(rng);
    const int p = std::uniform_int_distribution<int>(0, l)(rng);
    if (std::abs(2 * beta + l - 2 - 2 * p) < 1e-3) continue;
    Diagonalization d = check_diagonalization(beta, l, p);
    CHECK(d.residual < 1e-10);
    // independent oracle: D carries the eigenvalues of M
    Eigen::EigenSolver<Eigen::Matrix2d> es(d.M);
    std::vector<double> ev{es.eigenvalues()(0).real(), es.eigenvalues()(1).real()};
    std::vector<double> dv{d.D(0, 0), d.D(1, 1)};
    std::sort(ev.begin(), ev.end());
    std::sort(dv.begin(), dv.end());
    const double sc = 1 + d.M.cwiseAbs().maxCoeff();
    CHECK(std::abs(ev[0] - dv[0]) < 1e-8 * sc);
    CHECK(std::abs(ev[1] - dv[1]) < 1e-8 * sc);
    ++done;
  }

  Diagonalization ex = check_diagonalization(1.0, 6, 2);
  Eigen::Matrix2d M;
  M << 1, 2, 2, 1;
  CHECK((ex.M - M).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ex.D(0, 0) == doctest::Approx(3.0));
  CHECK(ex.D(1, 1) == doctest::Approx(-1.0));

  CHECK_THROWS_AS(check_diagonalization(0.0, 6, 2), InvalidArgument);
}

TEST_CASE("cone geometry validation") {
  auto h = hodge_of("sphere:2");
  CHECK_THROWS_AS(ConeGeometry::over(h, 4), InvalidArgument);
  auto g = ConeGeometry::over(h, 3);
  CHECK_THROWS_AS(assemble_E(g, 4), InvalidArgument);
  CHECK_THROWS_AS(assemble_E(g, -1), InvalidArgument);
}
