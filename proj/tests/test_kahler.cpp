#include "doctest.h"

#include <cmath>
#include <random>

#include "conelab/kahler.hpp"

using namespace conelab;

namespace {

CVec random_point(std::mt19937_64& rng, int m, double rmax) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0, 1);
  CVec z(m);
  for (int a = 0; a < m; ++a) z(a) = {nd(rng), nd(rng)};
  return z * (rmax * std::pow(u(rng), 1.0 / (2 * m)) / z.norm());
}

std::shared_ptr<PolynomialPotential> criterion_potential() {
  json d = {{"z1 zbar1", 1.0}, {"z2 zbar2", 1.0}, {"z1^2", 0.15}, {"zbar1^2", 0.15}};
  return std::make_shared<PolynomialPotential>(PolynomialPotential::from_dictionary(d, 2, 1.0));
}

double max_abs(const CMat& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("weighted radius solves its defining equation") {
  std::mt19937_64 rng(1);
  WeightData w = WeightData::make({0.7, 0.9});
  for (int i = 0; i < 10000; ++i) {
    CVec z = random_point(rng, 2, 3.0);
    const double t = weighted_radius(z, w);
    CHECK(std::abs(weighted_radius_residual(z, w, t)) < 1e-12);
  }
  WeightData w3 = WeightData::make({0.2, 0.5, 0.95});
  for (double scale : {1e-8, 1e-3, 1.0, 1e3}) {
    CVec z = random_point(rng, 3, scale);
    CHECK(std::abs(weighted_radius_residual(z, w3, weighted_radius(z, w3))) < 1e-12);
  }
}

TEST_CASE("weighted radius special cases") {
  std::mt19937_64 rng(2);
  WeightData one = WeightData::make_positive({1.0, 1.0, 1.0});
  for (int i = 0; i < 50; ++i) {
    CVec z = random_point(rng, 3, 2.0);
    CHECK(weighted_radius(z, one) == doctest::Approx(z.norm()).epsilon(1e-13));
  }
  WeightData w = WeightData::make({0.6, 0.8});
  CVec z(2);
  z << std::complex<double>(0.3, -0.4), 0;
  CHECK(weighted_radius(z, w) == doctest::Approx(std::pow(0.5, 1 / 0.6)).epsilon(1e-13));
  CHECK_THROWS_AS(weighted_radius(CVec::Zero(2), w), InvalidArgument);
  CHECK_THROWS_AS(WeightData::make({0.5, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(WeightData::make({0.0}), InvalidArgument);
}

TEST_CASE("weighted radius is homogeneous under the weighted flow") {
  std::mt19937_64 rng(3);
  WeightData w = WeightData::make({0.3, 0.7, 0.9});
  std::uniform_real_distribution<double> us(-4, 4);
  for (int i = 0; i < 500; ++i) {
    CVec z = random_point(rng, 3, 1.5);
    const double s = us(rng);
    const double lhs = weighted_radius(weighted_flow(z, w, s), w);
    CHECK(lhs == doctest::Approx(std::exp(s) * weighted_radius(z, w)).epsilon(1e-10));
  }
}

// From the defining equation, r^{1/α} ≤ r_λ ≤ r^{1/β} when r ≤ 1 and the
// reverse when r ≥ 1.
TEST_CASE("weighted radius sandwich implied by the defining equation") {
  std::mt19937_64 rng(4);
  WeightData w = WeightData::make({0.4, 0.9});
  for (int i = 0; i < 5000; ++i) {
    CVec z = random_point(rng, 2, 3.0);
    const double r = z.norm(), t = weighted_radius(z, w);
    const double a = std::pow(r, 1 / w.alpha), b = std::pow(r, 1 / w.beta);
    const double lo = std::min(a, b), hi = std::max(a, b);
    CHECK(t >= lo * (1 - 1e-12));
    CHECK(t <= hi * (1 + 1e-12));
  }
}

TEST_CASE("Levi form by finite differences") {
  LambdaField sq(2, 2.0, [](const CVec& z) { return z.squaredNorm(); });
  LambdaField harm(2, 2.0, [](const CVec& z) { return (z(0) * z(0)).real(); });
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    CVec z = random_point(rng, 2, 1.0);
    CHECK(max_abs(levi_form(sq, z) - CMat::Identity(2, 2)) < 1e-9);
    CHECK(max_abs(levi_form(harm, z)) < 1e-9);
  }
  CVec edge(2);
  edge << 1.999, 0;
  CHECK_THROWS_AS(levi_form(sq, edge), InvalidArgument);

  WeightData half = WeightData::make({0.5, 0.5});
  LambdaField rl2(2, 2.0, [&](const CVec& z) { return std::pow(weighted_radius(z, half), 2); });
  for (int i = 0; i < 200; ++i) {
    CVec z = random_point(rng, 2, 1.0);
    if (z.norm() < 0.05) continue;
    Eigen::SelfAdjointEigenSolver<CMat> es(levi_form(rl2, z));
    CHECK(es.eigenvalues()(0) > 0);
  }
}

TEST_CASE("exact jets agree with finite differences") {
  std::mt19937_64 rng(6);
  WeightData w = WeightData::make({0.35, 0.8});
  LambdaField rl2(2, 3.0, [&](const CVec& z) { return std::pow(weighted_radius(z, w), 2); });
  auto p = criterion_potential();
  for (int i = 0; i < 100; ++i) {
    CVec z = random_point(rng, 2, 1.2);
    if (z.norm() < 0.1) continue;
    Jet ex = weighted_radius_squared_jet(z, w);
    Jet fd = field_jet(rl2, z, 1e-3);
    const double sc = 1 + max_abs(ex.levi);
    CHECK(ex.value == doctest::Approx(fd.value).epsilon(1e-14));
    CHECK((ex.dz - fd.dz).cwiseAbs().maxCoeff() < 1e-7 * sc);
    CHECK(max_abs(ex.levi - fd.levi) < 1e-6 * sc);
    CHECK(max_abs(ex.levi - ex.levi.adjoint()) < 1e-13 * sc);

    LambdaField pf(2, 3.0, [&](const CVec& x) { return p->value(x); });
    Jet pj = *p->exact_jet(z);
    Jet pfd = field_jet(pf, z, 1e-3);
    CHECK(max_abs(pj.levi - pfd.levi) < 1e-7);
    CHECK((pj.dz - pfd.dz).cwiseAbs().maxCoeff() < 1e-9);

    // product and composition against finite differences of the composite
    LambdaField comp(2, 3.0, [&](const CVec& x) {
      const double a = p->value(x), b = std::pow(weighted_radius(x, w), 2);
      return std::sin(a) * b;
    });
    Jet cj = product(compose(std::sin(pj.value), std::cos(pj.value), -std::sin(pj.value), pj), ex);
    Jet cfd = field_jet(comp, z, 1e-3);
    CHECK(max_abs(cj.levi - cfd.levi) < 1e-6 * sc);
  }
}

// λ_min Levi(r_λ²) ≥ c₀ r_λ^{2(1−α)} for r_λ ≤ 1, c₀ the minimum over the unit sphere,
// by homogeneity under the weighted flow.
TEST_CASE("Levi form of r_lambda^2 obeys the homogeneity lower bound") {
  std::mt19937_64 rng(7);
  WeightData w = WeightData::make({0.7, 0.9});
  double c0 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4000; ++i) {
    CVec u = random_point(rng, 2, 1.0);
    u /= u.norm();
    c0 = std::min(c0, weighted_radius_squared_jet(u, w).levi_min());
  }
  REQUIRE(c0 > 0);
  SampleSet s = stratified_samples(2, 1.0, 40, 50, 99);
  for (const CVec& z : s.points) {
    Jet j = weighted_radius_squared_jet(z, w);
    const double t = std::sqrt(j.value);
    CHECK(j.levi_min() >= 0.8 * c0 * std::pow(t, 2 * (1 - w.alpha)));
  }
}

TEST_CASE("polynomial potentials: parsing, realness, grid fit") {
  auto p = criterion_potential();
  CVec z(2);
  z << std::complex<double>(0.2, 0.1), std::complex<double>(-0.3, 0.25);
  const double expect = z.squaredNorm() + 0.3 * (z(0) * z(0)).real();
  CHECK(p->value(z) == doctest::Approx(expect).epsilon(1e-15));
  Jet j = *p->exact_jet(z);
  CHECK(max_abs(j.levi - CMat::Identity(2, 2)) < 1e-15);

  json bad = {{"z1^2", 1.0}};
  CHECK_THROWS_AS(PolynomialPotential::from_dictionary(bad, 1), InvalidArgument);
  json cplx = {{"z1 zbar2", {0.5, 0.25}}, {"z2 zbar1", {0.5, -0.25}}};
  auto pc = PolynomialPotential::from_dictionary(cplx);
  CHECK(pc.m() == 2);
  const std::complex<double> c(0.5, 0.25);
  CHECK(pc.value(z) == doctest::Approx(2 * (c * z(0) * std::conj(z(1))).real()).epsilon(1e-14));
  CHECK_THROWS_AS(PolynomialPotential::from_dictionary({{"w1", 1.0}}, 1), ParseError);
  CHECK_THROWS_AS(PolynomialPotential::from_dictionary({{"z3 zbar3", 1.0}}, 2), ParseError);

  // round trip through the dictionary form
  auto back = PolynomialPotential::from_dictionary(p->to_dictionary(), 2);
  CHECK(back.value(z) == doctest::Approx(p->value(z)).epsilon(1e-15));

  // samples of a degree-4 real polynomial are fitted exactly
  const int n = 6;
  const double R = 0.5;
  std::vector<double> vals;
  auto f = [](const CVec& x) {
    return std::norm(x(0)) + 2 * std::norm(x(1)) + (std::complex<double>(0.1, 0.2) * x(0) * x(1)).real() +
           std::norm(x(0)) * std::norm(x(1));
  };
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3) {
          CVec x(2);
          auto c1 = [&](int i) { return -R + 2 * R * i / (n - 1); };
          x << std::complex<double>(c1(i0), c1(i1)), std::complex<double>(c1(i2), c1(i3));
          vals.push_back(f(x));
        }
  auto g = PolynomialPotential::from_grid(2, R, n, vals, 4);
  CHECK(g.fit_residual() < 1e-12);
  CHECK(g.value(z) == doctest::Approx(f(z)).epsilon(1e-10));
  CHECK_THROWS_AS(PolynomialPotential::from_grid(2, R, n, std::vector<double>(5), 4), InvalidArgument);
}

TEST_CASE("cutoffs: shape and exact derivative suprema") {
  Cutoff c{0.25, 1.0};
  CHECK(c.value(0.1) == 1.0);
  CHECK(c.value(1.2) == 0.0);
  double s1 = 0, s2 = 0;
  for (int i = 0; i <= 200000; ++i) {
    const double x = 0.25 + 0.75 * i / 200000.0;
    CHECK(c.value(x) >= 0);
    CHECK(c.value(x) <= 1);
    s1 = std::max(s1, std::abs(c.d1(x)));
    s2 = std::max(s2, std::abs(c.d2(x)));
  }
  CHECK(s1 == doctest::Approx(c.sup_d1()).epsilon(1e-8));
  CHECK(s2 == doctest::Approx(c.sup_d2()).epsilon(1e-6));
  // C² at the joins: derivatives vanish on both sides
  CHECK(std::abs(c.d1(0.25 + 1e-9)) < 1e-12);
  CHECK(std::abs(c.d2(1.0 - 1e-9)) < 1e-6);
}

TEST_CASE("gluing constants") {
  GluingProblem prob;
  prob.weights = WeightData::make({0.7, 0.9});
  SampleSet s = stratified_samples(2, 1.0, 64, 40);

  json quartic = {{"z1^2 zbar1^2", 1.0}, {"z2^2 zbar2^2", 1.0}, {"z1 z2 zbar1 zbar2", 2.0}};
  prob.potential = std::make_shared<PolynomialPotential>(PolynomialPotential::from_dictionary(quartic, 2));
  GluingConstants c = estimate_constants(prob, s);
  // on r ≤ 0.75: |p|/r² = r², |dp|/r = 4r², λ_max Levi |z|⁴ = 4r²
  double rmax = 0;
  for (const auto& z : s.points)
    if (z.norm() <= 0.75) rmax = std::max(rmax, z.norm());
  CHECK(c.M0 == doctest::Approx(1.1 * 4 * rmax * rmax).epsilon(1e-9));
  CHECK(c.M1 == doctest::Approx(1.1).epsilon(1e-9));
  CHECK(c.M == doctest::Approx(c.M0 * c.M1 * c.sup_psi_d2 + 2 * c.M0 * c.sup_psi_d1 + c.M0));

  json flatter = {{"z1^2", 0.5}, {"zbar1^2", 0.5}, {"z1 zbar1", 2.0}, {"z2 zbar2", 2.0}};
  prob.potential = std::make_shared<PolynomialPotential>(PolynomialPotential::from_dictionary(flatter, 2));
  CHECK(estimate_constants(prob, s).M0 >= 2.0);

  // ν: with equal weights λ the metric g_λ on the sphere is λ-scaled on the contact
  // directions and λ²-scaled along the Reeb direction
  GluingProblem eq = prob;
  eq.weights = WeightData::make({0.6, 0.6});
  const double nu = estimate_constants(eq, s).nu / 0.9;
  CHECK(nu == doctest::Approx(std::min(1 / 0.6, 1 / (0.6 * 0.6))).epsilon(1e-8));

  json shifted = {{"1", 1.0}, {"z1 zbar1", 1.0}, {"z2 zbar2", 1.0}};
  prob.potential = std::make_shared<PolynomialPotential>(PolynomialPotential::from_dictionary(shifted, 2));
  CHECK_THROWS_AS(estimate_constants(prob, s), InvalidArgument);
  json linear = {{"z1", 0.5}, {"zbar1", 0.5}, {"z1 zbar1", 1.0}};
  prob.potential = std::make_shared<PolynomialPotential>(PolynomialPotential::from_dictionary(linear, 2));
  CHECK_THROWS_AS(estimate_constants(prob, s), InvalidArgument);
}

TEST_CASE("glued potential formula and verification items") {
  GluingProblem prob;
  prob.weights = WeightData::make({0.7, 0.9});
  prob.potential = criterion_potential();
  const double eps = 0.3, delta = 0.2;
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    CVec z = random_point(rng, 2, 1.0);
    z *= delta / z.norm();  // r = δ exactly, ψ(1) = 0
    const double phi = prob.phi.value(z.norm());
    const double expect = prob.potential->value(z) + eps * phi * std::pow(weighted_radius(z, prob.weights), 2) -
                          prob.psi.value(1.0) * prob.potential->value(z);
    CHECK(std::abs(glued_jet(prob, eps, delta, z).value - expect) < 1e-12);
  }
  SampleSet s = stratified_samples(2, 1.0, 64, 20);
  auto items = verify_glue(prob, eps, delta, s, Exec::Serial);
  REQUIRE(items.size() == 3);
  CHECK(items[0].pass);
  CHECK(items[1].pass);
  CHECK(items[1].samples > 0);
}

TEST_CASE("Levi sweeps: serial and parallel agree exactly") {
  GluingProblem prob;
  prob.weights = WeightData::make({0.7, 0.9});
  prob.potential = criterion_potential();
  SampleSet s = stratified_samples(2, 1.0, 64, 30);
  auto f = [&](const CVec& z) { return glued_jet(prob, 0.25, 0.1, z); };
  LeviSweep a = levi_sweep(f, s, false, Exec::Serial);
  LeviSweep b = levi_sweep(f, s, false, Exec::Parallel);
  CHECK(a.min_levi == b.min_levi);
  CHECK(a.at_radius == b.at_radius);
  CHECK(a.evaluated == static_cast<long>(s.points.size()));
  LeviSweep c = levi_sweep(f, s, true, Exec::Serial);
  LeviSweep d = levi_sweep(f, s, true, Exec::Parallel);
  CHECK(c.evaluated == d.evaluated);
  CHECK(c.min_levi == d.min_levi);
}

TEST_CASE("gluing succeeds when the potential is flatter than r_lambda^2") {
  GluingProblem prob;
  prob.weights = WeightData::make({0.7, 0.9});
  json quartic = {{"z1^2 zbar1^2", 1.0}, {"z2^2 zbar2^2", 1.0}, {"z1 z2 zbar1 zbar2", 2.0}};
  prob.potential = std::make_shared<PolynomialPotential>(PolynomialPotential::from_dictionary(quartic, 2));
  GlueResult r = glue_potential(prob);
  CHECK(r.pass());
  CHECK(r.eps > 0);
  CHECK(r.delta > 0);
  CHECK(r.delta <= prob.phi.plateau);
  CHECK(r.samples >= 10000);
}

// For a strictly plurisubharmonic p, −ψ(r²/δ²)p leaves a scale-invariant negative
// Levi eigenvalue in the ψ transition annulus that ε r_λ² (flatter than r²) cannot offset.
TEST_CASE("gluing a nondegenerate potential reports why no pair verifies") {
  GluingProblem prob;
  prob.weights = WeightData::make({0.7, 0.9});
  prob.potential = criterion_potential();
  GlueOptions o;
  o.eps_halvings = 3;
  o.delta_halvings = 12;
  try {
    glue_potential(prob, o);
    FAIL("expected GlueError");
  } catch (const GlueError& e) {
    const GlueResult& r = e.partial();
    CHECK(!r.delta_rule_admissible);
    CHECK(r.attempts.size() >= 4 * 13);
    for (const auto& a : r.attempts) CHECK(!a.pass);
    CHECK(std::string(e.what()).find("best attempt") != std::string::npos);
  }
}
