#include "doctest.h"

#include <random>

#include "conelab/artin.hpp"

using namespace conelab;

namespace {

QVec poly(int k, std::initializer_list<Scalar> coeffs) {
  QVec v(k + 1);
  int i = 0;
  for (const auto& c : coeffs) v[i++] = c;
  return v;
}

// Truncated polynomial product, independent of the structure constants.
QVec poly_mul(const QVec& a, const QVec& b) {
  QVec c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < a.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Scalar gauss(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(-5, 5);
  return {Rational(u(rng), 1 + (u(rng) + 5) % 3), Rational(u(rng))};
}

long binom(int n, int r) {
  long b = 1;
  for (int i = 0; i < r; ++i) b = b * (n - i) / (i + 1);
  return b;
}

}  // namespace

TEST_CASE("truncated polynomial algebras") {
  ArtinAlgebra k0 = truncated_poly(0);
  CHECK(k0.dim() == 1);
  CHECK(k0.nilpotency_index() == 1);
  ArtinAlgebra d = truncated_poly(1);
  CHECK(qla::is_zero(d.mul(d.basis(1), d.basis(1))));
  ArtinAlgebra a3 = truncated_poly(3);
  CHECK(qla::is_zero(a3.mul(a3.basis(2), a3.basis(2))));
  CHECK(a3.mul(a3.basis(1), a3.basis(2)) == a3.basis(3));
  for (int k = 0; k <= 6; ++k) {
    ArtinAlgebra a = truncated_poly(k);
    CHECK(a.verify());
    CHECK(a.nilpotency_index() == k + 1);
  }
  std::mt19937_64 rng(11);
  ArtinAlgebra a5 = truncated_poly(5);
  for (int i = 0; i < 50; ++i) {
    QVec x(6), y(6);
    for (auto& c : x) c = gauss(rng);
    for (auto& c : y) c = gauss(rng);
    CHECK(a5.mul(x, y) == poly_mul(x, y));
  }
}

TEST_CASE("structure constants are validated") {
  // x² = 1 + x: e1·e1 has a unit component
  std::vector<std::vector<QVec>> bad{{{1, 0}, {0, 1}}, {{0, 1}, {1, 1}}};
  CHECK_THROWS_AS(ArtinAlgebra(BaseField::Complex, bad), InvalidArgument);
  // e1² = e1 is idempotent, never nilpotent
  std::vector<std::vector<QVec>> idem{{{1, 0}, {0, 1}}, {{0, 1}, {0, 1}}};
  CHECK_THROWS_AS(ArtinAlgebra(BaseField::Complex, idem), InvalidArgument);
  std::vector<std::vector<QVec>> cplx{{{1, 0}, {0, 1}}, {{0, 1}, {0, Scalar(0, 1)}}};
  CHECK_THROWS_AS(ArtinAlgebra(BaseField::Real, cplx), InvalidArgument);
  // non-commutative 3-dim: e1 e2 = e3, e2 e1 = 0
  std::vector<std::vector<QVec>> nc(3, std::vector<QVec>(3, QVec(3)));
  for (int j = 0; j < 3; ++j) nc[0][j][j] = nc[j][0][j] = 1;
  nc[1][2][2] = 1;
  CHECK_THROWS_AS(ArtinAlgebra(BaseField::Complex, nc), InvalidArgument);
}

TEST_CASE("complexification and units") {
  ArtinAlgebra r = truncated_poly(1, BaseField::Real);
  ArtinAlgebra c = complexify(r);
  CHECK(c.base() == BaseField::Complex);
  CHECK(c == truncated_poly(1));
  CHECK(c.verify());
  CHECK_THROWS_AS(complexify(c), InvalidArgument);
  // (a + bt)⁻¹ = a⁻¹ − a⁻² b t
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    Scalar a = gauss(rng), b = gauss(rng);
    if (a.is_zero()) continue;
    auto inv = is_unit(c, {a, b});
    REQUIRE(inv.has_value());
    CHECK((*inv)[0] == Scalar(1) / a);
    CHECK((*inv)[1] == -(b / (a * a)));
  }
  CHECK(!is_unit(c, {0, 1}).has_value());

  ArtinAlgebra a2 = truncated_poly(2);
  CHECK(*is_unit(a2, poly(2, {1, 1})) == poly(2, {1, -1, 1}));
  CHECK(!is_unit(a2, poly(2, {0, 1, 1})).has_value());
  ArtinAlgebra a5 = truncated_poly(5);
  for (int i = 0; i < 100; ++i) {
    QVec x(6);
    for (auto& v : x) v = gauss(rng);
    if (x[0].is_zero()) x[0] = 1;
    CHECK(a5.mul(x, *is_unit(a5, x)) == a5.one());
  }
  // exhaustive small grid on A_1 ⊗ A_1 (dim 4): unit iff constant term non-zero
  ArtinAlgebra t = tensor(truncated_poly(1), truncated_poly(1));
  for (int m = 0; m < 81; ++m) {
    QVec x(4);
    int r = m;
    for (int i = 0; i < 4; ++i) {
      x[i] = Scalar(r % 3 - 1);
      r /= 3;
    }
    auto inv = is_unit(t, x);
    CHECK(inv.has_value() == !x[0].is_zero());
    if (inv) CHECK(t.mul(x, *inv) == t.one());
  }
}

TEST_CASE("small extensions") {
  for (int k = 1; k <= 5; ++k) {
    ArtinAlgebra a = truncated_poly(k);
    SmallExtension se = small_extension(a, a.basis(k));
    CHECK(se.quotient == truncated_poly(k - 1));
    CHECK(se.projection.is_homomorphism());
    CHECK(se.projection.is_surjective());
    CHECK(qla::is_zero(se.projection.apply(a.basis(k))));
  }
  ArtinAlgebra a2 = truncated_poly(2);
  CHECK_THROWS_AS(small_extension(a2, a2.basis(1)), InvalidArgument);
  CHECK_THROWS_AS(small_extension(a2, a2.one()), InvalidArgument);
  CHECK_THROWS_AS(small_extension(a2, QVec(3)), InvalidArgument);
  ArtinAlgebra d = truncated_poly(1);
  CHECK(small_extension(d, d.basis(1)).quotient.dim() == 1);
  // non-basis socle element in A_1 ⊗ A_1: socle is spanned by s⊗t
  ArtinAlgebra t = tensor(truncated_poly(1), truncated_poly(1));
  SmallExtension se = small_extension(t, {0, 0, 0, Scalar(2, 1)});
  CHECK(se.quotient.dim() == 3);
  CHECK_THROWS_AS(small_extension(t, {0, 1, 1, 0}), InvalidArgument);
}

TEST_CASE("fiber products") {
  ArtinAlgebra a2 = truncated_poly(2), a1 = truncated_poly(1);
  SmallExtension se = small_extension(a2, a2.basis(2));
  FiberProduct p = fiber_product(se.projection, se.projection);
  CHECK(p.algebra.dim() == 2 * 3 - 2);
  CHECK(p.algebra.verify());
  CHECK(p.to_a.is_homomorphism());
  CHECK(p.to_b.is_homomorphism());
  CHECK(same_map(compose(se.projection, p.to_a), compose(se.projection, p.to_b)));

  for (int k = 1; k <= 4; ++k) {
    ArtinAlgebra a = truncated_poly(k);
    FiberProduct q = fiber_product(identity_hom(a), identity_hom(a));
    CHECK(q.algebra.dim() == a.dim());
    CHECK(q.to_a.is_bijective());
    CHECK(q.to_a.is_homomorphism());
    // dim A ×_C B = dim A + dim B − dim C for surjections
    FiberProduct r = fiber_product(residue_map(a), residue_map(a1));
    CHECK(r.algebra.dim() == a.dim() + 2 - 1);
  }
  AlgebraHom not_hom = identity_hom(a2);
  not_hom.matrix[1][1] = 2;
  CHECK_THROWS_AS(fiber_product(not_hom, identity_hom(a2)), InvalidArgument);
  CHECK_THROWS_AS(fiber_product(identity_hom(a2), identity_hom(a1)), InvalidArgument);
}

TEST_CASE("small extension fiber-product isomorphism") {
  for (int k = 1; k <= 5; ++k) {
    ArtinAlgebra a = truncated_poly(k);
    auto iso = small_extension_isomorphism(a, a.basis(k));
    CHECK(iso.verified);
    CHECK(iso.left.algebra.dim() == a.dim() + 1);
    CHECK(iso.right.algebra.dim() == 2 * a.dim() - k);
    // (a, πa + λt) ↦ (a, a + λε) on an explicit element
    QVec x(a.dim());
    for (int i = 0; i <= k; ++i) x[i] = Scalar(i + 1, -i);
    QVec lhs = iso.left.coordinates(x, {x[0], Scalar(3, 2)});
    QVec img = iso.map.apply(lhs);
    QVec x2 = x;
    x2[k] += Scalar(3, 2);
    CHECK(img == iso.right.coordinates(x, x2));
  }
  // a real small extension with a non-monomial socle generator
  ArtinAlgebra t = tensor(truncated_poly(1, BaseField::Real), truncated_poly(2, BaseField::Real));
  auto iso = small_extension_isomorphism(t, {0, 0, 0, 0, 0, 1});
  CHECK(iso.verified);
}

TEST_CASE("lift maps and their squares") {
  for (int k = 1; k <= 5; ++k) {
    LiftMaps L = lift_maps(k);
    CHECK(L.pi.is_homomorphism());
    CHECK(L.theta.is_homomorphism());
    CHECK(L.varpi.is_homomorphism());
    // θ_k(t^j) = t^j + j t^{j−1} ε with t^k = 0
    for (int j = 0; j <= k; ++j) {
      QVec expect(2 * k);
      if (j <= k - 1) expect[2 * j] = 1;
      if (j >= 1 && j - 1 <= k - 1) expect[2 * (j - 1) + 1] = Scalar(static_cast<long>(binom(j, 1)));
      CHECK(L.theta.apply(L.theta.source.basis(j)) == expect);
    }
    // π on constants is the identity
    CHECK(L.pi.apply(L.pi.source.one()) == L.pi.target.one());
    // ε ↦ 0 after θ is π
    ArtinAlgebra Dk1 = dual_numbers_over(truncated_poly(k - 1));
    std::vector<QVec> forget(Dk1.dim(), QVec(k));
    for (int i = 0; i < k; ++i) forget[2 * i][i] = 1;
    AlgebraHom eps0 = make_hom(Dk1, truncated_poly(k - 1), forget);
    CHECK(eps0.is_homomorphism());
    CHECK(same_map(compose(eps0, L.theta), L.pi));
    if (k >= 2) {
      LiftMaps up = lift_maps(k);
      LiftMaps low = lift_maps(k - 1);
      // ϖ_{k−1} ∘ θ_k = θ_{k−1} ∘ π_k
      CHECK(same_map(compose(low.varpi, up.theta), compose(low.theta, up.pi)));
    }
  }
  ArtinAlgebra d1 = dual_numbers_over(truncated_poly(1));
  // θ_2(t²) = (t + ε)² = 2tε in A_1[ε]
  LiftMaps L2 = lift_maps(2);
  QVec expect(4);
  expect[3] = 2;
  CHECK(L2.theta.apply(L2.theta.source.basis(2)) == expect);
  CHECK(L2.theta.target == d1);
  CHECK_THROWS_AS(lift_maps(0), InvalidArgument);
}

TEST_CASE("module duals") {
  // free module: A_k itself
  for (int k = 0; k <= 4; ++k) {
    QMat t = qla::zeros(k + 1, k + 1);
    for (int i = 0; i < k; ++i) t[i + 1][i] = 1;
    FiniteModule m = module_from_t_action(k, t);
    CHECK(m.verify());
    DualModule d = module_dual(m);
    CHECK(d.module.rank == k + 1);
    CHECK(reflexivity_check(m).reflexive);
  }
  // residue field over A_1: every map lands in the socle
  FiniteModule c = module_from_t_action(1, qla::zeros(1, 1));
  DualModule d = module_dual(c);
  REQUIRE(d.module.rank == 1);
  CHECK(d.basis[0][0][0].is_zero());
  CHECK(!d.basis[0][1][0].is_zero());
  CHECK(reflexivity_check(c).reflexive);
  QMat bad = qla::zeros(2, 2);
  bad[1][0] = 1;
  CHECK_THROWS_AS(module_from_t_action(0, bad), InvalidArgument);
}

TEST_CASE("random modules are reflexive and duality is functorial") {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int k = trial % 5;
    FiniteModule m = random_truncated_module(k, 8, rng);
    REQUIRE(m.verify());
    ReflexivityReport r = reflexivity_check(m);
    CHECK(r.reflexive);
    CHECK(r.dual_rank == m.rank);
    ++checked;
  }
  CHECK(checked == 60);

  // M --f--> N --g--> P with f, g A-linear: (g f)* = f* g*
  ArtinAlgebra a2 = truncated_poly(2);
  QMat tm = qla::zeros(3, 3);
  tm[1][0] = tm[2][1] = 1;
  FiniteModule free = module_from_t_action(2, tm);
  QMat tn = qla::zeros(2, 2);
  tn[1][0] = 1;
  FiniteModule quot = module_from_t_action(2, tn);
  FiniteModule res = module_from_t_action(2, qla::zeros(1, 1));
  QMat fm = qla::zeros(2, 3);
  fm[0][0] = fm[1][1] = 1;
  QMat gm = qla::zeros(1, 2);
  gm[0][0] = Scalar(2, 1);
  ModuleMap f{free, quot, fm}, g{quot, res, gm};
  REQUIRE(f.is_linear());
  REQUIRE(g.is_linear());
  ModuleMap gf{free, res, qla::mul(gm, fm)};
  DualModule dm = module_dual(free), dn = module_dual(quot), dp = module_dual(res);
  ModuleMap fs = dual_map(f, dm, dn), gs = dual_map(g, dn, dp), gfs = dual_map(gf, dm, dp);
  CHECK(fs.is_linear());
  CHECK(gs.is_linear());
  CHECK(gfs.matrix == qla::mul(fs.matrix, gs.matrix));
}

TEST_CASE("exact JSON encoding") {
  Scalar s(Rational(-3, 7), Rational(5, 2));
  CHECK(scalar_from_json(scalar_to_json(s)) == s);
  CHECK(scalar_to_json(Scalar(Rational(4, 6))) == "2/3");
  CHECK_THROWS_AS(scalar_from_json(json(0.5)), ParseError);
  ArtinAlgebra t = tensor(truncated_poly(1), truncated_poly(2));
  CHECK(ArtinAlgebra::from_json(t.to_json()) == t);
  std::mt19937_64 rng(3);
  FiniteModule m = random_truncated_module(3, 5, rng);
  FiniteModule back = FiniteModule::from_json(m.to_json());
  CHECK(back.action == m.action);
  json broken = m.to_json();
  broken["action"][0][0][0] = "2";
  CHECK_THROWS_AS(FiniteModule::from_json(broken), ParseError);
}
