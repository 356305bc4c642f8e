#include <cmath>

#include "conelab/cone.hpp"

namespace conelab {

namespace {

void check_shape(const HomogeneousForm& f, const ConeGeometry& g) {
  if (f.phi_prime.size() != g.size(f.p - 1) || f.phi_dprime.size() != g.size(f.p)) {
    throw InvalidArgument("homogeneous form of degree " + std::to_string(f.p) +
                          " has component sizes inconsistent with the link cochains");
  }
}

// places `blk` at (r0, c0)
void put(std::vector<Eigen::Triplet<double>>& t, const SpMat& blk, Eigen::Index r0, Eigen::Index c0, double s = 1.0) {
  for (int j = 0; j < blk.outerSize(); ++j)
    for (SpMat::InnerIterator it(blk, j); it; ++it) t.emplace_back(r0 + it.row(), c0 + it.col(), s * it.value());
}

}  // namespace

ConeGeometry ConeGeometry::over(std::shared_ptr<const DiscreteHodge> link, int l) {
  if (!link) throw InvalidArgument("cone geometry needs a link");
  if (l != link->dim() + 1) {
    throw InvalidArgument("cone dimension l=" + std::to_string(l) + " does not match link dimension " +
                          std::to_string(link->dim()) + " + 1");
  }
  return ConeGeometry{l, std::move(link)};
}

ConeGeometry ConeGeometry::over(const DiscreteHodge& link, int l) {
  return over(std::make_shared<const DiscreteHodge>(link), l);
}

HomogeneousForm zero_form(const ConeGeometry& g, int p, double beta) {
  return {p, beta, Vec::Zero(g.size(p - 1)), Vec::Zero(g.size(p))};
}

HomogeneousForm cone_d(const HomogeneousForm& f, const ConeGeometry& g) {
  check_shape(f, g);
  const auto& h = *g.link;
  HomogeneousForm out;
  out.p = f.p + 1;
  out.beta = f.beta;
  out.phi_prime = f.beta * f.phi_dprime - h.apply_d(f.p - 1, f.phi_prime);
  out.phi_dprime = h.apply_d(f.p, f.phi_dprime);
  return out;
}

HomogeneousForm cone_dstar(const HomogeneousForm& f, const ConeGeometry& g) {
  check_shape(f, g);
  const auto& h = *g.link;
  HomogeneousForm out;
  out.p = f.p - 1;
  out.beta = f.beta - 2;
  out.phi_prime = -h.codifferential(f.p - 1, f.phi_prime);
  out.phi_dprime = h.codifferential(f.p, f.phi_dprime) - (f.beta + g.l - 2.0 * f.p) * f.phi_prime;
  return out;
}

HomogeneousForm cone_laplacian(const HomogeneousForm& f, const ConeGeometry& g) {
  check_shape(f, g);
  const auto& h = *g.link;
  const double b = f.beta, l = g.l, p = f.p;
  HomogeneousForm out;
  out.p = f.p;
  out.beta = f.beta - 2;
  out.phi_prime = h.laplacian_apply(f.p - 1, f.phi_prime) - (b - 2) * (b + l - 2 * p) * f.phi_prime -
                  2.0 * h.codifferential(f.p, f.phi_dprime);
  out.phi_dprime = h.laplacian_apply(f.p, f.phi_dprime) - b * (b + l - 2 - 2 * p) * f.phi_dprime -
                   2.0 * h.apply_d(f.p - 1, f.phi_prime);
  return out;
}

double form_distance(const HomogeneousForm& a, const HomogeneousForm& b) {
  if (a.p != b.p || a.phi_prime.size() != b.phi_prime.size() || a.phi_dprime.size() != b.phi_dprime.size()) {
    throw InvalidArgument("forms of different shape");
  }
  double d = 0;
  if (a.phi_prime.size()) d = std::max(d, (a.phi_prime - b.phi_prime).cwiseAbs().maxCoeff());
  if (a.phi_dprime.size()) d = std::max(d, (a.phi_dprime - b.phi_dprime).cwiseAbs().maxCoeff());
  return d;
}

double form_norm(const HomogeneousForm& a) {
  double d = 0;
  if (a.phi_prime.size()) d = std::max(d, a.phi_prime.cwiseAbs().maxCoeff());
  if (a.phi_dprime.size()) d = std::max(d, a.phi_dprime.cwiseAbs().maxCoeff());
  return d;
}

SymmetricPencil assemble_E(const ConeGeometry& g, int p) {
  const auto& h = *g.link;
  const int l = g.l;
  if (p < 0 || p > l) throw InvalidArgument("degree p=" + std::to_string(p) + " out of range [0," + std::to_string(l) + "]");
  const Eigen::Index n1 = h.size(p - 1), n2 = h.size(p);
  const Eigen::Index g1 = h.size(p - 2), g2 = h.size(p - 1);
  auto mass = [&](int k) { return (k >= 0 && k <= h.dim()) ? h.mass(k) : SpMat(0, 0); };
  // d_k as a (k+1)×k block, empty when either degree is out of range
  auto dmat = [&](int k) {
    if (k >= 0 && k < h.dim()) return h.d(k);
    return SpMat(h.size(k + 1), h.size(k));
  };

  std::vector<Eigen::Triplet<double>> tk, tc, tg, tb;
  const SpMat d1 = dmat(p - 1), d2 = dmat(p), d0 = dmat(p - 2);
  const SpMat M0 = mass(p - 2), M1 = mass(p - 1), M2 = mass(p), M3 = mass(p + 1);
  if (n1 > 0) {
    if (n2 > 0) {
      put(tk, SpMat(d1.transpose() * M2 * d1), 0, 0);
      SpMat off = SpMat(d1.transpose() * M2);  // n1 × n2
      put(tk, off, 0, n1, -2.0);
      put(tk, SpMat(off.transpose()), n1, 0, -2.0);
    }
    put(tk, M1, 0, 0, 2.0 * l - 4.0 * p);
  }
  if (n2 > 0 && h.size(p + 1) > 0) put(tk, SpMat(d2.transpose() * M3 * d2), n1, n1);
  if (g1 > 0 && n1 > 0) {
    put(tc, SpMat(d0.transpose() * M1), 0, 0);
    put(tg, M0, 0, 0);
  }
  if (g2 > 0 && n2 > 0) {
    put(tc, SpMat(d1.transpose() * M2), g1, n1);
    put(tg, M1, g1, g1);
  }
  if (n1 > 0) put(tb, M1, 0, 0);
  if (n2 > 0) put(tb, M2, n1, n1);

  const Eigen::Index n = n1 + n2;
  const Eigen::Index c1 = n1 > 0 ? g1 : 0;
  const Eigen::Index c2 = n2 > 0 ? g2 : 0;
  SymmetricPencil P;
  P.K.resize(n, n);
  P.K.setFromTriplets(tk.begin(), tk.end());
  P.C.resize(c1 + c2, n);
  P.C.setFromTriplets(tc.begin(), tc.end());
  P.G.resize(c1 + c2, c1 + c2);
  P.G.setFromTriplets(tg.begin(), tg.end());
  P.B.resize(n, n);
  P.B.setFromTriplets(tb.begin(), tb.end());
  return P;
}

Vec apply_E(const ConeGeometry& g, int p, const Vec& x) {
  const auto& h = *g.link;
  const Eigen::Index n1 = h.size(p - 1), n2 = h.size(p);
  if (x.size() != n1 + n2) throw InvalidArgument("apply_E: vector size mismatch");
  Vec a = x.head(n1), b = x.tail(n2);
  Vec out(n1 + n2);
  out.head(n1) = h.laplacian_apply(p - 1, a) + (2.0 * g.l - 4.0 * p) * a - 2.0 * h.codifferential(p, b);
  out.tail(n2) = -2.0 * h.apply_d(p - 1, a) + h.laplacian_apply(p, b);
  return out;
}

}  // namespace conelab
