#include <algorithm>
#include <cmath>
#include <limits>

#include "conelab/dec.hpp"

namespace conelab {

namespace {

std::vector<std::vector<int>> combinations(int n, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(r);
  std::vector<char> mask(n, 0);
  std::fill(mask.begin(), mask.begin() + r, 1);
  do {
    for (int i = 0, j = 0; i < n; ++i)
      if (mask[i]) cur[j++] = i;
    out.push_back(cur);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Mat local_coords(const SimplicialComplex& c, const Simplex& s) {
  Mat X(static_cast<Eigen::Index>(s.size()), c.coordinates().cols());
  for (std::size_t i = 0; i < s.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = c.coordinates().row(s[i]);
  return X;
}

// vol / (max edge)^n below this marks a degenerate simplex
constexpr double kDegenerate = 1e-14;

bool degenerate(const Mat& X, double vol) {
  double emax = 0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    for (Eigen::Index j = i + 1; j < X.rows(); ++j) emax = std::max(emax, (X.row(i) - X.row(j)).norm());
  const int n = static_cast<int>(X.rows()) - 1;
  return !(vol >= kDegenerate * std::pow(emax, n)) || emax == 0;
}

}  // namespace

std::string to_string(Star s) { return s == Star::Whitney ? "whitney" : "lumped"; }

Star parse_star(const std::string& s) {
  if (s == "whitney") return Star::Whitney;
  if (s == "lumped") return Star::Lumped;
  throw InvalidArgument("unknown Hodge star '" + s + "' (expected whitney|lumped)");
}

double simplex_volume(const Mat& X) {
  const int n = static_cast<int>(X.rows()) - 1;
  Mat E(X.cols(), n);
  for (int i = 0; i < n; ++i) E.col(i) = (X.row(i + 1) - X.row(0)).transpose();
  const double g = (E.transpose() * E).determinant();
  return std::sqrt(std::max(g, 0.0)) / factorial(n);
}

Mat whitney_element_mass(const Mat& X, int k) {
  const int n = static_cast<int>(X.rows()) - 1;
  if (k < 0 || k > n) throw InvalidArgument("form degree out of range for element");
  Mat E(X.cols(), n);
  for (int i = 0; i < n; ++i) E.col(i) = (X.row(i + 1) - X.row(0)).transpose();
  const Mat G = E.transpose() * E;
  const double vol = std::sqrt(std::max(G.determinant(), 0.0)) / factorial(n);
  // gradients of barycentric coordinates λ_1..λ_n have Gram G⁻¹; λ_0 = 1 − Σλ_i
  Mat Cg = Mat::Zero(n, n + 1);
  Cg.col(0).setConstant(-1.0);
  Cg.rightCols(n).setIdentity();
  const Mat Bg = Cg.transpose() * G.inverse() * Cg;

  const auto faces = combinations(n + 1, k + 1);
  const double fk = factorial(k);
  const double quad = vol / ((n + 1.0) * (n + 2.0));  // ∫λ_aλ_b = quad·(1+δ_ab)
  const Eigen::Index m = static_cast<Eigen::Index>(faces.size());
  Mat M(m, m);
  Mat sub(k, k);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a; b < m; ++b) {
      const auto& s = faces[a];
      const auto& t = faces[b];
      double acc = 0;
      for (int i = 0; i <= k; ++i) {
        for (int j = 0; j <= k; ++j) {
          double det = 1.0;
          if (k > 0) {
            for (int r = 0, rr = 0; r <= k; ++r) {
              if (r == i) continue;
              for (int c = 0, cc = 0; c <= k; ++c) {
                if (c == j) continue;
                sub(rr, cc++) = Bg(s[r], t[c]);
              }
              ++rr;
            }
            det = sub.determinant();
          }
          const double I = quad * (s[i] == t[j] ? 2.0 : 1.0);
          acc += ((i + j) % 2 == 0 ? 1.0 : -1.0) * I * det;
        }
      }
      M(a, b) = M(b, a) = fk * fk * acc;
    }
  }
  return M;
}

SpMat assemble_mass(const SimplicialComplex& c, int k, Star star, Exec exec) {
  if (!c.has_coordinates()) throw InvalidArgument("mass assembly needs vertex coordinates");
  const int n = c.dim();
  if (k < 0 || k > n) throw InvalidArgument("degree " + std::to_string(k) + " out of range");
  const auto& tops = c.simplices(n);
  const auto faces = combinations(n + 1, k + 1);
  const long ntop = static_cast<long>(tops.size());

  std::vector<Mat> elem(tops.size());
  long bad = std::numeric_limits<long>::max();
  auto element = [&](long t) {
    const Mat X = local_coords(c, tops[t]);
    if (degenerate(X, simplex_volume(X))) return false;
    elem[t] = whitney_element_mass(X, k);
    return Eigen::LLT<Mat>(elem[t]).info() == Eigen::Success;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(min : bad)
    for (long t = 0; t < ntop; ++t)
      if (!element(t)) bad = std::min(bad, t);
  } else {
    for (long t = 0; t < ntop; ++t)
      if (!element(t)) bad = std::min(bad, t);
  }
  if (bad != std::numeric_limits<long>::max()) {
    throw MeshError("degenerate simplex #" + std::to_string(bad) + " (volume below 1e-14 * edge^n or indefinite element mass)", tops[bad]);
  }

  // scatter in element order so both paths sum identically
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(tops.size() * faces.size() * (star == Star::Whitney ? faces.size() : 1));
  std::vector<int> gid(faces.size());
  Simplex f(k + 1);
  for (long t = 0; t < ntop; ++t) {
    for (std::size_t a = 0; a < faces.size(); ++a) {
      for (int i = 0; i <= k; ++i) f[i] = tops[t][faces[a][i]];
      gid[a] = c.index_of(k, f);
    }
    const Mat& M = elem[t];
    for (std::size_t a = 0; a < faces.size(); ++a) {
      if (star == Star::Lumped) {
        const double v = (k == 0) ? M.row(static_cast<Eigen::Index>(a)).sum() : M(a, a);
        trip.emplace_back(gid[a], gid[a], v);
      } else {
        for (std::size_t b = 0; b < faces.size(); ++b) trip.emplace_back(gid[a], gid[b], M(a, b));
      }
    }
  }
  const auto N = static_cast<Eigen::Index>(c.count(k));
  SpMat out(N, N);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

DiscreteHodge DiscreteHodge::build(const SimplicialComplex& complex, Star star, Exec exec) {
  return build(std::make_shared<const SimplicialComplex>(complex), star, exec);
}

DiscreteHodge DiscreteHodge::build(std::shared_ptr<const SimplicialComplex> complex, Star star, Exec exec) {
  DiscreteHodge h;
  h.complex_ = std::move(complex);
  h.star_ = star;
  const int n = h.complex_->dim();
  h.mass_.resize(n + 1);
  for (int k = 0; k <= n; ++k) h.mass_[k] = assemble_mass(*h.complex_, k, star, exec);
  h.d_.resize(n);
  for (int k = 0; k < n; ++k) h.d_[k] = h.complex_->boundary(k + 1).cast<double>().transpose();
  return h;
}

Eigen::Index DiscreteHodge::size(int k) const {
  if (k < 0 || k > dim()) return 0;
  return static_cast<Eigen::Index>(complex_->count(k));
}

Vec DiscreteHodge::apply_d(int k, const Vec& x) const {
  if (k < 0 || k >= dim()) return Vec::Zero(size(k + 1));
  return d_[k] * x;
}

Vec DiscreteHodge::codifferential(int k, const Vec& x) const {
  if (k <= 0 || k > dim()) return Vec::Zero(size(k - 1));
  Vec y = d_[k - 1].transpose() * (mass_[k] * x);
  return mass_solve(mass_[k - 1], y);
}

Vec DiscreteHodge::laplacian_apply(int k, const Vec& x) const {
  return apply_d(k - 1, codifferential(k, x)) + codifferential(k + 1, apply_d(k, x));
}

Vec DiscreteHodge::solve_mass(int k, const Vec& b) const { return mass_solve(mass_.at(k), b); }

Vec mass_solve(const SpMat& M, const Vec& b, double tol) {
  if (M.rows() == 0) return Vec(0);
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(std::max<Eigen::Index>(200, M.rows()));
  cg.compute(M);
  Vec x = cg.solve(b);
  if (cg.info() != Eigen::Success && cg.error() > 1e3 * tol) {
    throw Error("mass solve did not converge (relative residual " + std::to_string(cg.error()) + ")");
  }
  return x;
}

Mat mass_solve(const SpMat& M, const Mat& B, double tol) {
  Mat X(M.rows(), B.cols());
  for (Eigen::Index j = 0; j < B.cols(); ++j) X.col(j) = mass_solve(M, Vec(B.col(j)), tol);
  return X;
}

}  // namespace conelab
