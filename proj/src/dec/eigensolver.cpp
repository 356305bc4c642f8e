#include "conelab/eigensolver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace conelab {

namespace {

Mat random_block(Eigen::Index n, Eigen::Index b, std::mt19937_64& rng) {
  std::normal_distribution<double> N01;
  Mat W(n, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < n; ++i) W(i, j) = N01(rng);
  return W;
}

// W ← W − V(VᵀBW), twice (classical Gram–Schmidt with reorthogonalization)
void project_out(Mat& W, const Mat& V, const SpMat& B) {
  if (V.cols() == 0 || W.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) W -= V * (V.transpose() * (B * W));
}

// B-orthonormal basis of span(W), dropping directions with relative Gram
// eigenvalue below `drop`.
Mat b_orthonormalize(const Mat& W, const SpMat& B, double drop = 1e-12) {
  if (W.cols() == 0) return W;
  Mat Gm = W.transpose() * (B * W);
  Gm = 0.5 * (Gm + Gm.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(Gm);
  const Vec& s = es.eigenvalues();
  const double smax = s.maxCoeff();
  if (!(smax > 0)) return Mat(W.rows(), 0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = s.size() - 1; i >= 0; --i)
    if (s(i) > drop * smax) keep.push_back(i);
  Mat Q(W.cols(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    Q.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]) / std::sqrt(s(keep[j]));
  return W * Q;
}

double trace(const SpMat& A) {
  double t = 0;
  for (int j = 0; j < A.outerSize(); ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it)
      if (it.row() == it.col()) t += it.value();
  return t;
}

Vec residual_norms(const PencilOperator& op, const SymmetricPencil& P, const Mat& X, const Vec& lam) {
  Mat R = op.apply_A(X) - (P.B * X) * lam.asDiagonal();
  Vec out(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    Vec r = R.col(j);
    double nr = std::sqrt(std::max(0.0, r.dot(op.solve_B(r))));
    out(j) = nr / (1.0 + std::abs(lam(j)));
  }
  return out;
}

SpectrumSlice solve_dense(const SymmetricPencil& P, int K, const EigenOptions& opts) {
  Mat A = P.dense_A();
  Mat B = Mat(P.B);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(A, B, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw EigenError("dense generalized eigensolver failed", {});
  SpectrumSlice s;
  s.eigenvalues = es.eigenvalues().head(K);
  s.eigenvectors = es.eigenvectors().leftCols(K);
  PencilOperator op(P);
  s.residuals = residual_norms(op, P, s.eigenvectors, s.eigenvalues);
  s.solver = {"dense", opts.tol, 1, P.size(), 0.0, 0};
  return s;
}

struct ShiftInvert {
  // the augmented matrix is symmetric but indefinite; LDLᵀ without pivoting
  // fills far less than LU and is kept when a probe solve is accurate
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool use_lu = false;
  const SymmetricPencil* P;
  Eigen::Index n, g;

  ShiftInvert(const SymmetricPencil& pencil, double sigma) : P(&pencil) {
    n = pencil.size();
    g = pencil.C.rows();
    std::vector<Eigen::Triplet<double>> t;
    SpMat KS = pencil.K - sigma * pencil.B;
    for (int j = 0; j < KS.outerSize(); ++j)
      for (SpMat::InnerIterator it(KS, j); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int j = 0; j < pencil.C.outerSize(); ++j) {
      for (SpMat::InnerIterator it(pencil.C, j); it; ++it) {
        t.emplace_back(n + it.row(), it.col(), it.value());
        t.emplace_back(it.col(), n + it.row(), it.value());
      }
    }
    for (int j = 0; j < pencil.G.outerSize(); ++j)
      for (SpMat::InnerIterator it(pencil.G, j); it; ++it) t.emplace_back(n + it.row(), n + it.col(), -it.value());
    SpMat aug(n + g, n + g);
    aug.setFromTriplets(t.begin(), t.end());
    aug.makeCompressed();
    ldlt.compute(aug);
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
      std::mt19937_64 rng(0x1d17);
      std::normal_distribution<double> nd;
      Vec probe(n + g);
      for (Eigen::Index i = 0; i < probe.size(); ++i) probe(i) = nd(rng);
      Vec x = ldlt.solve(probe);
      ok = x.allFinite() && (aug * x - probe).norm() <= 1e-9 * probe.norm();
    }
    if (!ok) {
      use_lu = true;
      lu.analyzePattern(aug);
      lu.factorize(aug);
      if (lu.info() != Eigen::Success) throw Error("shift-invert factorization failed (shift too close to an eigenvalue?)");
    }
  }

  // (A − σB)⁻¹ B W
  Mat apply(const Mat& W) const {
    Mat rhs = Mat::Zero(n + g, W.cols());
    rhs.topRows(n) = P->B * W;
    Mat sol = use_lu ? Mat(lu.solve(rhs)) : Mat(ldlt.solve(rhs));
    return sol.topRows(n);
  }
};

SpectrumSlice solve_shift_invert(const SymmetricPencil& P, int K, const EigenOptions& opts, double sigma,
                                 int retries) {
  const Eigen::Index n = P.size();
  const Eigen::Index b = std::min<Eigen::Index>(std::max(opts.block, 1), n);
  const Eigen::Index need = std::min<Eigen::Index>(n, 3 * K + 2 * b);
  const Eigen::Index maxdim = std::min<Eigen::Index>(n, std::max<Eigen::Index>(need + 2 * b, 2 * K + 4 * b));
  PencilOperator op(P);
  ShiftInvert T(P, sigma);
  std::mt19937_64 rng(opts.seed);

  Mat V = b_orthonormalize(random_block(n, b, rng), P.B);
  Mat TV = T.apply(V);
  SpectrumSlice s;
  s.solver = {"shift-invert-block-krylov", opts.tol, 0, 0, sigma, retries};
  for (int it = 0;; ++it) {
    Mat H = (P.B * V).transpose() * TV;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    const Eigen::Index m = V.cols();
    // descending θ ↔ ascending λ = σ + 1/θ
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = m - 1; i >= 0; --i)
      if (es.eigenvalues()(i) > 0) order.push_back(i);
    const double theta_min = es.eigenvalues()(0);
    const Eigen::Index have = std::min<Eigen::Index>(K, static_cast<Eigen::Index>(order.size()));
    Mat Y(m, have);
    Vec lam(have);
    for (Eigen::Index j = 0; j < have; ++j) {
      Y.col(j) = es.eigenvectors().col(order[j]);
      lam(j) = sigma + 1.0 / es.eigenvalues()(order[j]);
    }
    Mat X = V * Y;
    Vec res = residual_norms(op, P, X, lam);
    s.eigenvalues = lam;
    s.eigenvectors = X;
    s.residuals = res;
    s.solver.iterations = it;
    s.solver.basis_dim = m;

    // eigenvalues below the shift show up as negative θ; if one is resolved
    // the shift was not below the spectrum and the run is repeated lower down
    if (theta_min < 0) {
      const double lam_neg = sigma + 1.0 / theta_min;
      Vec x = V * es.eigenvectors().col(0);
      Vec r = op.apply_A(x) - lam_neg * (P.B * x);
      double rn = std::sqrt(std::max(0.0, r.dot(op.solve_B(r)))) / (1.0 + std::abs(lam_neg));
      if (rn < 1e-3) {
        if (retries >= 3) throw EigenError("spectrum extends below every tried shift", s);
        EigenOptions o2 = opts;
        const double lower = lam_neg - 0.1 * (1.0 + std::abs(lam_neg));
        return solve_shift_invert(P, K, o2, lower, retries + 1);
      }
    }

    const bool all_conv = have == K && (res.array() <= opts.tol).all();
    if ((all_conv && m >= need) || m == n) {
      if (!all_conv) throw EigenError("Rayleigh-Ritz on the full space did not meet the tolerance", s);
      return s;
    }
    if (it >= opts.max_iter) {
      throw EigenError("shift-invert Krylov did not converge in " + std::to_string(opts.max_iter) + " steps", s);
    }

    // expand with T applied to the leading unconverged Ritz vectors
    std::vector<Eigen::Index> sel;
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(order.size()) && static_cast<Eigen::Index>(sel.size()) < b; ++j)
      if (j >= have || res(j) > opts.tol) sel.push_back(order[j]);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(order.size()) && static_cast<Eigen::Index>(sel.size()) < b; ++j)
      if (std::find(sel.begin(), sel.end(), order[j]) == sel.end()) sel.push_back(order[j]);
    Mat Ysel(m, static_cast<Eigen::Index>(sel.size()));
    for (std::size_t j = 0; j < sel.size(); ++j) Ysel.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(sel[j]);
    Mat W = TV * Ysel;

    if (m + b > maxdim) {
      const Eigen::Index keep = std::min<Eigen::Index>(static_cast<Eigen::Index>(order.size()), K + b);
      Mat Yk(m, keep);
      for (Eigen::Index j = 0; j < keep; ++j) Yk.col(j) = es.eigenvectors().col(order[j]);
      V = V * Yk;
      TV = TV * Yk;
    }
    project_out(W, V, P.B);
    W = b_orthonormalize(W, P.B, 1e-10);
    project_out(W, V, P.B);
    W = b_orthonormalize(W, P.B, 1e-10);
    if (W.cols() == 0) {
      W = random_block(n, b, rng);
      project_out(W, V, P.B);
      W = b_orthonormalize(W, P.B, 1e-10);
      if (W.cols() == 0) {
        if (all_conv) return s;
        throw EigenError("Krylov space exhausted before convergence", s);
      }
    }
    Mat TW = T.apply(W);
    Mat V2(n, V.cols() + W.cols()), T2(n, V.cols() + W.cols());
    V2 << V, W;
    T2 << TV, TW;
    V.swap(V2);
    TV.swap(T2);
  }
}

SpectrumSlice solve_lobpcg(const SymmetricPencil& P, int K, const EigenOptions& opts, double sigma) {
  const Eigen::Index n = P.size();
  const Eigen::Index m = std::min<Eigen::Index>(n, K + std::max<Eigen::Index>(opts.block / 2, 4));
  PencilOperator op(P);
  std::mt19937_64 rng(opts.seed);

  // Jacobi preconditioner on A − σB; A's diagonal from K plus the coupling term
  Vec diag = Vec(P.K.diagonal()) - sigma * Vec(P.B.diagonal());
  if (P.C.rows() > 0) {
    Vec gd = P.G.diagonal();
    for (int j = 0; j < P.C.outerSize(); ++j)
      for (SpMat::InnerIterator it(P.C, j); it; ++it) diag(it.col()) += it.value() * it.value() / gd(it.row());
  }
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = 1.0 / std::max(diag(i), 1e-300);

  Mat X = b_orthonormalize(random_block(n, m, rng), P.B);
  Mat Pdir(n, 0);
  SpectrumSlice s;
  s.solver = {"lobpcg-jacobi", opts.tol, 0, m, sigma, 0};
  Vec lam;
  for (int it = 0;; ++it) {
    Mat AX = op.apply_A(X);
    Mat H = X.transpose() * AX;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es0(H);
    X = X * es0.eigenvectors();
    AX = AX * es0.eigenvectors();
    lam = es0.eigenvalues();
    const Eigen::Index have = std::min<Eigen::Index>(K, X.cols());
    Mat R = AX - (P.B * X) * lam.asDiagonal();
    Vec res(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      Vec r = R.col(j);
      res(j) = std::sqrt(std::max(0.0, r.dot(op.solve_B(r)))) / (1.0 + std::abs(lam(j)));
    }
    s.eigenvalues = lam.head(have);
    s.eigenvectors = X.leftCols(have);
    s.residuals = res.head(have);
    s.solver.iterations = it;
    if (have == K && (res.head(K).array() <= opts.tol).all()) return s;
    if (it >= opts.max_iter * 10) throw EigenError("LOBPCG did not converge", s);

    Mat W = diag.asDiagonal() * R;
    Mat S(n, X.cols() + W.cols() + Pdir.cols());
    S << X, W, Pdir;
    // keep X exactly in the span; orthonormalize the rest against it
    Mat rest = S.rightCols(W.cols() + Pdir.cols());
    project_out(rest, X, P.B);
    rest = b_orthonormalize(rest, P.B, 1e-12);
    project_out(rest, X, P.B);
    rest = b_orthonormalize(rest, P.B, 1e-12);
    Mat Q(n, X.cols() + rest.cols());
    Q << X, rest;
    Mat AQ = op.apply_A(Q);
    Mat HQ = Q.transpose() * AQ;
    HQ = 0.5 * (HQ + HQ.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(HQ);
    Mat Y = es.eigenvectors().leftCols(X.cols());
    Mat Xn = Q * Y;
    Pdir = rest * Y.bottomRows(rest.cols());
    X = b_orthonormalize(Xn, P.B, 1e-14);
    if (X.cols() < m) {
      Mat extra = random_block(n, m - X.cols(), rng);
      project_out(extra, X, P.B);
      Mat X2(n, m);
      X2 << X, b_orthonormalize(extra, P.B).leftCols(m - X.cols());
      X = X2;
    }
  }
}

}  // namespace

std::string to_string(EigenMethod m) {
  switch (m) {
    case EigenMethod::Auto: return "auto";
    case EigenMethod::Dense: return "dense";
    case EigenMethod::ShiftInvert: return "shift-invert";
    case EigenMethod::Lobpcg: return "lobpcg";
  }
  return "?";
}

double default_shift(const SymmetricPencil& P) {
  double ta = trace(P.K);
  if (P.C.rows() > 0) {
    Vec gd = P.G.diagonal();
    for (int j = 0; j < P.C.outerSize(); ++j)
      for (SpMat::InnerIterator it(P.C, j); it; ++it) ta += it.value() * it.value() / gd(it.row());
  }
  const double tb = trace(P.B);
  const double scale = (tb > 0 && ta > 0) ? ta / tb : 1.0;
  return -1e-3 * scale;
}

double estimate_factor_bytes(const SymmetricPencil& P) {
  const double nnz = static_cast<double>(P.K.nonZeros() + P.B.nonZeros() + 2 * P.C.nonZeros() + P.G.nonZeros());
  return nnz * 30.0 * 16.0;
}

SpectrumSlice eigensolve(const SymmetricPencil& P, int K, const EigenOptions& opts) {
  const Eigen::Index n = P.size();
  if (K < 0 || K > n) {
    throw InvalidArgument("requested " + std::to_string(K) + " modes of a pencil of size " + std::to_string(n));
  }
  if (!(opts.tol > 0)) throw InvalidArgument("eigensolver tolerance must be positive");
  if (K == 0) {
    SpectrumSlice s;
    s.eigenvalues.resize(0);
    s.eigenvectors.resize(n, 0);
    s.residuals.resize(0);
    s.solver = {"none", opts.tol, 0, 0, 0.0, 0};
    return s;
  }
  EigenMethod method = opts.method;
  if (method == EigenMethod::Auto) {
    if (n <= opts.dense_limit) method = EigenMethod::Dense;
    else if (estimate_factor_bytes(P) > opts.factor_memory_cap) method = EigenMethod::Lobpcg;
    else method = EigenMethod::ShiftInvert;
  }
  const double sigma = opts.shift ? *opts.shift : default_shift(P);
  SpectrumSlice s;
  switch (method) {
    case EigenMethod::Dense: s = solve_dense(P, K, opts); break;
    case EigenMethod::Lobpcg: s = solve_lobpcg(P, K, opts, sigma); break;
    default: s = solve_shift_invert(P, K, opts, sigma, 0); break;
  }
  if (method == EigenMethod::Dense && !(s.residuals.array() <= opts.tol).all()) {
    throw EigenError("dense solve residual above tolerance", s);
  }
  return s;
}

NearZero count_near_zero(const SpectrumSlice& s, double rel_threshold, double min_gap) {
  NearZero out;
  const Eigen::Index n = s.size();
  if (n == 0) {
    out.gap_ok = false;
    out.warning = "empty spectrum slice";
    return out;
  }
  std::vector<double> a(n);
  for (Eigen::Index i = 0; i < n; ++i) a[i] = std::abs(s.eigenvalues(i));
  std::vector<double> sorted = a;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  double scale = sorted[n / 2];
  const double amax = *std::max_element(a.begin(), a.end());
  if (!(scale > 1e-12 * amax) || scale == 0) scale = amax;  // more than half the slice is (near) zero
  out.threshold = rel_threshold * (scale > 0 ? scale : 1.0);
  for (Eigen::Index i = 0; i < n; ++i)
    if (a[i] < out.threshold) ++out.count;
  if (out.count == n) {
    out.gap_ok = false;
    out.gap_ratio = 1.0;
    out.warning = "all resolved modes are below the threshold; no gap visible (increase the mode count)";
    return out;
  }
  const double above = std::abs(s.eigenvalues(out.count));
  const double below = out.count > 0 ? a[out.count - 1] : 0.0;
  out.gap_ratio = below > 0 ? above / below : std::numeric_limits<double>::infinity();
  if (out.gap_ratio < min_gap) {
    out.gap_ok = false;
    out.warning = "no clear spectral gap at the near-zero cut (ratio " + std::to_string(out.gap_ratio) + ")";
  }
  return out;
}

}  // namespace conelab
