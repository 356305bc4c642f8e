#include "conelab/dec.hpp"

namespace conelab {

Mat SymmetricPencil::dense_A() const {
  Mat A = Mat(K);
  if (C.rows() > 0) {
    Eigen::LLT<Mat> g{Mat(G)};
    Mat Cd = Mat(C);
    A += Cd.transpose() * g.solve(Cd);
  }
  return 0.5 * (A + A.transpose());
}

PencilOperator::PencilOperator(const SymmetricPencil& P) : P_(&P), has_c_(P.C.rows() > 0) {}

Vec PencilOperator::apply_A(const Vec& x) const {
  Vec y = P_->K * x;
  if (has_c_) y += P_->C.transpose() * mass_solve(P_->G, Vec(P_->C * x));
  return y;
}

Mat PencilOperator::apply_A(const Mat& X) const {
  Mat Y = P_->K * X;
  if (has_c_) Y += P_->C.transpose() * mass_solve(P_->G, Mat(P_->C * X));
  return Y;
}

Vec PencilOperator::solve_B(const Vec& x) const { return mass_solve(P_->B, x); }

SymmetricPencil laplacian(const DiscreteHodge& h, int p) {
  const int n = h.dim();
  if (p < 0 || p > n) {
    throw InvalidArgument("degree " + std::to_string(p) + " out of range [0," + std::to_string(n) + "]");
  }
  SymmetricPencil P;
  const Eigen::Index np = h.size(p);
  P.B = h.mass(p);
  if (p < n) {
    P.K = SpMat(h.d(p).transpose() * h.mass(p + 1) * h.d(p));
  } else {
    P.K = SpMat(np, np);
  }
  if (p > 0) {
    P.C = SpMat(h.d(p - 1).transpose() * h.mass(p));
    P.G = h.mass(p - 1);
  } else {
    P.C = SpMat(0, np);
    P.G = SpMat(0, 0);
  }
  return P;
}

}  // namespace conelab
