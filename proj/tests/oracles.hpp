#pragma once
// Independent reference computations shared by the unit tests. Nothing here
// calls into the library's numerical kernels.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace oracle {

// Rank by dense SVD with a relative cutoff.
inline long dense_rank(const Eigen::MatrixXd& A, double rel = 1e-9) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0) return 0;
  long r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

// Sorted eigenvalues |k|² of the flat torus (ℝ/2πℤ)^d, k ∈ ℤ^d, with multiplicity,
// smallest `count` of them.
inline std::vector<double> torus_eigenvalues(int d, int count) {
  std::vector<double> out;
  const int R = 4;
  std::vector<int> k(d, -R);
  while (true) {
    double s = 0;
    for (int x : k) s += double(x) * x;
    out.push_back(s);
    int i = 0;
    while (i < d && ++k[i] > R) k[i++] = -R;
    if (i == d) break;
  }
  std::sort(out.begin(), out.end());
  out.resize(std::min<std::size_t>(out.size(), count));
  return out;
}

// Eigenvalue k(k+d−1) of the Laplacian on the unit S^d for degree-k harmonics,
// with multiplicity C(k+d,d) − C(k+d−2,d).
inline std::vector<double> sphere_eigenvalues(int d, int count) {
  auto binom = [](int n, int r) {
    if (r < 0 || n < r) return 0.0;
    double b = 1;
    for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
    return b;
  };
  std::vector<double> out;
  for (int k = 0; static_cast<int>(out.size()) < count; ++k) {
    int mult = static_cast<int>(std::lround(binom(k + d, d) - binom(k + d - 2, d)));
    for (int i = 0; i < mult && static_cast<int>(out.size()) < count; ++i) out.push_back(double(k) * (k + d - 1));
  }
  return out;
}

}  // namespace oracle
