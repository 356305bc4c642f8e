#include "conelab/artin.hpp"
#include "conelab/error.hpp"

namespace conelab::qla {

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(QMat& a, int cols) {
  std::vector<int> pivots;
  int row = 0;
  const int rows = static_cast<int>(a.size());
  for (int c = 0; c < cols && row < rows; ++c) {
    int p = row;
    while (p < rows && a[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[row]);
    const Scalar inv = Scalar(1) / a[row][c];
    for (int j = c; j < cols; ++j) a[row][j] *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == row || a[r][c].is_zero()) continue;
      const Scalar f = a[r][c];
      for (int j = c; j < cols; ++j)
        if (!a[row][j].is_zero()) a[r][j] -= f * a[row][j];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

int width(const QMat& a) { return a.empty() ? 0 : static_cast<int>(a[0].size()); }

}  // namespace

QMat zeros(int rows, int cols) { return QMat(rows, QVec(cols)); }

QMat identity(int n) {
  QMat m = zeros(n, n);
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

QMat mul(const QMat& a, const QMat& b) {
  const int n = static_cast<int>(a.size()), k = static_cast<int>(b.size()), m = width(b);
  if (width(a) != k && n > 0) throw InvalidArgument("matrix product: inner dimensions differ");
  QMat c = zeros(n, m);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < k; ++l) {
      if (a[i][l].is_zero()) continue;
      for (int j = 0; j < m; ++j)
        if (!b[l][j].is_zero()) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

QVec mul(const QMat& a, const QVec& x) {
  QVec y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != x.size()) throw InvalidArgument("matrix-vector product: dimensions differ");
    for (std::size_t j = 0; j < x.size(); ++j)
      if (!a[i][j].is_zero() && !x[j].is_zero()) y[i] += a[i][j] * x[j];
  }
  return y;
}

QMat sub(const QMat& a, const QMat& b) {
  QMat c = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) c[i][j] -= b[i][j];
  return c;
}

bool is_zero(const QVec& v) {
  for (const auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

bool is_zero(const QMat& a) {
  for (const auto& r : a)
    if (!is_zero(r)) return false;
  return true;
}

int rank(QMat a) { return static_cast<int>(rref(a, width(a)).size()); }

std::vector<QVec> nullspace(QMat a, int cols, std::vector<int>* free) {
  auto piv = rref(a, cols);
  std::vector<bool> is_piv(cols, false);
  for (int c : piv) is_piv[c] = true;
  std::vector<QVec> out;
  if (free) free->clear();
  for (int f = 0; f < cols; ++f) {
    if (is_piv[f]) continue;
    if (free) free->push_back(f);
    QVec v(cols);
    v[f] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -a[r][f];
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<QVec> free_coordinates(const std::vector<QVec>& basis, const std::vector<int>& free, const QVec& v) {
  QVec c(basis.size());
  QVec rec(v.size());
  for (std::size_t s = 0; s < basis.size(); ++s) {
    c[s] = v[free[s]];
    if (c[s].is_zero()) continue;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!basis[s][i].is_zero()) rec[i] += c[s] * basis[s][i];
  }
  if (rec != v) return std::nullopt;
  return c;
}

std::optional<QVec> coordinates(const std::vector<QVec>& basis, const QVec& v) {
  const int n = static_cast<int>(v.size()), k = static_cast<int>(basis.size());
  QMat aug = zeros(n, k + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) aug[i][j] = basis[j][i];
    aug[i][k] = v[i];
  }
  auto piv = rref(aug, k + 1);
  if (!piv.empty() && piv.back() == k) return std::nullopt;
  if (static_cast<int>(piv.size()) != k) throw InvalidArgument("coordinates: basis is linearly dependent");
  QVec c(k);
  for (int r = 0; r < k; ++r) c[piv[r]] = aug[r][k];
  return c;
}

}  // namespace conelab::qla
