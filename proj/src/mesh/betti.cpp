#include <cmath>
#include <unordered_map>

#include "conelab/mesh.hpp"
#include "conelab/rational.hpp"

namespace conelab {

namespace {

template <class T>
using Column = std::vector<std::pair<int, T>>;

// col -= f * piv, both sorted by row; entries that cancel (or fall under the
// drop test) are removed.
template <class T, class Drop>
void axpy(Column<T>& col, const T& f, const Column<T>& piv, Drop drop) {
  Column<T> out;
  out.reserve(col.size() + piv.size());
  std::size_t a = 0, b = 0;
  while (a < col.size() || b < piv.size()) {
    if (b == piv.size() || (a < col.size() && col[a].first < piv[b].first)) {
      out.push_back(std::move(col[a++]));
    } else if (a == col.size() || piv[b].first < col[a].first) {
      T v = -(f * piv[b].second);
      if (!drop(v)) out.emplace_back(piv[b].first, std::move(v));
      ++b;
    } else {
      T v = col[a].second - f * piv[b].second;
      if (!drop(v)) out.emplace_back(col[a].first, std::move(v));
      ++a;
      ++b;
    }
  }
  col.swap(out);
}

// Standard column reduction: each column is reduced against earlier columns
// that own the same lowest row until its lowest row is free or it vanishes.
template <class T, class Drop>
long reduce_rank(const IntSparse& m, Drop drop) {
  std::unordered_map<int, Column<T>> owner;
  owner.reserve(static_cast<std::size_t>(m.cols()));
  long rank = 0;
  for (int j = 0; j < m.outerSize(); ++j) {
    Column<T> col;
    for (IntSparse::InnerIterator it(m, j); it; ++it)
      if (it.value() != 0) col.emplace_back(static_cast<int>(it.row()), T(it.value()));
    std::sort(col.begin(), col.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    while (!col.empty()) {
      auto hit = owner.find(col.back().first);
      if (hit == owner.end()) break;
      T f = col.back().second / hit->second.back().second;
      axpy(col, f, hit->second, drop);
    }
    if (!col.empty()) {
      int low = col.back().first;
      owner.emplace(low, std::move(col));
      ++rank;
    }
  }
  return rank;
}

}  // namespace

long rank_exact(const IntSparse& m) {
  return reduce_rank<Rational>(m, [](const Rational& v) { return sgn(v) == 0; });
}

long rank_float(const IntSparse& m, double rel_tol) {
  // all input entries are ±1, so the column scale is O(1)
  return reduce_rank<double>(m, [rel_tol](double v) { return std::abs(v) <= rel_tol; });
}

BettiVector betti(const SimplicialComplex& c, const BettiOptions& opts) {
  const int n = c.dim();
  BettiVector out;
  out.exact = c.total_count() <= opts.exact_limit;
  std::vector<long> rk(n + 2, 0);
  for (int k = 1; k <= n; ++k)
    rk[k] = out.exact ? rank_exact(c.boundary(k)) : rank_float(c.boundary(k), opts.float_tol);
  out.b.resize(n + 1);
  for (int k = 0; k <= n; ++k) out.b[k] = static_cast<long>(c.count(k)) - rk[k] - rk[k + 1];
  return out;
}

std::string to_string(BettiHypothesis h) {
  switch (h) {
    case BettiHypothesis::HoldsViaNMinus2: return "holds_via_n-2";
    case BettiHypothesis::HoldsViaNMinus1: return "holds_via_n-1";
    case BettiHypothesis::HoldsViaBoth: return "holds_via_both";
    case BettiHypothesis::Fails: return "fails";
  }
  return "?";
}

BettiHypothesis check_betti_hypothesis(const std::vector<long>& b, int n) {
  if (n < 2) throw InvalidArgument("Betti hypothesis needs complex dimension n >= 2, got " + std::to_string(n));
  if (static_cast<int>(b.size()) < n) {
    throw InvalidArgument("Betti vector of length " + std::to_string(b.size()) + " is too short for n=" +
                          std::to_string(n));
  }
  const bool a = b[n - 2] == 0;
  const bool c = b[n - 1] == 0;
  if (a && c) return BettiHypothesis::HoldsViaBoth;
  if (a) return BettiHypothesis::HoldsViaNMinus2;
  if (c) return BettiHypothesis::HoldsViaNMinus1;
  return BettiHypothesis::Fails;
}

}  // namespace conelab
