#include "conelab/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

namespace conelab {

SimplicialComplex simplex_boundary(int n) {
  if (n < 2) throw InvalidArgument("simplex_boundary needs n >= 2");
  std::vector<Simplex> top;
  for (int skip = 0; skip <= n; ++skip) {
    Simplex s;
    for (int v = 0; v <= n; ++v)
      if (v != skip) s.push_back(v);
    top.push_back(s);
  }
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(n + 1, n + 1);
  X.array() -= 1.0 / (n + 1);
  X.rowwise().normalize();
  return SimplicialComplex::from_top(n - 1, std::move(top), n + 1, std::move(X));
}

SimplicialComplex icosphere(int level) {
  if (level < 0) throw InvalidArgument("icosphere level must be >= 0");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> P = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                                    {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : P) p.normalize();
  std::vector<std::array<int, 3>> F = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int it = 0; it < level; ++it) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto found = mid.find(key);
      if (found != mid.end()) return found->second;
      P.push_back((P[a] + P[b]).normalized());
      int id = static_cast<int>(P.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> G;
    G.reserve(F.size() * 4);
    for (auto [a, b, c] : F) {
      int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
      G.push_back({a, ab, ca});
      G.push_back({b, bc, ab});
      G.push_back({c, ca, bc});
      G.push_back({ab, bc, ca});
    }
    F.swap(G);
  }
  std::vector<Simplex> top;
  top.reserve(F.size());
  for (auto [a, b, c] : F) top.push_back({a, b, c});
  Eigen::MatrixXd X(static_cast<Eigen::Index>(P.size()), 3);
  for (std::size_t i = 0; i < P.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = P[i].transpose();
  return SimplicialComplex::from_top(2, std::move(top), static_cast<int>(P.size()), std::move(X));
}

SimplicialComplex flat_torus(int d, int N) {
  if (d < 1 || d > 4) throw InvalidArgument("flat_torus supports 1 <= d <= 4");
  if (N < 3) throw InvalidArgument("flat_torus needs N >= 3");
  int nv = 1;
  for (int i = 0; i < d; ++i) nv *= N;
  auto id = [&](std::vector<int> g) {
    int v = 0;
    for (int i = d - 1; i >= 0; --i) v = v * N + ((g[i] % N) + N) % N;
    return v;
  };
  std::vector<int> perm(d);
  std::vector<Simplex> top;
  for (int base = 0; base < nv; ++base) {
    std::vector<int> g(d);
    for (int i = 0, r = base; i < d; ++i, r /= N) g[i] = r % N;
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<int> cur = g;
      Simplex s{id(cur)};
      for (int axis : perm) {
        ++cur[axis];
        s.push_back(id(cur));
      }
      top.push_back(std::move(s));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  // Clifford embedding: each circle factor has chord 2π/N, so every
  // simplex is isometric to the flat one of side h = 2π/N.
  const double h = 2.0 * std::numbers::pi / N;
  const double R = (h / 2.0) / std::sin(std::numbers::pi / N);
  Eigen::MatrixXd X(nv, 2 * d);
  for (int v = 0; v < nv; ++v) {
    for (int i = 0, r = v; i < d; ++i, r /= N) {
      double th = h * (r % N);
      X(v, 2 * i) = R * std::cos(th);
      X(v, 2 * i + 1) = R * std::sin(th);
    }
  }
  return SimplicialComplex::from_top(d, std::move(top), nv, std::move(X));
}

SimplicialComplex circle(int N) { return flat_torus(1, N); }

SimplicialComplex product(const SimplicialComplex& A, const SimplicialComplex& B) {
  const int p = A.dim(), q = B.dim();
  const int nB = B.vertex_count();
  if (A.has_coordinates() != B.has_coordinates()) {
    throw InvalidArgument("product: both factors need coordinates, or neither");
  }
  // monotone lattice paths (0,0) → (p,q): choose which of the p+q steps move in A
  std::vector<std::vector<char>> paths;
  {
    std::vector<char> steps(p + q, 0);
    std::fill(steps.begin(), steps.begin() + q, 1);  // 1 = step in B
    std::sort(steps.begin(), steps.end());
    do paths.push_back(steps);
    while (std::next_permutation(steps.begin(), steps.end()));
  }
  std::vector<Simplex> top;
  top.reserve(A.count(p) * B.count(q) * paths.size());
  for (const auto& s : A.simplices(p)) {
    for (const auto& t : B.simplices(q)) {
      for (const auto& path : paths) {
        int i = 0, j = 0;
        Simplex out{s[0] * nB + t[0]};
        for (char st : path) {
          (st ? j : i)++;
          out.push_back(s[i] * nB + t[j]);
        }
        top.push_back(std::move(out));
      }
    }
  }
  Eigen::MatrixXd X;
  const int nA = A.vertex_count();
  if (A.has_coordinates()) {
    const auto& XA = A.coordinates();
    const auto& XB = B.coordinates();
    X.resize(nA * nB, XA.cols() + XB.cols());
    for (int a = 0; a < nA; ++a)
      for (int b = 0; b < nB; ++b) X.row(a * nB + b) << XA.row(a), XB.row(b);
  }
  return SimplicialComplex::from_top(p + q, std::move(top), nA * nB, std::move(X));
}

SimplicialComplex generate(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto arg = [&](std::size_t i) {
    if (i >= parts.size()) throw InvalidArgument("generator '" + spec + "' is missing an argument");
    try {
      return std::stoi(parts[i]);
    } catch (const std::exception&) {
      throw InvalidArgument("generator '" + spec + "': bad integer '" + parts[i] + "'");
    }
  };
  const std::string& kind = parts.empty() ? spec : parts[0];
  if (kind == "sphere") return simplex_boundary(arg(1) + 1);
  if (kind == "icosphere") return icosphere(arg(1));
  if (kind == "torus") return flat_torus(arg(1), arg(2));
  if (kind == "circle") return circle(arg(1));
  if (kind == "s2xs1") return product(icosphere(arg(1)), circle(arg(2)));
  throw InvalidArgument("unknown generator '" + spec + "'");
}

}  // namespace conelab
