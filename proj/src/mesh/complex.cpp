#include <algorithm>
#include <numeric>
#include <sstream>

#include "conelab/mesh.hpp"

namespace conelab {

namespace {

std::string simplex_str(const Simplex& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

}  // namespace

MeshError::MeshError(const std::string& what, Simplex simplex)
    : Error(simplex.empty() ? what : what + " at simplex " + simplex_str(simplex)),
      simplex_(std::move(simplex)) {}

std::size_t SimplexHash::operator()(const Simplex& s) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (int v : s) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

SimplicialComplex SimplicialComplex::from_top(int dim, std::vector<Simplex> top, int vertex_count,
                                              Eigen::MatrixXd coords) {
  if (dim < 1) throw MeshError("complex dimension must be >= 1");
  if (top.empty()) throw MeshError("complex has no top simplices");

  int max_id = -1;
  for (auto& s : top) {
    if (static_cast<int>(s.size()) != dim + 1) {
      throw MeshError("top simplex has " + std::to_string(s.size()) + " vertices, expected " +
                          std::to_string(dim + 1),
                      s);
    }
    std::sort(s.begin(), s.end());
    if (s.front() < 0) throw MeshError("negative vertex id", s);
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw MeshError("repeated vertex id", s);
    max_id = std::max(max_id, s.back());
  }
  std::sort(top.begin(), top.end());
  if (auto it = std::adjacent_find(top.begin(), top.end()); it != top.end()) {
    throw MeshError("duplicate simplex", *it);
  }
  if (vertex_count < 0) vertex_count = max_id + 1;
  if (vertex_count <= max_id) throw MeshError("vertex id out of range");

  SimplicialComplex c;
  c.dim_ = dim;
  c.simplices_.resize(dim + 1);
  c.simplices_[dim] = std::move(top);
  for (int k = dim; k >= 1; --k) {
    std::vector<Simplex> faces;
    faces.reserve(c.simplices_[k].size() * (k + 1));
    for (const auto& s : c.simplices_[k]) {
      for (int i = 0; i <= k; ++i) {
        Simplex f;
        f.reserve(k);
        for (int j = 0; j <= k; ++j)
          if (j != i) f.push_back(s[j]);
        faces.push_back(std::move(f));
      }
    }
    std::sort(faces.begin(), faces.end());
    faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
    c.simplices_[k - 1] = std::move(faces);
  }
  if (static_cast<int>(c.simplices_[0].size()) != vertex_count) {
    std::vector<char> used(vertex_count, 0);
    for (const auto& v : c.simplices_[0]) used[v[0]] = 1;
    int lonely = static_cast<int>(std::find(used.begin(), used.end(), 0) - used.begin());
    throw MeshError("vertex lies in no top simplex (complex is not pure)", Simplex{lonely});
  }

  c.index_.resize(dim + 1);
  for (int k = 0; k <= dim; ++k) {
    auto& idx = c.index_[k];
    idx.reserve(c.simplices_[k].size());
    for (std::size_t i = 0; i < c.simplices_[k].size(); ++i) idx.emplace(c.simplices_[k][i], static_cast<int>(i));
  }

  c.boundary_.resize(dim + 1);
  for (int k = 1; k <= dim; ++k) {
    std::vector<Eigen::Triplet<int>> trip;
    trip.reserve(c.simplices_[k].size() * (k + 1));
    for (std::size_t j = 0; j < c.simplices_[k].size(); ++j) {
      const auto& s = c.simplices_[k][j];
      Simplex f(k);
      for (int i = 0; i <= k; ++i) {
        for (int a = 0, b = 0; a <= k; ++a)
          if (a != i) f[b++] = s[a];
        trip.emplace_back(c.index_[k - 1].at(f), static_cast<int>(j), (i % 2 == 0) ? 1 : -1);
      }
    }
    IntSparse B(static_cast<Eigen::Index>(c.simplices_[k - 1].size()),
                static_cast<Eigen::Index>(c.simplices_[k].size()));
    B.setFromTriplets(trip.begin(), trip.end());
    c.boundary_[k] = std::move(B);
  }

  // closed pseudomanifold: every codimension-one face has exactly two cofaces
  {
    const IntSparse& B = c.boundary_[dim];
    std::vector<int> cof(B.rows(), 0);
    for (int j = 0; j < B.outerSize(); ++j)
      for (IntSparse::InnerIterator it(B, j); it; ++it) ++cof[it.row()];
    for (std::size_t r = 0; r < cof.size(); ++r) {
      if (cof[r] != 2) {
        throw MeshError("non-manifold facet with " + std::to_string(cof[r]) + " cofaces",
                        c.simplices_[dim - 1][r]);
      }
    }
  }
  for (int k = 2; k <= dim; ++k) {
    IntSparse dd = c.boundary_[k - 1] * c.boundary_[k];
    dd.prune(0);
    if (dd.nonZeros() != 0) throw MeshError("boundary of boundary is nonzero");
  }

  if (coords.size() > 0) {
    if (coords.rows() != vertex_count) {
      throw MeshError("coordinate rows (" + std::to_string(coords.rows()) + ") do not match vertex count (" +
                      std::to_string(vertex_count) + ")");
    }
    if (coords.cols() < dim) throw MeshError("embedding dimension smaller than complex dimension");
    c.coords_ = std::move(coords);
  }
  return c;
}

std::size_t SimplicialComplex::total_count() const {
  std::size_t n = 0;
  for (const auto& s : simplices_) n += s.size();
  return n;
}

int SimplicialComplex::index_of(int k, const Simplex& s) const {
  if (k < 0 || k > dim_) return -1;
  auto it = index_[k].find(s);
  return it == index_[k].end() ? -1 : it->second;
}

long SimplicialComplex::euler_characteristic() const {
  long chi = 0;
  for (int k = 0; k <= dim_; ++k) chi += (k % 2 == 0 ? 1 : -1) * static_cast<long>(simplices_[k].size());
  return chi;
}

SimplicialComplex SimplicialComplex::relabeled(const std::vector<int>& perm) const {
  const int n = vertex_count();
  if (static_cast<int>(perm.size()) != n) throw InvalidArgument("permutation size mismatch");
  std::vector<Simplex> top;
  top.reserve(simplices_[dim_].size());
  for (const auto& s : simplices_[dim_]) {
    Simplex t;
    for (int v : s) t.push_back(perm[v]);
    top.push_back(std::move(t));
  }
  Eigen::MatrixXd coords;
  if (has_coordinates()) {
    coords.resize(n, coords_.cols());
    for (int v = 0; v < n; ++v) coords.row(perm[v]) = coords_.row(v);
  }
  return from_top(dim_, std::move(top), n, std::move(coords));
}

}  // namespace conelab
