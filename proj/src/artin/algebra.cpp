#include <optional>

#include "conelab/artin.hpp"
#include "conelab/error.hpp"

namespace conelab {

namespace {

QVec unit_vec(int n, int i) {
  QVec v(n);
  v[i] = 1;
  return v;
}

QVec add(QVec a, const QVec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

QVec scale(QVec a, const Scalar& s) {
  for (auto& x : a) x *= s;
  return a;
}

QVec concat(const QVec& a, const QVec& b) {
  QVec v = a;
  v.insert(v.end(), b.begin(), b.end());
  return v;
}

std::string check_structure(BaseField base, const std::vector<std::vector<QVec>>& m, int& nilpotency) {
  const int d = static_cast<int>(m.size());
  if (d < 1) return "dimension must be >= 1";
  for (const auto& row : m) {
    if (static_cast<int>(row.size()) != d) return "structure constants must be dim x dim x dim";
    for (const auto& v : row) {
      if (static_cast<int>(v.size()) != d) return "structure constants must be dim x dim x dim";
      if (base == BaseField::Real)
        for (const auto& x : v)
          if (!x.is_real()) return "real algebra has non-real structure constants";
    }
  }
  auto mul = [&](const QVec& x, const QVec& y) {
    QVec out(d);
    for (int i = 0; i < d; ++i) {
      if (x[i].is_zero()) continue;
      for (int j = 0; j < d; ++j) {
        if (y[j].is_zero()) continue;
        const Scalar s = x[i] * y[j];
        for (int l = 0; l < d; ++l)
          if (!m[i][j][l].is_zero()) out[l] += s * m[i][j][l];
      }
    }
    return out;
  };
  for (int j = 0; j < d; ++j) {
    if (m[0][j] != unit_vec(d, j) || m[j][0] != unit_vec(d, j)) return "e0 is not the unit";
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (m[i][j] != m[j][i]) return "multiplication is not commutative";
      if (i > 0 && j > 0 && !m[i][j][0].is_zero()) return "span(e1, ...) is not an ideal";
    }
  for (int i = 1; i < d; ++i)
    for (int j = 1; j < d; ++j)
      for (int l = 1; l < d; ++l) {
        if (mul(m[i][j], unit_vec(d, l)) != mul(unit_vec(d, i), m[j][l])) return "multiplication is not associative";
      }
  // powers of the maximal ideal as spans
  std::vector<QVec> cur;
  for (int i = 1; i < d; ++i) cur.push_back(unit_vec(d, i));
  int n = 1;
  while (!cur.empty()) {
    if (n > d) return "maximal ideal is not nilpotent";
    QMat gen;
    for (const auto& x : cur)
      for (int j = 1; j < d; ++j) gen.push_back(mul(x, unit_vec(d, j)));
    // row basis of gen
    std::vector<QVec> next;
    QMat acc;
    for (auto& g : gen) {
      acc.push_back(g);
      if (qla::rank(acc) > static_cast<int>(next.size()))
        next.push_back(g);
      else
        acc.pop_back();
    }
    cur = std::move(next);
    ++n;
  }
  nilpotency = n;
  return {};
}

QMat inverse(const QMat& s) {
  const int n = static_cast<int>(s.size());
  std::vector<QVec> cols(n, QVec(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cols[j][i] = s[i][j];
  QMat inv = qla::zeros(n, n);
  for (int j = 0; j < n; ++j) {
    auto c = qla::coordinates(cols, unit_vec(n, j));
    if (!c) throw InvalidArgument("matrix is singular");
    for (int i = 0; i < n; ++i) inv[i][j] = (*c)[i];
  }
  return inv;
}

const char* base_name(BaseField b) { return b == BaseField::Real ? "real" : "complex"; }

}  // namespace

ArtinAlgebra::ArtinAlgebra(BaseField base, std::vector<std::vector<QVec>> mult, std::string name)
    : base_(base), dim_(static_cast<int>(mult.size())), mult_(std::move(mult)), name_(std::move(name)) {
  std::string err = check_structure(base_, mult_, nilpotency_);
  if (!err.empty()) throw InvalidArgument("not an Artin local algebra: " + err);
}

bool ArtinAlgebra::verify() const {
  int n = 0;
  return check_structure(base_, mult_, n).empty() && n == nilpotency_;
}

QVec ArtinAlgebra::one() const { return unit_vec(dim_, 0); }
QVec ArtinAlgebra::basis(int i) const { return unit_vec(dim_, i); }

QVec ArtinAlgebra::mul(const QVec& x, const QVec& y) const {
  if (static_cast<int>(x.size()) != dim_ || static_cast<int>(y.size()) != dim_) {
    throw InvalidArgument("algebra element has the wrong dimension");
  }
  QVec out(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (x[i].is_zero()) continue;
    for (int j = 0; j < dim_; ++j) {
      if (y[j].is_zero()) continue;
      const Scalar s = x[i] * y[j];
      for (int l = 0; l < dim_; ++l)
        if (!mult_[i][j][l].is_zero()) out[l] += s * mult_[i][j][l];
    }
  }
  return out;
}

QMat ArtinAlgebra::left_mult(const QVec& x) const {
  QMat m = qla::zeros(dim_, dim_);
  for (int j = 0; j < dim_; ++j) {
    QVec c = mul(x, basis(j));
    for (int i = 0; i < dim_; ++i) m[i][j] = c[i];
  }
  return m;
}

json ArtinAlgebra::to_json() const {
  json mult = json::array();
  for (const auto& row : mult_) {
    json r = json::array();
    for (const auto& v : row) {
      json c = json::array();
      for (const auto& x : v) c.push_back(scalar_to_json(x));
      r.push_back(c);
    }
    mult.push_back(r);
  }
  json j;
  if (!name_.empty()) j["name"] = name_;
  j["base"] = base_name(base_);
  j["dim"] = dim_;
  j["mult"] = mult;
  return j;
}

ArtinAlgebra ArtinAlgebra::from_json(const json& j, const std::string& where) {
  try {
    const std::string b = j.at("base").get<std::string>();
    if (b != "real" && b != "complex") throw ParseError("base must be \"real\" or \"complex\"", where + "/base");
    const BaseField base = b == "real" ? BaseField::Real : BaseField::Complex;
    if (j.contains("truncated_poly")) return truncated_poly(j.at("truncated_poly").get<int>(), base);
    const int d = j.at("dim").get<int>();
    const json& m = j.at("mult");
    if (!m.is_array() || static_cast<int>(m.size()) != d) throw ParseError("mult must have dim rows", where + "/mult");
    std::vector<std::vector<QVec>> mult(d, std::vector<QVec>(d, QVec(d)));
    for (int a = 0; a < d; ++a) {
      if (!m[a].is_array() || static_cast<int>(m[a].size()) != d) throw ParseError("bad mult row", where + "/mult");
      for (int c = 0; c < d; ++c) {
        if (!m[a][c].is_array() || static_cast<int>(m[a][c].size()) != d) {
          throw ParseError("bad mult entry", where + "/mult/" + std::to_string(a) + "/" + std::to_string(c));
        }
        for (int l = 0; l < d; ++l) mult[a][c][l] = scalar_from_json(m[a][c][l], where + "/mult");
      }
    }
    return ArtinAlgebra(base, std::move(mult), j.value("name", std::string()));
  } catch (const json::exception& e) {
    throw ParseError(e.what(), where);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), where);
  }
}

ArtinAlgebra truncated_poly(int k, BaseField base) {
  if (k < 0) throw InvalidArgument("truncation degree must be >= 0");
  const int d = k + 1;
  std::vector<std::vector<QVec>> m(d, std::vector<QVec>(d, QVec(d)));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i + j < d) m[i][j][i + j] = 1;
  return ArtinAlgebra(base, std::move(m), "A_" + std::to_string(k));
}

ArtinAlgebra complexify(const ArtinAlgebra& a) {
  if (a.base() != BaseField::Real) throw InvalidArgument("complexify needs a real algebra");
  std::vector<std::vector<QVec>> m(a.dim(), std::vector<QVec>(a.dim()));
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) m[i][j] = a.product(i, j);
  return ArtinAlgebra(BaseField::Complex, std::move(m), a.name().empty() ? "" : a.name() + " (x) C");
}

ArtinAlgebra tensor(const ArtinAlgebra& a, const ArtinAlgebra& b) {
  if (a.base() != b.base()) throw InvalidArgument("tensor product needs a common base field");
  const int da = a.dim(), db = b.dim(), d = da * db;
  std::vector<std::vector<QVec>> m(d, std::vector<QVec>(d, QVec(d)));
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j)
      for (int i2 = 0; i2 < da; ++i2)
        for (int j2 = 0; j2 < db; ++j2) {
          QVec& out = m[i * db + j][i2 * db + j2];
          const QVec& pa = a.product(i, i2);
          const QVec& pb = b.product(j, j2);
          for (int l = 0; l < da; ++l) {
            if (pa[l].is_zero()) continue;
            for (int r = 0; r < db; ++r)
              if (!pb[r].is_zero()) out[l * db + r] += pa[l] * pb[r];
          }
        }
  std::string name = a.name().empty() || b.name().empty() ? "" : a.name() + " (x) " + b.name();
  return ArtinAlgebra(a.base(), std::move(m), name);
}

ArtinAlgebra dual_numbers_over(const ArtinAlgebra& a) {
  ArtinAlgebra t = tensor(a, truncated_poly(1, a.base()));
  std::vector<std::vector<QVec>> m(t.dim(), std::vector<QVec>(t.dim()));
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j) m[i][j] = t.product(i, j);
  return ArtinAlgebra(a.base(), std::move(m), a.name().empty() ? "" : a.name() + "[eps]");
}

std::optional<QVec> is_unit(const ArtinAlgebra& a, const QVec& x) {
  if (static_cast<int>(x.size()) != a.dim()) throw InvalidArgument("algebra element has the wrong dimension");
  if (x[0].is_zero()) return std::nullopt;
  const Scalar inv0 = Scalar(1) / x[0];
  // x = x₀(1 + y), y ∈ 𝔪, so x⁻¹ = x₀⁻¹ Σ (−y)^j
  QVec y = scale(x, inv0);
  y[0] = 0;
  QVec neg = scale(y, Scalar(-1));
  QVec term = a.one(), sum = a.one();
  for (int j = 1; j < a.nilpotency_index(); ++j) {
    term = a.mul(term, neg);
    sum = add(sum, term);
  }
  return scale(sum, inv0);
}

bool AlgebraHom::is_unital() const { return apply(source.one()) == target.one(); }

bool AlgebraHom::is_multiplicative() const {
  for (int i = 0; i < source.dim(); ++i)
    for (int j = i; j < source.dim(); ++j) {
      if (apply(source.product(i, j)) != target.mul(apply(source.basis(i)), apply(source.basis(j)))) return false;
    }
  return true;
}

bool AlgebraHom::is_surjective() const { return qla::rank(matrix) == target.dim(); }

bool AlgebraHom::is_bijective() const { return source.dim() == target.dim() && is_surjective(); }

AlgebraHom make_hom(const ArtinAlgebra& source, const ArtinAlgebra& target, const std::vector<QVec>& images) {
  if (static_cast<int>(images.size()) != source.dim()) throw InvalidArgument("need one image per source basis element");
  QMat m = qla::zeros(target.dim(), source.dim());
  for (int j = 0; j < source.dim(); ++j) {
    if (static_cast<int>(images[j].size()) != target.dim()) throw InvalidArgument("image has the wrong dimension");
    for (int i = 0; i < target.dim(); ++i) m[i][j] = images[j][i];
  }
  return {source, target, std::move(m)};
}

AlgebraHom compose(const AlgebraHom& g, const AlgebraHom& f) {
  if (!(f.target == g.source)) throw InvalidArgument("cannot compose: target and source differ");
  return {f.source, g.target, qla::mul(g.matrix, f.matrix)};
}

AlgebraHom identity_hom(const ArtinAlgebra& a) { return {a, a, qla::identity(a.dim())}; }

AlgebraHom residue_map(const ArtinAlgebra& a) {
  ArtinAlgebra k = truncated_poly(0, a.base());
  std::vector<QVec> images(a.dim(), QVec(1));
  images[0][0] = 1;
  return make_hom(a, k, images);
}

bool same_map(const AlgebraHom& f, const AlgebraHom& g) {
  return f.source == g.source && f.target == g.target && f.matrix == g.matrix;
}

SmallExtension small_extension(const ArtinAlgebra& a, const QVec& eps) {
  const int d = a.dim();
  if (static_cast<int>(eps.size()) != d) throw InvalidArgument("epsilon has the wrong dimension");
  if (qla::is_zero(eps)) throw InvalidArgument("epsilon must be non-zero");
  if (!a.in_maximal_ideal(eps)) throw InvalidArgument("epsilon must lie in the maximal ideal");
  for (int i = 1; i < d; ++i) {
    if (!qla::is_zero(a.mul(eps, a.basis(i)))) {
      throw InvalidArgument("epsilon is not annihilated by the maximal ideal (epsilon * e" + std::to_string(i) +
                            " != 0)");
    }
  }
  int piv = d - 1;
  while (eps[piv].is_zero()) --piv;
  std::vector<int> keep, pos(d, -1);
  for (int i = 0; i < d; ++i)
    if (i != piv) {
      pos[i] = static_cast<int>(keep.size());
      keep.push_back(i);
    }
  const int q = d - 1;
  std::vector<QVec> images(d, QVec(q));
  for (int i = 0; i < d; ++i) {
    if (i != piv) {
      images[i][pos[i]] = 1;
    } else {
      for (int l = 0; l < d; ++l)
        if (l != piv) images[i][pos[l]] = -(eps[l] / eps[piv]);
    }
  }
  auto project = [&](const QVec& x) {
    QVec y(q);
    for (int i = 0; i < d; ++i)
      if (!x[i].is_zero())
        for (int l = 0; l < q; ++l) y[l] += x[i] * images[i][l];
    return y;
  };
  std::vector<std::vector<QVec>> m(q, std::vector<QVec>(q));
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) m[i][j] = project(a.product(keep[i], keep[j]));
  std::string name = a.name().empty() ? "" : a.name() + "/(eps)";
  ArtinAlgebra b(a.base(), std::move(m), name);
  AlgebraHom proj = make_hom(a, b, images);
  if (!proj.is_homomorphism()) throw InvalidArgument("quotient map is not a homomorphism");
  return {eps, std::move(b), std::move(proj)};
}

QVec FiberProduct::coordinates(const QVec& a, const QVec& b) const {
  const int n = algebra.dim();
  std::vector<QVec> cols(n, QVec(embedding.size()));
  for (std::size_t i = 0; i < embedding.size(); ++i)
    for (int j = 0; j < n; ++j) cols[j][i] = embedding[i][j];
  auto c = qla::coordinates(cols, concat(a, b));
  if (!c) throw InvalidArgument("pair does not lie in the fiber product");
  return *c;
}

FiberProduct fiber_product(const AlgebraHom& f, const AlgebraHom& g) {
  if (!(f.target == g.target)) throw InvalidArgument("fiber product needs maps into the same algebra");
  if (!f.is_homomorphism() || !g.is_homomorphism()) throw InvalidArgument("fiber product needs algebra homomorphisms");
  const ArtinAlgebra& A = f.source;
  const ArtinAlgebra& B = g.source;
  const int da = A.dim(), db = B.dim(), dc = f.target.dim(), w = da + db;
  QMat cons = qla::zeros(dc + 1, w);
  for (int i = 0; i < dc; ++i) {
    for (int j = 0; j < da; ++j) cons[i][j] = f.matrix[i][j];
    for (int j = 0; j < db; ++j) cons[i][da + j] = -g.matrix[i][j];
  }
  cons[dc][0] = 1;
  std::vector<QVec> basis{concat(A.one(), B.one())};
  for (auto& v : qla::nullspace(cons, w)) basis.push_back(std::move(v));
  const int n = static_cast<int>(basis.size());

  auto split = [&](const QVec& v) {
    return std::pair{QVec(v.begin(), v.begin() + da), QVec(v.begin() + da, v.end())};
  };
  std::vector<std::vector<QVec>> m(n, std::vector<QVec>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      auto [ai, bi] = split(basis[i]);
      auto [aj, bj] = split(basis[j]);
      auto c = qla::coordinates(basis, concat(A.mul(ai, aj), B.mul(bi, bj)));
      if (!c) throw InvalidArgument("fiber product is not closed under multiplication");
      m[i][j] = *c;
      m[j][i] = *c;
    }
  std::string name = A.name().empty() || B.name().empty() ? "" : A.name() + " x_" + f.target.name() + " " + B.name();
  ArtinAlgebra P(A.base(), std::move(m), name);
  QMat emb = qla::zeros(w, n);
  std::vector<QVec> ia(n), ib(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < w; ++i) emb[i][j] = basis[j][i];
    std::tie(ia[j], ib[j]) = split(basis[j]);
  }
  AlgebraHom pa = make_hom(P, A, ia);
  AlgebraHom pb = make_hom(P, B, ib);
  return {std::move(P), std::move(emb), std::move(pa), std::move(pb)};
}

LiftMaps lift_maps(int k, BaseField base) {
  if (k < 1) throw InvalidArgument("lift maps need k >= 1");
  ArtinAlgebra Ak = truncated_poly(k, base);
  ArtinAlgebra Ak1 = truncated_poly(k - 1, base);
  ArtinAlgebra Dk = dual_numbers_over(Ak);
  ArtinAlgebra Dk1 = dual_numbers_over(Ak1);

  std::vector<QVec> pi(k + 1, QVec(k));
  for (int i = 0; i < k; ++i) pi[i][i] = 1;

  // t^i ε^j sits at index 2i + j
  QVec t_plus_eps(Dk1.dim());
  if (k - 1 >= 1) t_plus_eps[2] = 1;
  t_plus_eps[1] = 1;
  std::vector<QVec> theta(k + 1);
  theta[0] = Dk1.one();
  for (int i = 1; i <= k; ++i) theta[i] = Dk1.mul(theta[i - 1], t_plus_eps);

  std::vector<QVec> varpi(Dk.dim(), QVec(Dk1.dim()));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < 2; ++j) varpi[2 * i + j][2 * i + j] = 1;

  return {make_hom(Ak, Ak1, pi), make_hom(Ak, Dk1, theta), make_hom(Dk, Dk1, varpi)};
}

SmallExtensionIsomorphism small_extension_isomorphism(const ArtinAlgebra& a, const QVec& epsilon) {
  SmallExtension se = small_extension(a, epsilon);
  ArtinAlgebra dual = truncated_poly(1, a.base());
  SmallExtensionIsomorphism out{fiber_product(residue_map(a), residue_map(dual)),
                                fiber_product(se.projection, se.projection),
                                {a, a, {}},
                                false};
  const int da = a.dim();
  std::vector<QVec> images;
  for (int j = 0; j < out.left.algebra.dim(); ++j) {
    QVec col(out.left.embedding.size());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = out.left.embedding[i][j];
    QVec x(col.begin(), col.begin() + da);
    const Scalar lambda = col[da + 1];
    images.push_back(out.right.coordinates(x, add(x, scale(epsilon, lambda))));
  }
  out.map = make_hom(out.left.algebra, out.right.algebra, images);
  out.verified = out.map.is_homomorphism() && out.map.is_bijective();
  return out;
}

bool FiniteModule::verify() const {
  const int d = algebra.dim();
  if (static_cast<int>(action.size()) != d) return false;
  for (const auto& m : action) {
    if (static_cast<int>(m.size()) != rank) return false;
    for (const auto& r : m)
      if (static_cast<int>(r.size()) != rank) return false;
  }
  if (action[0] != qla::identity(rank)) return false;
  for (int i = 1; i < d; ++i)
    for (int j = i; j < d; ++j) {
      QMat lhs = qla::mul(action[i], action[j]);
      QMat rhs = qla::zeros(rank, rank);
      const QVec& c = algebra.product(i, j);
      for (int l = 0; l < d; ++l) {
        if (c[l].is_zero()) continue;
        for (int r = 0; r < rank; ++r)
          for (int s = 0; s < rank; ++s) rhs[r][s] += c[l] * action[l][r][s];
      }
      if (lhs != rhs) return false;
    }
  return true;
}

namespace {

json matrix_to_json(const QMat& m) {
  json out = json::array();
  for (const auto& r : m) {
    json row = json::array();
    for (const auto& x : r) row.push_back(scalar_to_json(x));
    out.push_back(row);
  }
  return out;
}

QMat matrix_from_json(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw ParseError("expected a square matrix of size " + std::to_string(n), where);
  QMat m = qla::zeros(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) throw ParseError("bad matrix row", where);
    for (int c = 0; c < n; ++c) m[r][c] = scalar_from_json(j[r][c], where);
  }
  return m;
}

}  // namespace

json FiniteModule::to_json() const {
  json acts = json::array();
  for (const auto& m : action) acts.push_back(matrix_to_json(m));
  return {{"algebra", algebra.to_json()}, {"rank", rank}, {"action", acts}};
}

FiniteModule FiniteModule::from_json(const json& j, const std::string& where) {
  try {
    if (j.contains("t_action")) {
      const int k = j.at("k").get<int>();
      const BaseField base = j.value("base", std::string("complex")) == "real" ? BaseField::Real : BaseField::Complex;
      const json& t = j.at("t_action");
      return module_from_t_action(k, matrix_from_json(t, static_cast<int>(t.size()), where + "/t_action"), base);
    }
    FiniteModule m{ArtinAlgebra::from_json(j.at("algebra"), where + "/algebra"), j.at("rank").get<int>(), {}};
    const json& acts = j.at("action");
    for (std::size_t i = 0; i < acts.size(); ++i) {
      m.action.push_back(matrix_from_json(acts[i], m.rank, where + "/action/" + std::to_string(i)));
    }
    if (!m.verify()) throw ParseError("action is not a unital algebra representation", where);
    return m;
  } catch (const json::exception& e) {
    throw ParseError(e.what(), where);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), where);
  }
}

FiniteModule module_from_t_action(int k, const QMat& t, BaseField base) {
  const int r = static_cast<int>(t.size());
  for (const auto& row : t)
    if (static_cast<int>(row.size()) != r) throw InvalidArgument("t-action must be square");
  FiniteModule m{truncated_poly(k, base), r, {}};
  QMat p = qla::identity(r);
  for (int i = 0; i <= k; ++i) {
    m.action.push_back(p);
    p = qla::mul(p, t);
  }
  if (!qla::is_zero(p)) throw InvalidArgument("t^" + std::to_string(k + 1) + " does not act as zero");
  return m;
}

bool ModuleMap::is_linear() const {
  for (int i = 0; i < source.algebra.dim(); ++i) {
    if (qla::mul(matrix, source.action[i]) != qla::mul(target.action[i], matrix)) return false;
  }
  return true;
}

namespace {

QVec flatten(const QMat& m) {
  QVec v;
  for (const auto& r : m) v.insert(v.end(), r.begin(), r.end());
  return v;
}

QMat unflatten(const QVec& v, int rows, int cols) {
  QMat m = qla::zeros(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m[i][j] = v[i * cols + j];
  return m;
}

std::vector<QVec> flat_basis(const std::vector<QMat>& b) {
  std::vector<QVec> out;
  for (const auto& m : b) out.push_back(flatten(m));
  return out;
}

}  // namespace

DualModule module_dual(const FiniteModule& m) {
  const ArtinAlgebra& A = m.algebra;
  const int da = A.dim(), r = m.rank, w = da * r;
  // Φ T_i = L_i Φ for basis elements spanning 𝔪/𝔪², which generate 𝔪
  QMat span;
  for (int i = 1; i < da; ++i)
    for (int j = 1; j < da; ++j) span.push_back(A.product(i, j));
  std::vector<int> gens;
  for (int i = 1; i < da; ++i) {
    const int before = qla::rank(span);
    span.push_back(A.basis(i));
    if (qla::rank(span) > before) gens.push_back(i);
  }
  QMat cons;
  for (int i : gens) {
    const QMat L = A.left_mult(A.basis(i));
    const QMat& T = m.action[i];
    for (int a = 0; a < da; ++a)
      for (int c = 0; c < r; ++c) {
        QVec row(w);
        for (int b = 0; b < r; ++b) row[a * r + b] += T[b][c];
        for (int b = 0; b < da; ++b) row[b * r + c] -= L[a][b];
        cons.push_back(std::move(row));
      }
  }
  std::vector<int> free;
  const auto fb = qla::nullspace(cons, w, &free);
  std::vector<QMat> basis;
  for (const auto& v : fb) basis.push_back(unflatten(v, da, r));
  const int n = static_cast<int>(basis.size());
  FiniteModule dm{A, n, {}};
  for (int i = 0; i < da; ++i) {
    const QMat L = A.left_mult(A.basis(i));
    QMat act = qla::zeros(n, n);
    for (int s = 0; s < n; ++s) {
      auto c = qla::free_coordinates(fb, free, flatten(qla::mul(L, basis[s])));
      if (!c) throw InvalidArgument("dual is not closed under the algebra action");
      for (int q = 0; q < n; ++q) act[q][s] = (*c)[q];
    }
    dm.action.push_back(std::move(act));
  }
  return {std::move(dm), std::move(basis), std::move(free)};
}

ModuleMap dual_map(const ModuleMap& f, const DualModule& m_dual, const DualModule& n_dual) {
  const auto fb = flat_basis(m_dual.basis);
  const int rm = m_dual.module.rank, rn = n_dual.module.rank;
  QMat mat = qla::zeros(rm, rn);
  for (int s = 0; s < rn; ++s) {
    auto c = qla::free_coordinates(fb, m_dual.free, flatten(qla::mul(n_dual.basis[s], f.matrix)));
    if (!c) throw InvalidArgument("pullback of an A-linear map is not A-linear");
    for (int q = 0; q < rm; ++q) mat[q][s] = (*c)[q];
  }
  return {n_dual.module, m_dual.module, std::move(mat)};
}

ReflexivityReport reflexivity_check(const FiniteModule& m) {
  ReflexivityReport rep;
  rep.rank = m.rank;
  DualModule d = module_dual(m);
  DualModule dd = module_dual(d.module);
  rep.dual_rank = d.module.rank;
  rep.bidual_rank = dd.module.rank;
  const int da = m.algebra.dim(), n = d.module.rank;
  const auto fb = flat_basis(dd.basis);
  QMat ev = qla::zeros(dd.module.rank, m.rank);
  for (int c = 0; c < m.rank; ++c) {
    // ψ_m(φ_s) = φ_s(m): column s of ψ_m is column c of Φ_s
    QMat psi = qla::zeros(da, n);
    for (int s = 0; s < n; ++s)
      for (int a = 0; a < da; ++a) psi[a][s] = d.basis[s][a][c];
    auto co = qla::free_coordinates(fb, dd.free, flatten(psi));
    if (!co) return rep;
    for (int q = 0; q < dd.module.rank; ++q) ev[q][c] = (*co)[q];
  }
  rep.evaluation_rank = qla::rank(ev);
  rep.evaluation_linear = ModuleMap{m, dd.module, ev}.is_linear();
  rep.reflexive = rep.evaluation_linear && rep.evaluation_rank == m.rank && rep.bidual_rank == m.rank;
  return rep;
}

FiniteModule random_truncated_module(int k, int max_rank, std::mt19937_64& rng) {
  if (k < 0 || max_rank < 1) throw InvalidArgument("random module needs k >= 0 and max_rank >= 1");
  const int r = std::uniform_int_distribution<int>(1, max_rank)(rng);
  QMat J = qla::zeros(r, r);
  std::uniform_int_distribution<int> block(1, k + 1);
  for (int start = 0; start < r;) {
    const int len = std::min(block(rng), r - start);
    for (int i = 0; i + 1 < len; ++i) J[start + i + 1][start + i] = 1;
    start += len;
  }
  std::uniform_int_distribution<int> entry(-3, 3);
  QMat S;
  do {
    S = qla::zeros(r, r);
    for (auto& row : S)
      for (auto& x : row) x = Scalar(Rational(entry(rng)), Rational(entry(rng)));
  } while (qla::rank(S) < r);
  return module_from_t_action(k, qla::mul(qla::mul(S, J), inverse(S)));
}

json scalar_to_json(const Scalar& s) {
  if (s.is_real()) return to_string(s.re);
  return {{"re", to_string(s.re)}, {"im", to_string(s.im)}};
}

Scalar scalar_from_json(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return Scalar(parse_rational(j.get<std::string>()));
    if (j.is_number_integer()) return Scalar(j.get<long>());
    if (j.is_object()) {
      return Scalar(parse_rational(j.at("re").get<std::string>()), parse_rational(j.value("im", std::string("0"))));
    }
  } catch (const json::exception& e) {
    throw ParseError(e.what(), where);
  }
  throw ParseError("exact scalar must be an integer, a \"p/q\" string or {\"re\", \"im\"}", where);
}

}  // namespace conelab
