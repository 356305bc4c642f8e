#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "conelab/kahler.hpp"

namespace conelab {

namespace {

// real second derivative along real directions u, v (complex vectors viewed in ℝ^{2m})
double d2(const ScalarField& f, const CVec& z, const CVec& u, const CVec& v, double h) {
  auto D = [&](double s) {
    return (f.value(z + s * u + s * v) - f.value(z + s * u - s * v) - f.value(z - s * u + s * v) +
            f.value(z - s * u - s * v)) /
           (4 * s * s);
  };
  return (4 * D(h) - D(2 * h)) / 3;
}

double d1(const ScalarField& f, const CVec& z, const CVec& u, double h) {
  return (-f.value(z + 2 * h * u) + 8 * f.value(z + h * u) - 8 * f.value(z - h * u) + f.value(z - 2 * h * u)) /
         (12 * h);
}

double step_for(const ScalarField& f, const CVec& z, double h) {
  if (z.size() != f.m()) throw InvalidArgument("point dimension does not match the field");
  if (h <= 0) h = 1e-3 * f.domain_radius();
  if (z.norm() + 2 * std::sqrt(2.0) * h > f.domain_radius()) {
    throw InvalidArgument("finite-difference stencil leaves the domain of the field");
  }
  return h;
}

std::complex<double> ipow(std::complex<double> x, int e) {
  std::complex<double> r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// "z1 zbar2^3" → powers; empty key or "1" is the constant term
std::pair<std::vector<int>, std::vector<int>> parse_key(const std::string& key, int m, const std::string& where) {
  std::vector<int> a(m, 0), b(m, 0);
  std::string k = key;
  std::replace(k.begin(), k.end(), '*', ' ');
  std::istringstream is(k);
  std::string tok;
  while (is >> tok) {
    if (tok == "1") continue;
    bool bar = false;
    std::size_t pos = 0;
    if (tok.rfind("zbar", 0) == 0) {
      bar = true;
      pos = 4;
    } else if (tok.rfind("z", 0) == 0) {
      pos = 1;
    } else {
      throw ParseError("unknown monomial factor '" + tok + "'", where);
    }
    std::size_t caret = tok.find('^', pos);
    std::string idx = tok.substr(pos, caret == std::string::npos ? std::string::npos : caret - pos);
    int e = 1;
    try {
      if (caret != std::string::npos) e = std::stoi(tok.substr(caret + 1));
      const int i = std::stoi(idx);
      if (i < 1 || i > m || e < 0) throw std::out_of_range("index");
      (bar ? b : a)[i - 1] += e;
    } catch (const std::logic_error&) {
      throw ParseError("bad monomial factor '" + tok + "' (variables are z1..z" + std::to_string(m) + ")", where);
    }
  }
  return {a, b};
}

int max_index(const json& dict) {
  int m = 0;
  for (auto it = dict.begin(); it != dict.end(); ++it) {
    std::string k = it.key();
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] != 'z') continue;
      std::size_t j = i + 1;
      if (k.compare(j, 3, "bar") == 0) j += 3;
      std::size_t e = j;
      while (e < k.size() && std::isdigit(static_cast<unsigned char>(k[e]))) ++e;
      if (e > j) m = std::max(m, std::stoi(k.substr(j, e - j)));
      i = e > i ? e - 1 : i;
    }
  }
  return m;
}

// exponent pairs (α, β) with |α| + |β| ≤ degree
void enumerate(int m, int degree, std::vector<std::pair<std::vector<int>, std::vector<int>>>& out) {
  std::vector<int> e(2 * m, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == 2 * m) {
      out.emplace_back(std::vector<int>(e.begin(), e.begin() + m), std::vector<int>(e.begin() + m, e.end()));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[pos] = k;
      rec(pos + 1, left - k);
    }
    e[pos] = 0;
  };
  rec(0, degree);
}

std::complex<double> eval_monomial(const Monomial& t, const CVec& z) {
  std::complex<double> v = t.coeff;
  for (std::size_t a = 0; a < t.zpow.size(); ++a) {
    if (t.zpow[a]) v *= ipow(z(a), t.zpow[a]);
    if (t.zbarpow[a]) v *= ipow(std::conj(z(a)), t.zbarpow[a]);
  }
  return v;
}

}  // namespace

CMat levi_form(const ScalarField& f, const CVec& z, double h) {
  h = step_for(f, z, h);
  const auto m = z.size();
  CMat L(m, m);
  const std::complex<double> I(0, 1);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a; b < m; ++b) {
      CVec ea = CVec::Zero(m), eb = CVec::Zero(m);
      ea(a) = 1;
      eb(b) = 1;
      const double xx = d2(f, z, ea, eb, h);
      const double yy = d2(f, z, I * ea, I * eb, h);
      const double xy = d2(f, z, ea, I * eb, h);
      const double yx = d2(f, z, I * ea, eb, h);
      L(a, b) = 0.25 * std::complex<double>(xx + yy, xy - yx);
      L(b, a) = std::conj(L(a, b));
    }
  }
  return L;
}

Jet field_jet(const ScalarField& f, const CVec& z, double h) {
  if (auto j = f.exact_jet(z)) return *j;
  const double hh = step_for(f, z, h);
  const auto m = z.size();
  Jet out;
  out.value = f.value(z);
  out.dz.resize(m);
  const std::complex<double> I(0, 1);
  for (Eigen::Index a = 0; a < m; ++a) {
    CVec e = CVec::Zero(m);
    e(a) = 1;
    out.dz(a) = 0.5 * std::complex<double>(d1(f, z, e, hh), -d1(f, z, I * e, hh));
  }
  out.levi = levi_form(f, z, hh);
  return out;
}

PolynomialPotential::PolynomialPotential(int m, std::vector<Monomial> terms, double radius)
    : m_(m), terms_(), radius_(radius) {
  if (m < 1) throw InvalidArgument("polynomial potential needs m ≥ 1");
  if (!(radius > 0)) throw InvalidArgument("domain radius must be positive");
  // merge duplicates, drop zeros
  std::map<std::pair<std::vector<int>, std::vector<int>>, std::complex<double>> acc;
  for (auto& t : terms) {
    if (static_cast<int>(t.zpow.size()) != m || static_cast<int>(t.zbarpow.size()) != m) {
      throw InvalidArgument("monomial exponent vectors must have length m");
    }
    acc[{t.zpow, t.zbarpow}] += t.coeff;
  }
  double scale = 0;
  for (auto& [k, c] : acc) scale = std::max(scale, std::abs(c));
  for (auto& [k, c] : acc) {
    auto it = acc.find({k.second, k.first});
    const std::complex<double> partner = it == acc.end() ? 0.0 : it->second;
    if (std::abs(c - std::conj(partner)) > 1e-12 * std::max(1.0, scale)) {
      throw InvalidArgument("potential is not real: the coefficient of the conjugate monomial must be the conjugate");
    }
    if (c != 0.0) terms_.push_back({k.first, k.second, c});
  }
}

PolynomialPotential PolynomialPotential::from_dictionary(const json& dict, int m, double radius) {
  if (!dict.is_object()) throw ParseError("potential dictionary must be a JSON object");
  if (m <= 0) m = max_index(dict);
  if (m <= 0) throw ParseError("cannot infer the dimension of the potential (no z variables)");
  std::vector<Monomial> terms;
  for (auto it = dict.begin(); it != dict.end(); ++it) {
    const std::string where = "/" + it.key();
    auto [a, b] = parse_key(it.key(), m, where);
    std::complex<double> c;
    if (it->is_number()) {
      c = it->get<double>();
    } else if (it->is_array() && it->size() == 2 && (*it)[0].is_number() && (*it)[1].is_number()) {
      c = {(*it)[0].get<double>(), (*it)[1].get<double>()};
    } else {
      throw ParseError("coefficient must be a number or [re, im]", where);
    }
    terms.push_back({a, b, c});
  }
  return PolynomialPotential(m, std::move(terms), radius);
}

PolynomialPotential PolynomialPotential::from_grid(int m, double R, int n, const std::vector<double>& values,
                                                   int degree) {
  if (m < 1 || n < 2 || !(R > 0) || degree < 0) throw InvalidArgument("bad grid potential parameters");
  const long N = static_cast<long>(std::pow(n, 2 * m));
  if (static_cast<long>(values.size()) != N) {
    throw InvalidArgument("grid potential needs n^(2m) = " + std::to_string(N) + " values, got " +
                          std::to_string(values.size()));
  }
  // real basis: Re and Im of z^α z̄^β for (α, β) < (β, α), and z^α z̄^α
  std::vector<std::pair<std::vector<int>, std::vector<int>>> all, basis;
  enumerate(m, degree, all);
  for (auto& k : all)
    if (k.first <= k.second) basis.push_back(k);
  std::vector<int> kind;  // 0: diagonal, 1: Re, 2: Im
  std::vector<std::size_t> owner;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].first == basis[i].second) {
      kind.push_back(0);
      owner.push_back(i);
    } else {
      kind.push_back(1);
      owner.push_back(i);
      kind.push_back(2);
      owner.push_back(i);
    }
  }
  Eigen::MatrixXd A(N, static_cast<Eigen::Index>(kind.size()));
  Eigen::VectorXd y(N);
  std::vector<int> idx(2 * m, 0);
  for (long row = 0; row < N; ++row) {
    long r = row;
    for (int d = 2 * m - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(r % n);
      r /= n;
    }
    CVec z(m);
    for (int a = 0; a < m; ++a) {
      const double x = -R + 2 * R * idx[2 * a] / (n - 1);
      const double yv = -R + 2 * R * idx[2 * a + 1] / (n - 1);
      z(a) = {x, yv};
    }
    for (std::size_t c = 0; c < kind.size(); ++c) {
      const auto& k = basis[owner[c]];
      const std::complex<double> v = eval_monomial({k.first, k.second, 1.0}, z);
      A(row, static_cast<Eigen::Index>(c)) = kind[c] == 2 ? v.imag() : v.real();
    }
    y(row) = values[static_cast<std::size_t>(row)];
  }
  Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
  std::vector<Monomial> terms;
  for (std::size_t c = 0; c < kind.size(); ++c) {
    const auto& k = basis[owner[c]];
    const double v = coef(static_cast<Eigen::Index>(c));
    if (kind[c] == 0) {
      terms.push_back({k.first, k.second, v});
    } else if (kind[c] == 1) {
      // A·Re(m) = 2Re(c m) with c = A/2; the partner gets conj(c)
      terms.push_back({k.first, k.second, v / 2});
      terms.push_back({k.second, k.first, v / 2});
    } else {
      terms.push_back({k.first, k.second, std::complex<double>(0, -v / 2)});
      terms.push_back({k.second, k.first, std::complex<double>(0, v / 2)});
    }
  }
  PolynomialPotential p(m, std::move(terms), std::sqrt(static_cast<double>(m)) * R);
  p.fit_residual_ = (A * coef - y).norm() / std::max(1e-300, y.norm());
  return p;
}

PolynomialPotential PolynomialPotential::from_json(const json& doc, int m, double radius) {
  if (doc.is_object() && doc.contains("grid")) {
    const json& g = doc.at("grid");
    try {
      const int gm = g.value("m", m);
      const int n = g.at("n").get<int>();
      const double R = g.at("radius").get<double>();
      const int degree = g.value("degree", 4);
      auto values = g.at("values").get<std::vector<double>>();
      PolynomialPotential p = from_grid(gm, R, n, values, degree);
      p.radius_ = R;
      return p;
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad grid potential: ") + e.what(), "/grid");
    }
  }
  if (doc.is_object() && doc.contains("monomials")) return from_dictionary(doc.at("monomials"), m, radius);
  return from_dictionary(doc, m, radius);
}

double PolynomialPotential::value(const CVec& z) const {
  std::complex<double> v = 0;
  for (const auto& t : terms_) v += eval_monomial(t, z);
  return v.real();
}

std::optional<Jet> PolynomialPotential::exact_jet(const CVec& z) const {
  Jet j = Jet::constant(0, m_);
  std::complex<double> v = 0;
  for (const auto& t : terms_) {
    v += eval_monomial(t, z);
    for (int a = 0; a < m_; ++a) {
      if (t.zpow[a] == 0) continue;
      Monomial da = t;
      da.coeff *= static_cast<double>(t.zpow[a]);
      da.zpow[a] -= 1;
      j.dz(a) += eval_monomial(da, z);
      for (int b = 0; b < m_; ++b) {
        if (da.zbarpow[b] == 0) continue;
        Monomial dab = da;
        dab.coeff *= static_cast<double>(da.zbarpow[b]);
        dab.zbarpow[b] -= 1;
        j.levi(a, b) += eval_monomial(dab, z);
      }
    }
  }
  j.value = v.real();
  return j;
}

json PolynomialPotential::to_dictionary() const {
  json d = json::object();
  for (const auto& t : terms_) {
    std::string key;
    for (int a = 0; a < m_; ++a) {
      if (t.zpow[a] == 0) continue;
      if (!key.empty()) key += " ";
      key += "z" + std::to_string(a + 1);
      if (t.zpow[a] > 1) key += "^" + std::to_string(t.zpow[a]);
    }
    for (int a = 0; a < m_; ++a) {
      if (t.zbarpow[a] == 0) continue;
      if (!key.empty()) key += " ";
      key += "zbar" + std::to_string(a + 1);
      if (t.zbarpow[a] > 1) key += "^" + std::to_string(t.zbarpow[a]);
    }
    if (key.empty()) key = "1";
    if (t.coeff.imag() == 0)
      d[key] = t.coeff.real();
    else
      d[key] = {t.coeff.real(), t.coeff.imag()};
  }
  return d;
}

namespace {
double S(double x) { return x * x * x * (10 - 15 * x + 6 * x * x); }
double S1(double x) { return 30 * x * x * (1 - x) * (1 - x); }
double S2(double x) { return 60 * x * (1 - x) * (1 - 2 * x); }
}  // namespace

double Cutoff::value(double x) const {
  if (x <= plateau) return 1;
  if (x >= support) return 0;
  return 1 - S((x - plateau) / (support - plateau));
}

double Cutoff::d1(double x) const {
  if (x <= plateau || x >= support) return 0;
  const double w = support - plateau;
  return -S1((x - plateau) / w) / w;
}

double Cutoff::d2(double x) const {
  if (x <= plateau || x >= support) return 0;
  const double w = support - plateau;
  return -S2((x - plateau) / w) / (w * w);
}

double Cutoff::sup_d1() const { return 1.875 / (support - plateau); }
double Cutoff::sup_d2() const { return 10.0 / std::sqrt(3.0) / ((support - plateau) * (support - plateau)); }

SampleSet stratified_samples(int m, double R, int shells, int per_shell, std::uint64_t seed) {
  if (m < 1 || shells < 1 || per_shell < 1 || !(R > 0)) throw InvalidArgument("bad sample-set parameters");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0, 1);
  SampleSet s;
  s.points.reserve(static_cast<std::size_t>(shells) * per_shell);
  for (int k = 0; k < shells; ++k) {
    const double hi = R * std::ldexp(1.0, -k);
    for (int i = 0; i < per_shell; ++i) {
      CVec z(m);
      for (int a = 0; a < m; ++a) z(a) = {nd(rng), nd(rng)};
      const double r = hi * std::exp2(-ud(rng));
      s.points.push_back(z * (r / z.norm()));
    }
  }
  return s;
}

}  // namespace conelab
