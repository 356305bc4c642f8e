#include <algorithm>
#include <cmath>
#include <limits>

#include "conelab/kahler.hpp"

namespace conelab {

namespace {

WeightData make_weights(std::vector<double> lambda, bool below_one) {
  if (lambda.empty()) throw InvalidArgument("weights must be non-empty");
  for (double l : lambda) {
    if (!(l > 0) || !std::isfinite(l)) throw InvalidArgument("weights must be positive");
    if (below_one && !(l < 1)) throw InvalidArgument("weights must lie in (0,1)");
  }
  WeightData w;
  w.alpha = *std::min_element(lambda.begin(), lambda.end());
  w.beta = *std::max_element(lambda.begin(), lambda.end());
  w.lambda = std::move(lambda);
  return w;
}

void check_point(const CVec& z, const WeightData& w) {
  if (z.size() != w.m()) throw InvalidArgument("point dimension does not match the number of weights");
  if (z.squaredNorm() == 0) throw InvalidArgument("weighted radius is undefined at the origin");
}

// Σ |z_a|² e^{−2λ_a s} − 1 and its s-derivative, evaluated in log space
struct Eq {
  std::vector<double> logabs2;
  const std::vector<double>* lam;
  std::pair<double, double> operator()(double s) const {
    double f = -1, fp = 0;
    for (std::size_t a = 0; a < logabs2.size(); ++a) {
      if (logabs2[a] == -std::numeric_limits<double>::infinity()) continue;
      const double t = std::exp(logabs2[a] - 2 * (*lam)[a] * s);
      f += t;
      fp -= 2 * (*lam)[a] * t;
    }
    return {f, fp};
  }
};

}  // namespace

WeightData WeightData::make(std::vector<double> lambda) { return make_weights(std::move(lambda), true); }
WeightData WeightData::make_positive(std::vector<double> lambda) { return make_weights(std::move(lambda), false); }

double weighted_radius(const CVec& z, const WeightData& w, double tol) {
  check_point(z, w);
  Eq eq;
  eq.lam = &w.lambda;
  for (Eigen::Index a = 0; a < z.size(); ++a) eq.logabs2.push_back(std::log(std::norm(z(a))));

  // F is decreasing and convex in s = log t; bracket, then Newton from the left
  double lo = 0, hi = 0;
  if (eq(0).first > 0) {
    double step = 1;
    hi = step;
    while (eq(hi).first > 0) {
      lo = hi;
      step *= 2;
      hi += step;
    }
  } else {
    double step = 1;
    lo = -step;
    while (eq(lo).first <= 0) {
      hi = lo;
      step *= 2;
      lo -= step;
    }
  }
  double s = lo;
  for (int it = 0; it < 200; ++it) {
    auto [f, fp] = eq(s);
    if (std::abs(f) < tol) break;
    if (f > 0)
      lo = s;
    else
      hi = s;
    double next = s - f / fp;
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    if (next == s) break;
    s = next;
  }
  return std::exp(s);
}

double weighted_radius_residual(const CVec& z, const WeightData& w, double r_lambda) {
  double f = -1;
  for (Eigen::Index a = 0; a < z.size(); ++a) f += std::norm(z(a)) * std::pow(r_lambda, -2 * w.lambda[a]);
  return f;
}

CVec weighted_flow(const CVec& z, const WeightData& w, double s) {
  CVec out = z;
  for (Eigen::Index a = 0; a < z.size(); ++a) out(a) *= std::exp(w.lambda[a] * s);
  return out;
}

Jet Jet::constant(double c, int m) { return {c, CVec::Zero(m), CMat::Zero(m, m)}; }

double Jet::levi_min() const {
  Eigen::SelfAdjointEigenSolver<CMat> es(levi, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double Jet::levi_max() const {
  Eigen::SelfAdjointEigenSolver<CMat> es(levi, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Jet operator+(const Jet& a, const Jet& b) { return {a.value + b.value, a.dz + b.dz, a.levi + b.levi}; }
Jet operator-(const Jet& a, const Jet& b) { return {a.value - b.value, a.dz - b.dz, a.levi - b.levi}; }
Jet operator*(double c, const Jet& a) { return {c * a.value, c * a.dz, c * a.levi}; }

Jet product(const Jet& a, const Jet& b) {
  Jet out;
  out.value = a.value * b.value;
  out.dz = a.value * b.dz + b.value * a.dz;
  out.levi = a.value * b.levi + b.value * a.levi + a.dz * b.dz.adjoint() + b.dz * a.dz.adjoint();
  return out;
}

Jet compose(double g0, double g1, double g2, const Jet& f) {
  return {g0, g1 * f.dz, g1 * f.levi + g2 * (f.dz * f.dz.adjoint())};
}

Jet radius_squared_jet(const CVec& z) {
  const auto m = z.size();
  return {z.squaredNorm(), z.conjugate(), CMat::Identity(m, m)};
}

Jet weighted_radius_squared_jet(const CVec& z, const WeightData& w) {
  const double t = weighted_radius(z, w);
  const auto m = z.size();
  Eigen::VectorXd wa(m), w1(m), w2(m);
  double Gt = 0, Gtt = 0;
  for (Eigen::Index a = 0; a < m; ++a) {
    const double l = w.lambda[a];
    wa(a) = std::pow(t, -2 * l);
    w1(a) = -2 * l * wa(a) / t;
    w2(a) = 2 * l * (2 * l + 1) * wa(a) / (t * t);
    Gt += std::norm(z(a)) * w1(a);
    Gtt += std::norm(z(a)) * w2(a);
  }
  // implicit differentiation of G(z, t) = Σ|z_a|² w_a(t) − 1 = 0
  CVec tz(m);
  for (Eigen::Index a = 0; a < m; ++a) tz(a) = -std::conj(z(a)) * wa(a) / Gt;
  CVec tzb = tz.conjugate();
  CMat tl(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      std::complex<double> s = (a == b ? wa(b) : 0.0) + z(b) * w1(b) * tz(a) + (std::conj(z(a)) * w1(a) + Gtt * tz(a)) * tzb(b);
      tl(a, b) = -s / Gt;
    }
  }
  Jet tj{t, tz, tl};
  return compose(t * t, 2 * t, 2, tj);
}

}  // namespace conelab
