#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "conelab/cone.hpp"

namespace conelab {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

double mass_norm(const DiscreteHodge& h, int k, const Vec& x) {
  if (x.size() == 0) return 0.0;
  return std::sqrt(std::max(0.0, h.inner(k, x, x)));
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::FlaggedBoundary: return "FLAGGED_BOUNDARY";
    case Verdict::Skipped: return "SKIPPED";
  }
  return "?";
}

IndicialDatum indicial_roots(double lambda, double m, int p) {
  IndicialDatum d;
  d.lambda = lambda;
  const double disc = m * m + lambda;
  const double s = std::sqrt(std::max(0.0, disc));
  d.alpha_root = m + s;
  d.beta_root = m - s;
  d.order_alpha = d.alpha_root - p;
  d.order_beta = d.beta_root - p;
  d.quarantined = disc < 0;
  return d;
}

ConeReport indicial_analysis(const ConeGeometry& g, int p, int K, const ConeOptions& opts) {
  if (K < 1) throw InvalidArgument("indicial analysis needs at least one mode");
  ConeReport r;
  r.l = g.l;
  r.p = p;
  r.m = 1.0 + p - g.l / 2.0;
  const double m2 = r.m * r.m;

  SymmetricPencil E = assemble_E(g, p);
  if (E.size() == 0) throw InvalidArgument("operator E is empty for p=" + std::to_string(p));
  EigenOptions eo = opts.eig;
  if (!eo.shift) eo.shift = -m2 - 0.5 * (1.0 + m2);
  r.spectrum = eigensolve(E, std::min<int>(K, static_cast<int>(E.size())), eo);
  r.spectrum.degree = p;
  if (K > E.size()) r.warnings.push_back("mode count capped at the cochain dimension " + std::to_string(E.size()));

  const Vec& lam = r.spectrum.eigenvalues;
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  const double tol = opts.cluster_tol * scale;
  std::vector<double> orders;
  r.nolog_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    IndicialDatum d = indicial_roots(lam(j), r.m, p);
    d.j = static_cast<int>(j);
    const double disc = m2 + lam(j);
    d.quarantined = disc < -tol;
    d.double_root = std::abs(disc) <= tol;
    if (d.quarantined) {
      r.warnings.push_back("mode " + std::to_string(j) + ": lambda=" + fmt(lam(j)) + " lies below -m^2=" + fmt(-m2) +
                           " (complex roots, discretization artifact); excluded from exceptional orders");
    } else {
      if (d.double_root) {
        r.warnings.push_back("mode " + std::to_string(j) + ": lambda=" + fmt(lam(j)) +
                             " within tolerance of -m^2; double root (log r term)");
      }
      orders.push_back(d.order_alpha);
      orders.push_back(d.order_beta);
    }
    const double gap = std::abs(disc);
    if (gap < r.nolog_gap) {
      r.nolog_gap = gap;
      r.nolog_argmin = static_cast<int>(j);
    }
    r.indicial.push_back(d);
  }
  std::sort(orders.begin(), orders.end());
  for (double o : orders) {
    if (!r.exceptional.empty() &&
        std::abs(o - r.exceptional.back().order) <= opts.cluster_tol * std::max(1.0, std::abs(o))) {
      ++r.exceptional.back().multiplicity;
    } else {
      r.exceptional.push_back({o, 1});
    }
  }
  if (lam.size() == E.size()) {
    r.complete_lo = -std::numeric_limits<double>::infinity();
    r.complete_hi = std::numeric_limits<double>::infinity();
  } else {
    const double top = lam(lam.size() - 1);
    const double s = std::sqrt(std::max(0.0, m2 + top));
    r.complete_lo = r.m - s - p;
    r.complete_hi = r.m + s - p;
  }
  return r;
}

NologResult nolog_verdict(const ConeReport& r, double gap_tol) {
  NologResult out;
  out.gap = r.nolog_gap;
  std::string where = r.nolog_argmin >= 0
                          ? " (mode " + std::to_string(r.nolog_argmin) + ", lambda=" +
                                fmt(r.spectrum.eigenvalues(r.nolog_argmin)) + ")"
                          : "";
  if (r.m == 0.0) {
    if (out.gap > gap_tol) {
      out.verdict = Verdict::Pass;
      out.note = "m=0 and min|lambda| = " + fmt(out.gap) + " > " + fmt(gap_tol);
    } else {
      out.verdict = Verdict::FlaggedBoundary;
      out.note = "m=0 boundary case: lambda=0 modes give the double root xi=0; reported as a flagged boundary, "
                 "not a pass (gap " + fmt(out.gap) + where + ")";
    }
    return out;
  }
  if (out.gap > gap_tol) {
    out.verdict = Verdict::Pass;
    out.note = "min_j |lambda_j + m^2| = " + fmt(out.gap) + " > " + fmt(gap_tol);
  } else {
    out.verdict = Verdict::Fail;
    out.note = "no eigenvalue of E may equal -m^2 = " + fmt(-r.m * r.m) + "; min_j |lambda_j + m^2| = " +
               fmt(out.gap) + where;
  }
  return out;
}

std::vector<WindowVerdict> classify_windows(const ConeReport& r, const ConeGeometry& g,
                                            const std::vector<long>& betti, const WindowOptions& opts) {
  const auto& h = *g.link;
  const int l = r.l, p = r.p;
  const double m2 = r.m * r.m;
  const Eigen::Index n1 = h.size(p - 1), n2 = h.size(p);
  const Vec& lam = r.spectrum.eigenvalues;
  std::vector<WindowVerdict> out;
  // block mass norm of a stacked (φ′; φ″)
  auto E_B = [&](const Vec& x) -> Vec {
    Vec y(x.size());
    if (n1) y.head(n1) = h.mass(p - 1) * x.head(n1);
    if (n2) y.tail(n2) = h.mass(p) * x.tail(n2);
    return y;
  };

  {
    WindowVerdict w;
    w.name = "lower-bound";
    w.claim = "every eigenvalue of E satisfies lambda_j >= -m^2";
    w.applicable = lam.size() > 0;
    const double lo = -m2 - opts.bound_slack * (1.0 + m2);
    const double mn = lam.size() ? lam.minCoeff() : 0.0;
    w.verdict = !w.applicable ? Verdict::Skipped : (mn >= lo ? Verdict::Pass : Verdict::Fail);
    w.detail = "lambda_min=" + fmt(mn) + ", allowed >= " + fmt(lo);
    out.push_back(w);
  }

  // orders strictly inside (lo, hi), ignoring endpoint cases
  auto inside = [&](double o, double lo, double hi) {
    return o > lo + opts.endpoint_tol * std::max(1.0, std::abs(lo)) &&
           o < hi - opts.endpoint_tol * std::max(1.0, std::abs(hi));
  };
  auto near = [&](double o, double x) { return std::abs(o - x) <= opts.endpoint_tol * std::max(1.0, std::abs(x)); };

  {
    WindowVerdict w;
    w.name = "relation-above-middle";
    w.claim = "p > l/2, order in (-p, p-l): harmonic forms satisfy d phi' = (2+p-l-alpha) phi''";
    w.lo = -p;
    w.hi = p - l;
    w.applicable = 2 * p > l;
    if (w.applicable) {
      int checked = 0;
      double worst = 0;
      for (const auto& d : r.indicial) {
        if (d.quarantined) continue;
        for (double o : {d.order_alpha, d.order_beta}) {
          if (!inside(o, w.lo, w.hi)) continue;
          Vec x = r.spectrum.eigenvectors.col(d.j);
          Vec a = x.head(n1), b = x.tail(n2);
          Vec da = h.apply_d(p - 1, a);
          const double c = 2.0 + p - l - o;
          const double res = mass_norm(h, p, da - c * b);
          const double nx = std::sqrt(x.dot(E_B(x)));
          const double ref = std::max(mass_norm(h, p, da) + std::abs(c) * mass_norm(h, p, b), nx);
          worst = std::max(worst, res / ref);
          ++checked;
        }
      }
      w.verdict = worst <= opts.relation_tol ? Verdict::Pass : Verdict::Fail;
      w.detail = std::to_string(checked) + " resolved orders in window; worst relative residual " + fmt(worst);
    }
    out.push_back(w);
  }

  auto vanishing = [&](const std::string& name, const std::string& claim, bool applies, double lo, double hi) {
    WindowVerdict w;
    w.name = name;
    w.claim = claim;
    w.lo = lo;
    w.hi = hi;
    w.applicable = applies;
    if (applies) {
      std::vector<double> bad, ends;
      for (const auto& e : r.exceptional) {
        if (inside(e.order, lo, hi)) bad.push_back(e.order);
        else if (near(e.order, lo) || near(e.order, hi)) ends.push_back(e.order);
      }
      w.verdict = bad.empty() ? Verdict::Pass : Verdict::Fail;
      std::ostringstream os;
      os << bad.size() << " exceptional orders strictly inside";
      for (double b : bad) os << ' ' << fmt(b);
      os << "; " << ends.size() << " at the endpoints";
      if (lo < r.complete_lo || hi > r.complete_hi) os << "; window extends past the resolved range";
      w.detail = os.str();
    }
    out.push_back(w);
  };
  vanishing("vanishing-window-upper", "p > l/2+1: no nonzero harmonic p-form has order in (2-p, p-l)", 2 * p > l + 2,
            2.0 - p, p - l);
  vanishing("vanishing-window-lower", "p < l/2-1: no nonzero harmonic p-form has order in (2+p-l, -p)", 2 * p < l - 2,
            2.0 + p - l, -p);

  {
    WindowVerdict w;
    w.name = "order-minus-p-closed";
    w.claim = "p <= l/2-1: order -p harmonic p-forms have phi'=0 and are closed and coclosed";
    w.applicable = 2 * p <= l - 2;
    if (w.applicable) {
      int zeros = 0;
      double worst_prime = 0, worst_d = 0, worst_dstar = 0;
      for (const auto& d : r.indicial) {
        if (std::abs(d.lambda) > 1e-6 * std::max(1.0, std::abs(lam(lam.size() - 1)))) continue;
        ++zeros;
        Vec x = r.spectrum.eigenvectors.col(d.j);
        Vec a = x.head(n1), b = x.tail(n2);
        const double nx = std::sqrt(mass_norm(h, p - 1, a) * mass_norm(h, p - 1, a) + mass_norm(h, p, b) * mass_norm(h, p, b));
        const double nb = mass_norm(h, p, b) + 1e-300;
        worst_prime = std::max(worst_prime, mass_norm(h, p - 1, a) / nx);
        worst_d = std::max(worst_d, mass_norm(h, p + 1, h.apply_d(p, b)) / nb);
        worst_dstar = std::max(worst_dstar, mass_norm(h, p - 1, h.codifferential(p, b)) / nb);
      }
      const double worst = std::max({worst_prime, worst_d, worst_dstar});
      w.verdict = worst <= opts.relation_tol ? Verdict::Pass : Verdict::Fail;
      w.detail = std::to_string(zeros) + " lambda=0 modes; max |phi'|/|phi|=" + fmt(worst_prime) +
                 ", max |d phi''|/|phi''|=" + fmt(worst_d) + ", max |d* phi''|/|phi''|=" + fmt(worst_dstar);
    }
    out.push_back(w);
  }

  {
    WindowVerdict w;
    w.name = "order-2+p-l-vanishes";
    w.claim = "p <= l/2-1 and b_p = 0: no nonzero harmonic p-form has order 2+p-l";
    const bool betti_ok = p >= 0 && p < static_cast<int>(betti.size());
    w.applicable = 2 * p <= l - 2 && betti_ok && betti[p] == 0;
    w.lo = w.hi = 2.0 + p - l;
    if (w.applicable) {
      int hits = 0;
      for (const auto& e : r.exceptional)
        if (near(e.order, w.lo)) hits += e.multiplicity;
      w.verdict = hits == 0 ? Verdict::Pass : Verdict::Fail;
      w.detail = std::to_string(hits) + " resolved orders equal to " + fmt(w.lo);
    } else if (2 * p <= l - 2) {
      w.detail = betti_ok ? "b_p = " + std::to_string(betti[p]) + " != 0; hypothesis fails" : "no Betti data for degree p";
    }
    out.push_back(w);
  }
  return out;
}

std::vector<FredholmWindow> fredholm_windows(const ConeReport& r, double a, double b) {
  if (!(a < b)) throw InvalidArgument("weight interval must satisfy a < b");
  if (!(r.complete_lo < a && b < r.complete_hi)) {
    throw InvalidArgument("insufficient spectral coverage: resolved orders are complete only on (" + fmt(r.complete_lo) +
                          ", " + fmt(r.complete_hi) + "), which does not contain [" + fmt(a) + ", " + fmt(b) +
                          "]; increase the mode count");
  }
  std::vector<double> cuts;
  for (const auto& e : r.exceptional)
    if (e.order >= a && e.order <= b) cuts.push_back(e.order);
  std::vector<FredholmWindow> out;
  const std::string note =
      "no exceptional order inside: the weighted Laplacian is Fredholm for every weight here and its kernel does not "
      "change across the window";
  double prev = a;
  for (double c : cuts) {
    if (c > prev) out.push_back({prev, c, note});
    prev = std::max(prev, c);
  }
  if (b > prev) out.push_back({prev, b, note});
  return out;
}

Diagonalization check_diagonalization(double beta, int l, int p) {
  using LD = long double;
  const LD B = beta;
  const LD a = B + l - 2 - 2 * p;
  const LD det = -(a + B);
  if (std::abs(static_cast<double>(det)) <= 1e-12 * (1.0 + std::abs(static_cast<double>(a)) + std::abs(beta))) {
    throw InvalidArgument("P is singular: 2*beta = 2+2p-l (beta equals m)");
  }
  const LD M[2][2] = {{B * a, 2 * B * a}, {2, (B - 2) * (a + 2) + 4}};
  const LD P[2][2] = {{a, B}, {1, -1}};
  const LD D[2][2] = {{B * (a + 2), 0}, {0, (B - 2) * a}};
  const LD Pi[2][2] = {{P[1][1] / det, -P[0][1] / det}, {-P[1][0] / det, P[0][0] / det}};
  LD MP[2][2], R[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) MP[i][j] = M[i][0] * P[0][j] + M[i][1] * P[1][j];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) R[i][j] = Pi[i][0] * MP[0][j] + Pi[i][1] * MP[1][j] - D[i][j];
  Diagonalization out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      out.M(i, j) = static_cast<double>(M[i][j]);
      out.P(i, j) = static_cast<double>(P[i][j]);
      out.D(i, j) = static_cast<double>(D[i][j]);
    }
  out.residual = static_cast<double>(std::max(std::abs(R[0][0]) + std::abs(R[0][1]), std::abs(R[1][0]) + std::abs(R[1][1])));
  return out;
}

}  // namespace conelab
