#include <cmath>
#include <cstdio>
#include <sstream>

#include "conelab/report.hpp"

namespace conelab {

namespace {

// ±inf and NaN have no JSON literal
json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json vec(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

json toolkit_json() { return {{"name", "conelab"}, {"version", kToolkitVersion}}; }

json spectrum_to_json(const SpectrumSlice& s, const NearZero& nz) {
  json j;
  j["degree"] = s.degree;
  j["eigenvalues"] = vec(s.eigenvalues);
  j["residuals"] = vec(s.residuals);
  j["near_zero_count"] = nz.count;
  j["near_zero"] = {{"threshold", num(nz.threshold)}, {"gap_ratio", num(nz.gap_ratio)}, {"gap_ok", nz.gap_ok}};
  if (!nz.warning.empty()) j["near_zero"]["warning"] = nz.warning;
  j["solver"] = {{"method", s.solver.method},
                 {"tol", s.solver.tol},
                 {"iterations", s.solver.iterations},
                 {"basis_dim", s.solver.basis_dim},
                 {"shift", num(s.solver.shift)},
                 {"shift_retries", s.solver.shift_retries}};
  return j;
}

json cone_report_to_json(const ConeReport& r) {
  json j;
  j["l"] = r.l;
  j["p"] = r.p;
  j["m"] = r.m;
  j["eigenvalues"] = vec(r.spectrum.eigenvalues);
  j["residuals"] = vec(r.spectrum.residuals);
  json ind = json::array();
  for (const auto& d : r.indicial) {
    ind.push_back({{"j", d.j},
                   {"lambda", num(d.lambda)},
                   {"alpha_root", num(d.alpha_root)},
                   {"beta_root", num(d.beta_root)},
                   {"order_alpha", num(d.order_alpha)},
                   {"order_beta", num(d.order_beta)},
                   {"quarantined", d.quarantined},
                   {"double_root", d.double_root}});
  }
  j["indicial"] = ind;
  json ex = json::array();
  for (const auto& e : r.exceptional) ex.push_back({{"order", num(e.order)}, {"multiplicity", e.multiplicity}});
  j["exceptional"] = ex;
  j["nolog_gap"] = num(r.nolog_gap);
  j["nolog_argmin"] = r.nolog_argmin;
  j["complete_range"] = {num(r.complete_lo), num(r.complete_hi)};
  j["solver"] = {{"method", r.spectrum.solver.method},
                 {"tol", r.spectrum.solver.tol},
                 {"iterations", r.spectrum.solver.iterations},
                 {"shift", num(r.spectrum.solver.shift)},
                 {"shift_retries", r.spectrum.solver.shift_retries}};
  j["warnings"] = r.warnings;
  return j;
}

json nolog_to_json(const NologResult& v, const ConeReport& r) {
  return {{"verdict", to_string(v.verdict)},
          {"gap", num(v.gap)},
          {"m", r.m},
          {"claim", "no eigenvalue of the link operator E equals -m^2 (no log r terms)"},
          {"note", v.note}};
}

json windows_to_json(const std::vector<WindowVerdict>& w) {
  json a = json::array();
  for (const auto& v : w) {
    json j{{"name", v.name}, {"claim", v.claim}, {"applicable", v.applicable}, {"verdict", to_string(v.verdict)}};
    if (v.lo != 0 || v.hi != 0) j["window"] = {num(v.lo), num(v.hi)};
    j["detail"] = v.detail;
    a.push_back(j);
  }
  return a;
}

std::string cone_report_csv(const ConeReport& r) {
  std::ostringstream out;
  out << "j,lambda,alpha_root,beta_root,order_alpha,order_beta,quarantined,double_root\n";
  for (const auto& d : r.indicial) {
    out << d.j << ',' << g17(d.lambda) << ',' << g17(d.alpha_root) << ',' << g17(d.beta_root) << ','
        << g17(d.order_alpha) << ',' << g17(d.order_beta) << ',' << (d.quarantined ? 1 : 0) << ','
        << (d.double_root ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace conelab
