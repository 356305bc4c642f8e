#include "conelab/catalog.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "conelab/generators.hpp"

namespace conelab {

namespace {

const char* kBettiClaim = "Betti number condition: b_{n-2}(C^reg) = 0 or b_{n-1}(C^reg) = 0";
const char* kLocalClaim = "local cohomology condition: H^2_{X^sing}(X, Omega^{n-2}_X) = 0";

SimplicialComplex resolve_link(const std::string& link) {
  if (link.ends_with(".json") || std::filesystem::exists(link)) return load_mesh_file(link);
  return generate(link);
}

SingularityRecord odp(int n) {
  SingularityRecord r;
  r.name = "odp-" + std::to_string(n) + "fold";
  r.kind = SingularityKind::Odp;
  r.n = n;
  r.weights.assign(n + 1, 1);
  r.degree = 2;
  r.betti = BettiData{odp_regular_betti(n), std::string("Gysin sequence of the S^") + std::to_string(n - 1) +
                                                "-bundle over S^" + std::to_string(n) + " (Euler number " +
                                                (n % 2 == 0 ? "2" : "0") + ")"};
  r.note = "z_1^2 + ... + z_" + std::to_string(n + 1) + "^2 = 0";
  return r;
}

}  // namespace

std::string to_string(SingularityKind k) {
  switch (k) {
    case SingularityKind::WeightedHypersurface: return "weighted-homogeneous-hypersurface";
    case SingularityKind::ToricFanoCone: return "toric-fano-cone";
    case SingularityKind::Odp: return "odp";
    case SingularityKind::CustomLink: return "custom-link";
  }
  return "?";
}

SingularityKind parse_singularity_kind(const std::string& s) {
  for (auto k : {SingularityKind::WeightedHypersurface, SingularityKind::ToricFanoCone, SingularityKind::Odp,
                 SingularityKind::CustomLink})
    if (to_string(k) == s) return k;
  throw ParseError("unknown singularity kind '" + s + "'");
}

std::string to_string(HypothesisFlag f) {
  switch (f) {
    case HypothesisFlag::Satisfied: return "satisfied";
    case HypothesisFlag::Violated: return "violated";
    case HypothesisFlag::Unknown: return "unknown";
  }
  return "?";
}

Rational minimal_exponent(const std::vector<long>& w, long d) {
  if (w.empty()) throw InvalidArgument("minimal exponent needs at least one weight");
  if (d < 1) throw InvalidArgument("degree must be >= 1, got " + std::to_string(d));
  long g = 0, sum = 0;
  for (long x : w) {
    if (x < 1) throw InvalidArgument("weights must be positive integers, got " + std::to_string(x));
    g = std::gcd(g, x);
    sum += x;
  }
  if (g != 1) throw InvalidArgument("weights must have gcd 1, got gcd " + std::to_string(g));
  Rational a(sum, d);
  a.canonicalize();
  return a;
}

std::optional<int> du_bois_level(const Rational& alpha) {
  if (sgn(alpha) <= 0) throw InvalidArgument("minimal exponent must be positive");
  if (alpha < 1) return std::nullopt;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), alpha.get_num_mpz_t(), alpha.get_den_mpz_t());
  return static_cast<int>(fl.get_si()) - 1;
}

bool bott_vanishes(const BottQuery& q) {
  if (q.n < 1) throw InvalidArgument("projective dimension must be >= 1");
  if (q.p < 0 || q.p > q.n || q.q < 0 || q.q > q.n) {
    throw InvalidArgument("Bott query needs 0 <= p, q <= n");
  }
  const bool i = q.k == 0 && q.p == q.q;
  const bool ii = q.q == 0 && q.k > q.p;
  const bool iii = q.q == q.n && q.k < q.p - q.n;
  return !(i || ii || iii);
}

std::vector<long> odp_regular_betti(int n) {
  if (n < 1) throw InvalidArgument("ODP dimension must be >= 1");
  std::vector<long> b(2 * n, 0);
  b[0] = 1;
  b[2 * n - 1] += 1;
  if (n % 2 == 1) {
    b[n - 1] += 1;
    b[n] += 1;
  }
  return b;
}

BettiConditionVerdict betti_condition(const SingularityRecord& rec) {
  BettiConditionVerdict v;
  v.claim = kBettiClaim;
  if (rec.betti) {
    v.betti = rec.betti->values;
    v.source = rec.betti->provenance;
  } else if (!rec.link.empty()) {
    BettiVector b = betti(resolve_link(rec.link));
    v.betti = b.b;
    v.source = "mesh " + rec.link + (b.exact ? " (exact rank)" : " (floating rank)");
  } else {
    throw InvalidArgument("record '" + rec.name + "' has no Betti data; attach a link mesh");
  }
  if (static_cast<int>(v.betti.size()) != 2 * rec.n) {
    throw InvalidArgument("record '" + rec.name + "': link of a complex " + std::to_string(rec.n) +
                          "-dimensional cone has real dimension " + std::to_string(2 * rec.n - 1) +
                          ", Betti vector has length " + std::to_string(v.betti.size()));
  }
  v.hypothesis = check_betti_hypothesis(v.betti, rec.n);
  v.holds = v.hypothesis != BettiHypothesis::Fails;
  return v;
}

LocalCohomologyVerdict local_cohomology_condition(const SingularityRecord& rec) {
  LocalCohomologyVerdict v;
  if (rec.kind == SingularityKind::ToricFanoCone && rec.n >= 5) {
    v.flag = HypothesisFlag::Satisfied;
    v.claim = std::string(kLocalClaim) + "; holds for cones over toric Fano manifolds with n >= 5";
  } else if (rec.kind == SingularityKind::Odp && rec.n >= 3) {
    v.flag = HypothesisFlag::Violated;
    v.claim = std::string(kLocalClaim) + "; H^1(U - {vx}, Omega^{n-2}_C) is non-zero for ordinary double points";
    if (rec.n >= 4) {
      const int n = rec.n;
      v.evidence.push_back({{n, n - 1, 1, n - 3}, false});
      v.evidence.push_back({{n, n - 1, 0, n - 1}, false});
      for (int k = 0; k <= 3; ++k) {
        v.evidence.push_back({{n, 2, n - 1, k}, false});
        v.evidence.push_back({{n, 2, n, k - 2}, false});
      }
      for (auto& e : v.evidence) e.vanishes = bott_vanishes(e.query);
    }
  } else {
    v.flag = HypothesisFlag::Unknown;
    v.claim = std::string(kLocalClaim) + "; no covering result for this record";
  }
  return v;
}

json record_to_json(const SingularityRecord& rec) {
  json j;
  j["name"] = rec.name;
  j["kind"] = to_string(rec.kind);
  j["n"] = rec.n;
  if (!rec.weights.empty()) {
    j["weights"] = rec.weights;
    j["degree"] = rec.degree;
  }
  if (!rec.link.empty()) j["link"] = rec.link;
  if (rec.betti) j["betti"] = {{"values", rec.betti->values}, {"provenance", rec.betti->provenance}};
  if (!rec.note.empty()) j["note"] = rec.note;
  return j;
}

SingularityRecord record_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError("record must be an object", where);
  SingularityRecord r;
  try {
    r.name = j.at("name").get<std::string>();
    r.kind = parse_singularity_kind(j.at("kind").get<std::string>());
    r.n = j.at("n").get<int>();
    if (j.contains("weights")) {
      r.weights = j.at("weights").get<std::vector<long>>();
      r.degree = j.at("degree").get<long>();
      if (static_cast<int>(r.weights.size()) != r.n + 1) {
        throw ParseError("expected n+1 = " + std::to_string(r.n + 1) + " weights", where);
      }
      minimal_exponent(r.weights, r.degree);
    }
    if (j.contains("link")) r.link = j.at("link").get<std::string>();
    if (j.contains("betti")) {
      const json& b = j.at("betti");
      if (!b.contains("provenance")) throw ParseError("closed-form Betti entry needs a provenance field", where);
      r.betti = BettiData{b.at("values").get<std::vector<long>>(), b.at("provenance").get<std::string>()};
    }
    if (j.contains("note")) r.note = j.at("note").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(e.what(), where);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), where);
  }
  if (r.n < 1) throw ParseError("n must be >= 1", where);
  return r;
}

Catalog Catalog::builtin() {
  Catalog c;
  for (int n = 2; n <= 6; ++n) c.add(odp(n));

  SingularityRecord k3;
  k3.name = "quartic-k3-cone";
  k3.kind = SingularityKind::WeightedHypersurface;
  k3.n = 3;
  k3.weights = {1, 1, 1, 1};
  k3.degree = 4;
  k3.betti = BettiData{{1, 0, 21, 21, 0, 1}, "Gysin sequence of the circle bundle over a quartic K3 surface"};
  k3.note = "cone over a smooth quartic surface in P^3";
  c.add(k3);

  SingularityRecord e8;
  e8.name = "simple-elliptic-e8";
  e8.kind = SingularityKind::WeightedHypersurface;
  e8.n = 2;
  e8.weights = {1, 2, 3};
  e8.degree = 6;
  e8.betti = BettiData{{1, 2, 2, 1}, "Gysin sequence of a circle bundle of nonzero degree over an elliptic curve"};
  e8.note = "x^6 + y^3 + z^2 = 0";
  c.add(e8);

  SingularityRecord wq;
  wq.name = "weighted-quartic-1112";
  wq.kind = SingularityKind::WeightedHypersurface;
  wq.n = 3;
  wq.weights = {1, 1, 1, 2};
  wq.degree = 4;
  c.add(wq);

  SingularityRecord toric;
  toric.name = "toric-fano-p1x4";
  toric.kind = SingularityKind::ToricFanoCone;
  toric.n = 5;
  toric.betti = BettiData{{1, 0, 3, 0, 2, 2, 0, 3, 0, 1},
                          "Gysin sequence of the circle bundle of O(-1,-1,-1,-1) over (P^1)^4"};
  toric.note = "cone over (P^1)^4 anticanonically polarized by O(1,1,1,1)";
  c.add(toric);

  SingularityRecord t5;
  t5.name = "link-t5";
  t5.kind = SingularityKind::CustomLink;
  t5.n = 3;
  t5.betti = BettiData{{1, 5, 10, 10, 5, 1}, "Kunneth formula for (S^1)^5"};
  c.add(t5);

  SingularityRecord s2s3;
  s2s3.name = "link-s2xs3";
  s2s3.kind = SingularityKind::CustomLink;
  s2s3.n = 3;
  s2s3.betti = BettiData{{1, 0, 1, 1, 0, 1}, "Kunneth formula for S^2 x S^3"};
  c.add(s2s3);

  for (auto [name, link] : {std::pair{"link-s3", "sphere:3"}, {"link-t3", "torus:3:4"}, {"link-s2xs1", "s2xs1:1:8"}}) {
    SingularityRecord r;
    r.name = name;
    r.kind = SingularityKind::CustomLink;
    r.n = 2;
    r.link = link;
    c.add(r);
  }
  return c;
}

Catalog Catalog::from_json(const json& doc, const std::string& where) {
  if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array()) {
    throw ParseError("catalog must be an object with a \"records\" array", where);
  }
  Catalog c;
  for (std::size_t i = 0; i < doc["records"].size(); ++i) {
    c.add(record_from_json(doc["records"][i], where + "/records/" + std::to_string(i)));
  }
  return c;
}

Catalog Catalog::load(const std::string& path) { return from_json(read_json_file(path), path); }

json Catalog::to_json() const {
  json recs = json::array();
  for (const auto& r : records_) recs.push_back(record_to_json(r));
  return {{"records", recs}};
}

void Catalog::save(const std::string& path) const { write_json_file_atomic(path, to_json()); }

const SingularityRecord& Catalog::find(const std::string& name) const {
  for (const auto& r : records_)
    if (r.name == name) return r;
  throw InvalidArgument("no catalog record named '" + name + "'");
}

void Catalog::add(SingularityRecord rec) {
  if (std::any_of(records_.begin(), records_.end(), [&](const auto& r) { return r.name == rec.name; })) {
    throw InvalidArgument("duplicate catalog record '" + rec.name + "'");
  }
  records_.push_back(std::move(rec));
}

json check_record(const SingularityRecord& rec) {
  json out;
  out["record"] = record_to_json(rec);
  if (!rec.weights.empty()) {
    const Rational a = minimal_exponent(rec.weights, rec.degree);
    auto k = du_bois_level(a);
    out["minimal_exponent"] = to_string(a);
    out["du_bois_level"] = k ? json(*k) : json(nullptr);
  }
  if (rec.betti || !rec.link.empty()) {
    auto v = betti_condition(rec);
    out["betti_condition"] = {{"verdict", v.holds ? "PASS" : "FAIL"},
                              {"hypothesis", to_string(v.hypothesis)},
                              {"betti", v.betti},
                              {"source", v.source},
                              {"claim", v.claim}};
  } else {
    out["betti_condition"] = {{"verdict", "UNAVAILABLE"}, {"reason", "no Betti data; attach a link mesh"}};
  }
  auto lc = local_cohomology_condition(rec);
  json ev = json::array();
  for (const auto& e : lc.evidence) {
    ev.push_back({{"n", e.query.n}, {"p", e.query.p}, {"q", e.query.q}, {"k", e.query.k}, {"vanishes", e.vanishes}});
  }
  out["local_cohomology_condition"] = {{"flag", to_string(lc.flag)}, {"claim", lc.claim}, {"bott_evidence", ev}};
  return out;
}

}  // namespace conelab
