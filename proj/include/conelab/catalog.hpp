#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conelab/io.hpp"
#include "conelab/mesh.hpp"
#include "conelab/rational.hpp"

namespace conelab {

enum class SingularityKind { WeightedHypersurface, ToricFanoCone, Odp, CustomLink };

std::string to_string(SingularityKind k);
SingularityKind parse_singularity_kind(const std::string& s);

struct BettiData {
  std::vector<long> values;
  std::string provenance;  ///< "mesh <spec>" or the closed-form argument
};

struct SingularityRecord {
  std::string name;
  SingularityKind kind = SingularityKind::CustomLink;
  int n = 0;  ///< complex dimension of the cone
  std::vector<long> weights;
  long degree = 0;
  std::string link;  ///< generator spec ("torus:3:4") or mesh file path
  std::optional<BettiData> betti;
  std::string note;
};

/// α = (w₁+⋯+w_{n+1})/d. Throws InvalidArgument unless w_i ≥ 1, d ≥ 1 and gcd(w) = 1.
Rational minimal_exponent(const std::vector<long>& w, long d);

/// Largest k ≥ 0 with α ≥ k+1; nullopt when α < 1.
std::optional<int> du_bois_level(const Rational& alpha);

struct BottQuery {
  int n = 1;
  int p = 0;
  int q = 0;
  int k = 0;
};

/// True when H^q(ℙⁿ, Ωᵖ(k)) = 0 is guaranteed: none of (k = 0, p = q),
/// (q = 0, k > p), (q = n, k < p − n) holds.
bool bott_vanishes(const BottQuery& q);

/// Rational Betti numbers of the regular part of z₁²+⋯+z_{n+1}² = 0, an
/// S^{n−1}-bundle over Sⁿ with Euler number 2 (n even) or 0 (n odd).
std::vector<long> odp_regular_betti(int n);

struct BettiConditionVerdict {
  BettiHypothesis hypothesis = BettiHypothesis::Fails;
  bool holds = false;
  std::vector<long> betti;
  std::string source;
  std::string claim;
};

/// Betti data of the record, or of its link mesh when none is stored, checked
/// against b_{n−2} = 0 or b_{n−1} = 0. Throws InvalidArgument when there is neither.
BettiConditionVerdict betti_condition(const SingularityRecord& rec);

enum class HypothesisFlag { Satisfied, Violated, Unknown };
std::string to_string(HypothesisFlag f);

struct BottEvidence {
  BottQuery query;
  bool vanishes = false;
};

struct LocalCohomologyVerdict {
  HypothesisFlag flag = HypothesisFlag::Unknown;
  std::string claim;
  std::vector<BottEvidence> evidence;
};

/// Lookup of H²_{sing}(X, Ω^{n−2}) = 0 for the two settled families: toric Fano
/// cones with n ≥ 5 (satisfied) and ordinary double points with n ≥ 3 (violated).
LocalCohomologyVerdict local_cohomology_condition(const SingularityRecord& rec);

json record_to_json(const SingularityRecord& rec);
SingularityRecord record_from_json(const json& j, const std::string& where = "record");

class Catalog {
 public:
  static Catalog builtin();
  static Catalog from_json(const json& doc, const std::string& where = "catalog");
  static Catalog load(const std::string& path);

  json to_json() const;
  void save(const std::string& path) const;

  const std::vector<SingularityRecord>& records() const { return records_; }
  const SingularityRecord& find(const std::string& name) const;
  void add(SingularityRecord rec);

 private:
  std::vector<SingularityRecord> records_;
};

/// Full check of one record: α and Du Bois level when weights are present, the
/// Betti condition when Betti data can be obtained, and the local cohomology flag.
json check_record(const SingularityRecord& rec);

}  // namespace conelab
