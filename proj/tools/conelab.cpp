#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "conelab/artin.hpp"
#include "conelab/catalog.hpp"
#include "conelab/cone.hpp"
#include "conelab/generators.hpp"
#include "conelab/kahler.hpp"
#include "conelab/parallel.hpp"
#include "conelab/report.hpp"

using namespace conelab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFail = 2;

struct LinkSource {
  std::string mesh;
  std::string gen;

  void add_to(CLI::App* cmd) {
    auto* m = cmd->add_option("--mesh", mesh, "mesh JSON file");
    auto* g = cmd->add_option("--gen", gen, "generator spec, e.g. torus:3:8");
    m->excludes(g);
  }
  SimplicialComplex load() const {
    if (!mesh.empty()) return load_mesh_file(mesh);
    if (!gen.empty()) return generate(gen);
    throw InvalidArgument("one of --mesh or --gen is required");
  }
  json config() const { return mesh.empty() ? json{{"gen", gen}} : json{{"mesh", mesh}}; }
};

void emit(const json& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    write_json_file_atomic(out, doc);
  }
}

void emit_text(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  const std::string tmp = out + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp);
    f << text;
  }
  std::filesystem::rename(tmp, out);
}

json envelope(const std::string& command, json config, json report) {
  return {{"toolkit", toolkit_json()}, {"command", command}, {"config", std::move(config)}, {"report", std::move(report)}};
}

Catalog open_catalog(const std::string& registry) {
  if (!registry.empty()) return Catalog::load(registry);
  if (std::filesystem::exists("catalog.json")) return Catalog::load("catalog.json");
  return Catalog::builtin();
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads_from_env();
  CLI::App app{"conelab: cone-link spectra, indicial roots, gluing and Artin algebra checks"};
  app.require_subcommand(1);

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "Hodge Laplacian spectrum of a mesh in one degree");
  LinkSource sp_src;
  sp_src.add_to(spectrum);
  int sp_degree = 0, sp_modes = 10;
  double sp_tol = 1e-8;
  std::string sp_star = "whitney", sp_out;
  spectrum->add_option("--degree", sp_degree, "form degree p")->required();
  spectrum->add_option("--modes", sp_modes, "number of eigenpairs K")->check(CLI::PositiveNumber);
  spectrum->add_option("--tol", sp_tol, "relative residual tolerance")->check(CLI::PositiveNumber);
  spectrum->add_option("--star", sp_star, "whitney or lumped");
  spectrum->add_option("--out", sp_out, "output path (stdout when omitted)");

  // indicial
  auto* indicial = app.add_subcommand("indicial", "indicial roots and order windows on the cone over a link");
  LinkSource in_src;
  in_src.add_to(indicial);
  int in_l = 0, in_degree = 0, in_modes = 40;
  double in_gap = 0.1, in_tol = 1e-8;
  std::string in_out, in_format = "json";
  indicial->add_option("--cone-dim", in_l, "cone dimension l = link dimension + 1")->required();
  indicial->add_option("--degree", in_degree, "form degree p")->required();
  indicial->add_option("--modes", in_modes, "number of link modes K")->check(CLI::PositiveNumber);
  indicial->add_option("--gap", in_gap, "no-log gap threshold")->check(CLI::PositiveNumber);
  indicial->add_option("--tol", in_tol, "eigen residual tolerance")->check(CLI::PositiveNumber);
  indicial->add_option("--format", in_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  indicial->add_option("--out", in_out, "output path (stdout when omitted)");

  // check-cone
  auto* check = app.add_subcommand("check-cone", "hypothesis checks for a catalog record or a link mesh");
  std::string ck_record, ck_registry, ck_out;
  LinkSource ck_src;
  ck_src.add_to(check);
  int ck_n = 0;
  check->add_option("--record", ck_record, "catalog record name");
  check->add_option("--registry", ck_registry, "catalog file (default ./catalog.json, else built-in)");
  check->add_option("--n", ck_n, "complex dimension of the cone when checking a mesh");
  check->add_option("--out", ck_out, "output path");

  // glue
  auto* glue = app.add_subcommand("glue", "glue a plurisubharmonic potential to eps r_lambda^2 near the origin");
  std::vector<double> gl_weights;
  std::string gl_potential, gl_out;
  double gl_radius = 1.0;
  GlueOptions gl_opts;
  bool gl_serial = false;
  glue->add_option("--weights", gl_weights, "weights lambda_a in (0,1)")->delimiter(',')->required();
  glue->add_option("--potential", gl_potential, "potential JSON (monomial dictionary or grid)")->required();
  glue->add_option("--radius", gl_radius, "domain radius of the potential")->check(CLI::PositiveNumber);
  glue->add_option("--shells", gl_opts.shells, "dyadic sample shells")->check(CLI::PositiveNumber);
  glue->add_option("--per-shell", gl_opts.per_shell, "samples per shell")->check(CLI::PositiveNumber);
  glue->add_option("--seed", gl_opts.seed, "sample seed");
  glue->add_flag("--serial", gl_serial, "use the serial reference sweep");
  glue->add_option("--out", gl_out, "output path");

  // catalog
  auto* catalog = app.add_subcommand("catalog", "singularity catalog: list, show, check, export");
  std::string ca_action, ca_name, ca_registry, ca_out;
  catalog->add_option("action", ca_action, "list | show | check | export")
      ->required()
      ->check(CLI::IsMember({"list", "show", "check", "export"}));
  catalog->add_option("--name", ca_name, "record name");
  catalog->add_option("--registry", ca_registry, "catalog file (default ./catalog.json, else built-in)");
  catalog->add_option("--out", ca_out, "output path");

  // artin-check
  auto* artin = app.add_subcommand("artin-check", "exact Artin algebra and module reflexivity suite");
  int ar_k = 4, ar_trials = 500, ar_rank = 8;
  std::uint64_t ar_seed = 7;
  std::string ar_out;
  artin->add_option("--k", ar_k, "largest truncation degree")->check(CLI::Range(1, 12));
  artin->add_option("--trials", ar_trials, "random modules")->check(CLI::NonNegativeNumber);
  artin->add_option("--max-rank", ar_rank, "largest module rank")->check(CLI::PositiveNumber);
  artin->add_option("--seed", ar_seed, "module seed");
  artin->add_option("--out", ar_out, "output path");

  // mesh-gen
  auto* meshgen = app.add_subcommand("mesh-gen", "write a generated mesh as JSON");
  std::string mg_spec, mg_out;
  meshgen->add_option("--spec", mg_spec, "sphere:<n> | icosphere:<level> | torus:<d>:<N> | circle:<N> | s2xs1:<level>:<N>")
      ->required();
  meshgen->add_option("--out", mg_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*spectrum) {
      auto complex = sp_src.load();
      DiscreteHodge h = DiscreteHodge::build(complex, parse_star(sp_star));
      EigenOptions eo;
      eo.tol = sp_tol;
      SpectrumSlice s = eigensolve(laplacian(h, sp_degree), sp_modes, eo);
      s.degree = sp_degree;
      json cfg = sp_src.config();
      cfg["degree"] = sp_degree;
      cfg["modes"] = sp_modes;
      cfg["tol"] = sp_tol;
      cfg["star"] = sp_star;
      emit(envelope("spectrum", cfg, spectrum_to_json(s, count_near_zero(s))), sp_out);
      return kExitOk;
    }
    if (*indicial) {
      auto complex = in_src.load();
      auto h = std::make_shared<const DiscreteHodge>(DiscreteHodge::build(complex));
      ConeGeometry g = ConeGeometry::over(h, in_l);
      ConeOptions co;
      co.eig.tol = in_tol;
      ConeReport r = indicial_analysis(g, in_degree, in_modes, co);
      NologResult nl = nolog_verdict(r, in_gap);
      auto windows = classify_windows(r, g, betti(complex).b);
      bool failed = nl.verdict == Verdict::Fail;
      for (const auto& w : windows) failed = failed || w.verdict == Verdict::Fail;
      if (in_format == "csv") {
        emit_text(cone_report_csv(r), in_out);
      } else {
        json cfg = in_src.config();
        cfg["cone_dim"] = in_l;
        cfg["degree"] = in_degree;
        cfg["modes"] = in_modes;
        cfg["gap"] = in_gap;
        cfg["tol"] = in_tol;
        json rep = cone_report_to_json(r);
        rep["nolog"] = nolog_to_json(nl, r);
        rep["windows"] = windows_to_json(windows);
        rep["verdict"] = failed ? "FAIL" : "PASS";
        emit(envelope("indicial", cfg, rep), in_out);
      }
      return failed ? kExitFail : kExitOk;
    }
    if (*check) {
      SingularityRecord rec;
      json cfg;
      if (!ck_record.empty()) {
        rec = open_catalog(ck_registry).find(ck_record);
        cfg["record"] = ck_record;
      } else {
        if (ck_n < 2) throw InvalidArgument("checking a mesh needs --n >= 2");
        rec.name = ck_src.mesh.empty() ? ck_src.gen : ck_src.mesh;
        rec.kind = SingularityKind::CustomLink;
        rec.n = ck_n;
        rec.link = rec.name;
        cfg = ck_src.config();
        cfg["n"] = ck_n;
      }
      json rep = check_record(rec);
      emit(envelope("check-cone", cfg, rep), ck_out);
      return rep["betti_condition"].value("verdict", "") == "FAIL" ? kExitFail : kExitOk;
    }
    if (*glue) {
      GluingProblem prob;
      prob.weights = WeightData::make(gl_weights);
      prob.potential = std::make_shared<PolynomialPotential>(
          PolynomialPotential::from_json(read_json_file(gl_potential), prob.weights.m(), gl_radius));
      gl_opts.exec = gl_serial ? Exec::Serial : Exec::Parallel;
      json cfg{{"weights", gl_weights},  {"potential", gl_potential},   {"radius", gl_radius},
               {"shells", gl_opts.shells}, {"per_shell", gl_opts.per_shell}, {"seed", gl_opts.seed}};
      try {
        GlueResult r = glue_potential(prob, gl_opts);
        emit(envelope("glue", cfg, glue_report_json(prob, r)), gl_out);
        return r.pass() ? kExitOk : kExitFail;
      } catch (const GlueError& e) {
        json rep = glue_report_json(prob, e.partial());
        rep["verdict"] = "FAIL";
        rep["error"] = e.what();
        emit(envelope("glue", cfg, rep), gl_out);
        std::cerr << "conelab: glue: " << e.what() << '\n';
        return kExitFail;
      }
    }
    if (*catalog) {
      Catalog c = open_catalog(ca_registry);
      if (ca_action == "list") {
        for (const auto& r : c.records()) std::cout << r.name << '\t' << to_string(r.kind) << "\tn=" << r.n << '\n';
        return kExitOk;
      }
      if (ca_action == "export") {
        emit(Catalog::builtin().to_json(), ca_out);
        return kExitOk;
      }
      if (ca_name.empty()) throw InvalidArgument("catalog " + ca_action + " needs --name");
      const SingularityRecord& rec = c.find(ca_name);
      if (ca_action == "show") {
        emit(record_to_json(rec), ca_out);
        return kExitOk;
      }
      json rep = check_record(rec);
      emit(envelope("catalog check", {{"name", ca_name}}, rep), ca_out);
      return rep["betti_condition"].value("verdict", "") == "FAIL" ? kExitFail : kExitOk;
    }
    if (*artin) {
      json rep;
      bool ok = true;
      json iso = json::array(), squares = json::array();
      for (int k = 1; k <= ar_k; ++k) {
        ArtinAlgebra a = truncated_poly(k);
        auto s = small_extension_isomorphism(a, a.basis(k));
        iso.push_back({{"k", k}, {"dim_left", s.left.algebra.dim()}, {"verified", s.verified}});
        ok = ok && s.verified;
        LiftMaps L = lift_maps(k);
        bool sq = L.pi.is_homomorphism() && L.theta.is_homomorphism() && L.varpi.is_homomorphism();
        if (k >= 2) {
          LiftMaps low = lift_maps(k - 1);
          sq = sq && same_map(compose(low.varpi, L.theta), compose(low.theta, L.pi));
        }
        squares.push_back({{"k", k}, {"commutes", sq}});
        ok = ok && sq;
      }
      std::mt19937_64 rng(ar_seed);
      int reflexive = 0;
      json failures = json::array();
      for (int t = 0; t < ar_trials; ++t) {
        FiniteModule m = random_truncated_module(t % (ar_k + 1), ar_rank, rng);
        ReflexivityReport rr = reflexivity_check(m);
        if (rr.reflexive) {
          ++reflexive;
        } else {
          failures.push_back({{"trial", t}, {"module", m.to_json()}});
        }
      }
      ok = ok && reflexive == ar_trials;
      rep["fiber_product_isomorphism"] = iso;
      rep["lift_squares"] = squares;
      rep["reflexivity"] = {{"trials", ar_trials},
                            {"reflexive", reflexive},
                            {"claim", "finitely generated modules over C[t]/(t^{k+1}) are reflexive"},
                            {"failures", failures}};
      rep["verdict"] = ok ? "PASS" : "FAIL";
      emit(envelope("artin-check", {{"k", ar_k}, {"trials", ar_trials}, {"max_rank", ar_rank}, {"seed", ar_seed}}, rep),
           ar_out);
      return ok ? kExitOk : kExitFail;
    }
    if (*meshgen) {
      emit(mesh_to_json(generate(mg_spec)), mg_out);
      return kExitOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "conelab: parse error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "conelab: error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
