// Command-line front end: batch construction, verification, and comparison
// of minimal Stinespring representations from instance files.
//
// Exit codes: 0 success, 1 input/parse error, 2 mathematical failure.

#include "stinespring/stinespring.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace ss = stinespring;

namespace {

void add_tolerance_flags(CLI::App* cmd, ss::TolerancePolicy& tol) {
  cmd->add_option("--atol", tol.atol, "absolute residual tolerance")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--rank-rtol", tol.rank_rtol, "relative singular-value cutoff for ranks")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--psd-rtol", tol.psd_rtol, "relative eigenvalue slack for positivity")
      ->check(CLI::NonNegativeNumber);
}

void emit(const ss::io::Json& report, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    ss::io::save_json(out_path, report);
  }
}

ss::io::Json check_report(const ss::PhiMap& Phi, const ss::CpVerdict& cp,
                          const ss::PhiMapCheck& phi_check, const ss::TolerancePolicy& tol) {
  ss::io::Json report;
  report["dimensions"] = {{"n", Phi.module.algebra.n},
                          {"k", Phi.module.k},
                          {"h1_dim", Phi.phi.h1_dim},
                          {"h2_dim", Phi.h2_dim},
                          {"choi_rank", ss::choi_rank(Phi.phi, tol)}};
  report["completely_positive"] = ss::io::cp_verdict_json(cp);
  report["phi_map"] = ss::io::phi_check_json(phi_check);
  report["verdict"] = cp.completely_positive && phi_check.verdict;
  return report;
}

int cmd_check(const std::string& instance_path, const std::string& out_path, bool human,
              const ss::TolerancePolicy& tol) {
  const ss::PhiMap Phi = ss::io::load_instance(instance_path);
  const ss::CpVerdict cp = ss::is_completely_positive(Phi.phi, tol);
  const ss::PhiMapCheck phi_check = ss::verify_phi_map(Phi, tol);
  emit(check_report(Phi, cp, phi_check, tol), out_path);
  if (human) {
    std::cout << (cp.completely_positive ? "[PASS] " : "[FAIL] ")
              << "phi is completely positive (min Choi eigenvalue " << cp.min_eigenvalue << ")\n"
              << (phi_check.verdict ? "[PASS] " : "[FAIL] ")
              << "Phi is a phi-map (max residual " << phi_check.max_residual << ")\n";
  }
  return (cp.completely_positive && phi_check.verdict) ? 0 : 2;
}

int cmd_dilate(const std::string& instance_path, const std::string& out_path, bool human,
               const ss::TolerancePolicy& tol) {
  const ss::PhiMap Phi = ss::io::load_instance(instance_path);
  const ss::CpVerdict cp = ss::is_completely_positive(Phi.phi, tol);
  if (!cp.completely_positive) {
    throw ss::Error(ss::ErrorCode::NotCompletelyPositive,
                    "dilate: min Choi eigenvalue " + std::to_string(cp.min_eigenvalue));
  }
  const ss::StinespringRep rep = ss::minimal_stinespring(Phi.phi, tol);
  const ss::ModuleRep module_rep = ss::induce_module_rep(Phi, rep, tol);
  const ss::RepresentationPair pair{rep, module_rep};
  const ss::RepresentationReport report = ss::verify_representation(Phi.phi, Phi, pair, tol);
  const ss::MinimalityCheck minimality = ss::minimality_check(pair, tol);

  ss::io::Json report_json;
  report_json["dimensions"] = {{"n", Phi.module.algebra.n},
                               {"k", Phi.module.k},
                               {"h1_dim", Phi.phi.h1_dim},
                               {"h2_dim", Phi.h2_dim},
                               {"choi_rank", ss::choi_rank(Phi.phi, tol)},
                               {"k1_dim", rep.k1_dim},
                               {"k2_dim", module_rep.k2_dim}};
  report_json["representation"] = ss::io::representation_report_json(report);
  report_json["minimality"] = {{"minimal_k1", minimality.minimal_k1},
                               {"minimal_k2", minimality.minimal_k2}};
  report_json["verdict"] = report.verdict;

  ss::io::Json file;
  file["pair"] = ss::io::pair_json(pair);
  file["report"] = report_json;
  ss::io::save_json(out_path, file);

  if (human) {
    std::cout << "k1_dim = " << rep.k1_dim << ", k2_dim = " << module_rep.k2_dim
              << ", max residual = " << report.max_residual() << "\n"
              << (report.verdict ? "[PASS]" : "[FAIL]") << " representation identities\n";
  } else {
    std::cout << report_json.dump(2) << "\n";
  }
  return report.verdict ? 0 : 2;
}

int cmd_equiv(const std::string& instance_path, const std::string& a_path,
              const std::string& b_path, const std::string& out_path, bool human,
              const ss::TolerancePolicy& tol) {
  const ss::PhiMap Phi = ss::io::load_instance(instance_path);
  const ss::RepresentationPair pair_a = ss::io::load_pair(a_path, Phi);
  const ss::RepresentationPair pair_b = ss::io::load_pair(b_path, Phi);
  for (const auto* entry : {&pair_a, &pair_b}) {
    const ss::RepresentationReport report = ss::verify_representation(Phi.phi, Phi, *entry, tol);
    if (!report.verdict) {
      throw ss::Error(ss::ErrorCode::NotEquivalent,
                      std::string(entry == &pair_a ? "first" : "second") +
                          " representation does not verify against the instance (max residual " +
                          std::to_string(report.max_residual()) + ")");
    }
  }
  const ss::EquivalenceWitness witness = ss::unitary_equivalence(pair_a, pair_b, tol);
  emit(ss::io::witness_json(witness), out_path);
  if (human) {
    std::cout << "[PASS] unitarily equivalent (max residual " << witness.max_residual() << ")\n";
  }
  return 0;
}

int cmd_gen(int n, int k, int h1, int h2, int r, std::uint64_t seed, const std::string& out_path,
            const ss::TolerancePolicy& tol) {
  if (r < 1 || r > n * h1) {
    std::cerr << "gen: infeasible rank; requires 1 <= r <= n*h1_dim = " << n * h1 << "\n";
    return 1;
  }
  if (h2 < n * r * k) {
    std::cerr << "gen: infeasible dimensions; requires h2_dim >= n*r*k = " << n * r * k << "\n";
    return 1;
  }
  const ss::CPMap phi = ss::gen_cp_map(n, h1, r, seed, tol);
  const ss::PhiMap Phi = ss::gen_phi_map(phi, k, h2, seed, tol);
  ss::io::save_json(out_path, ss::io::instance_json(Phi));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal Stinespring representations for completely positive maps and phi-maps"};
  app.require_subcommand(1);
  ss::TolerancePolicy tol;

  std::string instance_path;
  std::string rep_a_path;
  std::string rep_b_path;
  std::string out_path;
  bool human = false;

  CLI::App* check = app.add_subcommand("check", "certify an instance: phi CP, Phi a phi-map");
  check->add_option("instance", instance_path, "instance file")->required();
  check->add_option("--out", out_path, "write the report here instead of stdout");
  check->add_flag("--human", human, "human-readable summary");
  add_tolerance_flags(check, tol);

  CLI::App* dilate =
      app.add_subcommand("dilate", "construct and verify the minimal representation pair");
  dilate->add_option("instance", instance_path, "instance file")->required();
  dilate->add_option("--out", out_path, "output file for the pair and report")->required();
  dilate->add_flag("--human", human, "human-readable summary");
  add_tolerance_flags(dilate, tol);

  CLI::App* equiv =
      app.add_subcommand("equiv", "synthesize the intertwining unitaries between two pairs");
  equiv->add_option("instance", instance_path, "instance file")->required();
  equiv->add_option("repA", rep_a_path, "first representation file")->required();
  equiv->add_option("repB", rep_b_path, "second representation file")->required();
  equiv->add_option("--out", out_path, "write the witness here instead of stdout");
  equiv->add_flag("--human", human, "human-readable summary");
  add_tolerance_flags(equiv, tol);

  CLI::App* demo = app.add_subcommand("demo-asadi", "end-to-end run of the built-in instance");

  int n = 2, k = 1, h1 = 2, h2 = 4, r = 1;
  std::uint64_t seed = 0;
  CLI::App* gen = app.add_subcommand("gen", "generate a random valid instance");
  gen->add_option("--n", n, "algebra dimension (A = M_n)")->required();
  gen->add_option("--k", k, "module rank (E = A^k)")->required();
  gen->add_option("--h1", h1, "dim H1")->required();
  gen->add_option("--h2", h2, "dim H2")->required();
  gen->add_option("--r", r, "Choi rank of phi")->required();
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--out", out_path, "output instance file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(check)) return cmd_check(instance_path, out_path, human, tol);
    if (app.got_subcommand(dilate)) return cmd_dilate(instance_path, out_path, human, tol);
    if (app.got_subcommand(equiv)) {
      return cmd_equiv(instance_path, rep_a_path, rep_b_path, out_path, human, tol);
    }
    if (app.got_subcommand(demo)) {
      return ss::demo::run_demo(std::cout).all_pass() ? 0 : 2;
    }
    if (app.got_subcommand(gen)) return cmd_gen(n, k, h1, h2, r, seed, out_path, tol);
  } catch (const ss::io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ss::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
