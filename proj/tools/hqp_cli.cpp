// Command-line driver: simulate / sweep / verify / compile.
//
// Exit codes: 0 success, 1 verification failure, 2 input error. Reports are
// printed to stdout; a copy is written to --out (resolved against
// HQP_OUT_DIR when relative) or, with no --out, to a default filename under
// HQP_OUT_DIR when that variable is set.
#include "hqp/experiment.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

std::optional<fs::path> resolve_out(const std::string& out_flag, const char* default_name) {
  const char* env = std::getenv("HQP_OUT_DIR");
  const bool have_env = env != nullptr && *env != '\0';
  if (!out_flag.empty()) {
    fs::path p(out_flag);
    if (p.is_relative() && have_env) p = fs::path(env) / p;
    return p;
  }
  if (have_env) return fs::path(env) / default_name;
  return std::nullopt;
}

int emit(const std::string& text, const std::string& out_flag, const char* default_name) {
  std::cout << text;
  const std::optional<fs::path> path = resolve_out(out_flag, default_name);
  if (!path) return 0;
  std::error_code ec;
  if (path->has_parent_path()) fs::create_directories(path->parent_path(), ec);
  std::ofstream out(*path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path->string() << "'\n";
    return 2;
  }
  out << text;
  return out.good() ? 0 : 2;
}

nlohmann::json load_doc(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read document '" + path + "'");
  return nlohmann::json::parse(in);
}

std::string render_verify_report(const std::vector<hqp::InvariantResult>& results) {
  std::string text;
  int passed = 0;
  for (const hqp::InvariantResult& r : results) {
    passed += r.pass ? 1 : 0;
    text += r.pass ? "[PASS] " : "[FAIL] ";
    text += r.name;
    for (std::size_t pad = r.name.size(); pad < 44; ++pad) text += ' ';
    text += " observed " + hqp::doc::format_double(r.observed) + " vs " +
            hqp::doc::format_double(r.threshold) + " | " + r.detail + "\n";
  }
  text += std::to_string(passed) + "/" + std::to_string(results.size()) +
          " invariants passed\n";
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"state-vector simulator for gate arrays programmed by quantum registers"};
  app.require_subcommand(1);

  std::string sim_doc, sim_out;
  long sim_resolution = 0;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run a 'conditional' or 'network' experiment document");
  simulate->add_option("doc", sim_doc, "experiment document (JSON)")->required();
  simulate->add_option("--out", sim_out, "report file path");
  CLI::Option* sim_resolution_opt = simulate->add_option(
      "--momentum-resolution", sim_resolution, "override the per-variable grid size M");

  std::string sweep_doc, sweep_out;
  std::uint64_t sweep_seed = 0;
  CLI::App* sweep =
      app.add_subcommand("sweep", "run a 'stochastic-sweep' document; emits CSV");
  sweep->add_option("doc", sweep_doc, "experiment document (JSON)")->required();
  sweep->add_option("--out", sweep_out, "CSV file path");
  CLI::Option* sweep_seed_opt =
      sweep->add_option("--seed", sweep_seed, "override the document's Monte Carlo seed");

  bool fault_inject = false;
  std::uint64_t verify_seed = 1;
  std::string verify_out;
  CLI::App* verify = app.add_subcommand("verify", "run the full invariant suite");
  verify->add_flag("--fault-inject", fault_inject,
                   "perturb one theta-gate entry by 1e-3 (harness self-test; must fail)");
  verify->add_option("--seed", verify_seed, "randomized-check seed");
  verify->add_option("--out", verify_out, "report file path");

  std::vector<double> matrix_entries;
  std::string compile_doc, compile_out;
  CLI::App* compile =
      app.add_subcommand("compile", "decompose a 2x2 unitary into three theta angles");
  compile->add_option("--matrix", matrix_entries,
                      "row-major re/im pairs: m00re m00im m01re m01im m10re m10im m11re m11im")
      ->expected(8);
  compile->add_option("doc", compile_doc, "or a document of kind 'compile'");
  compile->add_option("--out", compile_out, "report file path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      hqp::SimulateOptions opts;
      if (sim_resolution_opt->count() > 0) opts.momentum_resolution = sim_resolution;
      const nlohmann::ordered_json report = hqp::run_simulate(load_doc(sim_doc), opts);
      return emit(report.dump(2) + "\n", sim_out, "simulate_report.json");
    }
    if (sweep->parsed()) {
      std::optional<std::uint64_t> seed;
      if (sweep_seed_opt->count() > 0) seed = sweep_seed;
      const std::string csv = hqp::render_sweep_csv(hqp::run_sweep_rows(load_doc(sweep_doc), seed));
      return emit(csv, sweep_out, "sweep.csv");
    }
    if (verify->parsed()) {
      const std::vector<hqp::InvariantResult> results =
          hqp::full_invariant_suite({fault_inject, verify_seed});
      bool all_pass = true;
      for (const hqp::InvariantResult& r : results) all_pass = all_pass && r.pass;
      const int emit_rc = emit(render_verify_report(results), verify_out, "verify_report.txt");
      return all_pass ? emit_rc : 1;
    }
    if (compile->parsed()) {
      hqp::CMat m(2, 2);
      if (matrix_entries.size() == 8) {
        m(0, 0) = {matrix_entries[0], matrix_entries[1]};
        m(0, 1) = {matrix_entries[2], matrix_entries[3]};
        m(1, 0) = {matrix_entries[4], matrix_entries[5]};
        m(1, 1) = {matrix_entries[6], matrix_entries[7]};
      } else if (!compile_doc.empty()) {
        const nlohmann::json d = load_doc(compile_doc);
        if (hqp::doc::require_kind(d) != "compile") {
          throw hqp::DocValidationError("kind", "expected 'compile'");
        }
        if (!d.contains("matrix")) throw hqp::DocValidationError("matrix", "required");
        m = hqp::doc::parse_matrix(d["matrix"], "matrix");
        if (m.rows() != 2 || m.cols() != 2) {
          throw hqp::DocValidationError("matrix", "expected a 2x2 matrix");
        }
      } else {
        std::cerr << "error: compile needs --matrix or an experiment document\n";
        return 2;
      }
      const double defect = hqp::unitarity_defect(m);
      if (defect > hqp::tol::invariant) {
        std::cerr << "error: input matrix is not unitary: ||U'U - I||_max = "
                  << hqp::doc::format_double(defect) << "\n";
        return 2;
      }
      const nlohmann::ordered_json report = hqp::run_compile(m);
      return emit(report.dump(2) + "\n", compile_out, "compile.json");
    }
  } catch (const hqp::DocValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: cannot parse document: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
