#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rlab/echelon.hpp"
#include "rlab/families.hpp"
#include "rlab/feedback.hpp"
#include "rlab/io.hpp"
#include "rlab/minimality.hpp"
#include "rlab/realization.hpp"
#include "rlab/squaring.hpp"

namespace {

using rlab::Complex;
using rlab::Index;
using rlab::Json;

struct Options {
  std::string input;
  std::string batch;
  std::uint64_t seed = 0;
  double rank_tol = 1e-9;
  double eig_tol = 1e-6;
  int max_retries = 32;
  std::string psi;
  std::string format = "json";
};

rlab::Tolerances tolerances(const Options& opt) {
  if (opt.rank_tol <= 0 || opt.eig_tol <= 0 || opt.max_retries < 1)
    throw rlab::InvalidInputError("tolerances must be positive");
  return {opt.rank_tol, opt.eig_tol, opt.max_retries};
}

std::vector<Complex> parse_psi(const Options& opt, const Json& doc) {
  std::vector<Complex> coeffs;
  if (!opt.psi.empty()) {
    std::stringstream ss(opt.psi);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        coeffs.emplace_back(std::stod(item), 0.0);
      } catch (const std::exception&) {
        throw rlab::InvalidInputError("--psi: cannot parse coefficient '" + item + "'");
      }
    }
  } else if (doc.is_object() && doc.contains("psi")) {
    for (const Json& c : doc.at("psi"))
      coeffs.push_back(rlab::complex_from_json(c, "psi"));
  }
  if (coeffs.empty())
    throw rlab::InvalidInputError(
        "family requires --psi c0,c1,... or a \"psi\" array in the input");
  return coeffs;
}

Json run_analyze(const Json& doc, const rlab::Tolerances& tol, std::uint64_t) {
  const rlab::Realization r = rlab::realization_from_json(doc);
  Json out;
  out["verdict"] = rlab::to_json(rlab::is_minimal(r, tol));
  out["alpha"] = rlab::alpha(r.A, tol);
  out["clusters"] = rlab::to_json(rlab::cluster_eigenvalues(r.A, tol));
  out["open_spectrum"] = rlab::to_json(rlab::spectrum(r.A));
  out["rank_formula"] = rlab::to_json(rlab::rank_formula_check(r, tol));
  return out;
}

Json run_square(const Json& doc, const rlab::Tolerances& tol, std::uint64_t seed) {
  const rlab::Realization r = rlab::realization_from_json(doc);
  std::optional<rlab::CMatrix> tb, tc;
  if (doc.contains("T_b")) tb = rlab::matrix_from_json(doc.at("T_b"), "T_b");
  if (doc.contains("T_c")) tc = rlab::matrix_from_json(doc.at("T_c"), "T_c");
  const rlab::SquaredRealization sq = rlab::square_realization(r, tol, seed, tb, tc);
  Json out;
  out["squared"] = rlab::to_json(sq.squared);
  out["L_sq"] = rlab::to_json(rlab::assemble_system_matrix(sq.squared).L);
  out["transform"] = rlab::to_json(sq.transform);
  return out;
}

Json run_feedback(const Json& doc, const rlab::Tolerances& tol, std::uint64_t seed) {
  const rlab::Realization r = rlab::realization_from_json(doc);
  return rlab::to_json(rlab::minimality_equivalence_report(r, tol, seed));
}

Json run_complete(const Json& doc, const rlab::Tolerances& tol, std::uint64_t seed) {
  const rlab::Realization r = rlab::realization_from_json(doc);
  rlab::Realization target = rlab::associated(r);
  std::string route = "direct";
  bool relaxed = false;
  const bool square_full_rank =
      r.m() == r.p() &&
      rlab::numeric_rank(r.B, tol) == std::min(r.B.rows(), r.B.cols()) &&
      rlab::numeric_rank(r.C, tol) == std::min(r.C.rows(), r.C.cols());
  if (!square_full_rank) {
    if (rlab::is_minimal(r, tol).minimal) {
      target = rlab::associated(rlab::square_realization(r, tol, seed).squared);
      route = "squared";
    } else {
      target = rlab::associated(rlab::naive_square(r));
      route = "padded";
      relaxed = true;
    }
  }
  Json out;
  out["route"] = route;
  out["criterion"] = rlab::to_json(rlab::criterion_iii(target, tol, !relaxed));
  return out;
}

Json run_family(const Json& doc, const rlab::Tolerances& tol, std::uint64_t seed,
                const Options& opt) {
  (void)seed;
  const rlab::Realization r = rlab::realization_from_json(doc);
  const std::vector<Complex> psi = parse_psi(opt, doc);
  Json out = rlab::to_json(rlab::family_report(r, psi, tol));
  const rlab::CMatrix l = rlab::assemble_system_matrix(r).L;
  out["eigenvector_transport"] = rlab::invariant_subspace_containment(l, psi, tol);
  return out;
}

Json run_probe(const Json& doc, const rlab::Tolerances& tol, std::uint64_t seed) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("p") ||
      !doc.contains("trials"))
    throw rlab::InvalidInputError("probe input needs \"n\", \"p\" and \"trials\"");
  const Index n = doc.at("n").get<Index>();
  const Index p = doc.at("p").get<Index>();
  const int trials = doc.at("trials").get<int>();
  if (trials < 0) throw rlab::InvalidInputError("probe: trials must be >= 0");
  return rlab::to_json(rlab::conjecture_probe(n, p, trials, seed, tol));
}

Json run_echelon(const Json& doc, const rlab::Tolerances& tol, std::uint64_t seed) {
  if (!doc.is_object() || !doc.contains("jordan"))
    throw rlab::InvalidInputError("echelon input needs a \"jordan\" spec");
  const rlab::JordanSpec spec = rlab::jordan_spec_from_json(doc.at("jordan"));
  const rlab::RowSpec rows = rlab::jordan_row_spec(spec);
  rlab::CMatrix b;
  if (doc.contains("B")) {
    b = rlab::matrix_from_json(doc.at("B"), "B");
  } else if (doc.contains("m")) {
    b = rlab::sample_controllable_B(spec, doc.at("m").get<Index>(), seed, tol);
  } else {
    throw rlab::InvalidInputError("echelon input needs \"B\" or a width \"m\"");
  }
  const rlab::EchelonReduction red = rlab::block_echelon_reduce(b, rows, tol);
  Json out;
  out["row_spec"] = rlab::to_json(rows);
  out["rho"] = rlab::rho(rows);
  out["B"] = rlab::to_json(b);
  out["U"] = rlab::to_json(red.U);
  out["B_tilde"] = rlab::to_json(red.B_tilde);
  out["echelon_ok"] = rlab::is_block_echelon(red.B_tilde, rows, tol);
  out["selector_T"] = rlab::to_json(rlab::build_selector_T(b, rows, tol, seed));
  return out;
}

Json dispatch(const std::string& command, const Json& doc, const Options& opt) {
  const rlab::Tolerances tol = tolerances(opt);
  if (command == "analyze") return run_analyze(doc, tol, opt.seed);
  if (command == "square") return run_square(doc, tol, opt.seed);
  if (command == "feedback") return run_feedback(doc, tol, opt.seed);
  if (command == "complete") return run_complete(doc, tol, opt.seed);
  if (command == "family") return run_family(doc, tol, opt.seed, opt);
  if (command == "probe") return run_probe(doc, tol, opt.seed);
  if (command == "echelon") return run_echelon(doc, tol, opt.seed);
  throw rlab::InvalidInputError("unknown command: " + command);
}

Json envelope(const std::string& command, const std::string& input,
              const Options& opt) {
  Json env;
  env["command"] = command;
  env["input"] = input;
  env["seed"] = opt.seed;
  env["tolerances"] = Json{{"rank_rel", opt.rank_tol},
                           {"eig_match", opt.eig_tol},
                           {"max_retries", opt.max_retries}};
  return env;
}

// 0 = computed, 2 = input error, 3 = numerical breakdown.
int run_one(const std::string& command, const std::string& path, const Options& opt,
            Json& env) {
  env = envelope(command, path, opt);
  try {
    env["result"] = dispatch(command, rlab::load_json_file(path), opt);
    return 0;
  } catch (const rlab::InvalidInputError& e) {
    env["error"] = Json{{"type", "input"}, {"message", e.what()}};
    return 2;
  } catch (const rlab::NumericalBreakdownError& e) {
    env["error"] = Json{{"type", "numerical_breakdown"}, {"message", e.what()}};
    return 3;
  } catch (const std::exception& e) {
    env["error"] = Json{{"type", "internal"}, {"message", e.what()}};
    return 3;
  }
}

void render_text(const Json& j, std::ostream& os, int depth) {
  const std::string pad(static_cast<size_t>(depth) * 2, ' ');
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object() || (value.is_array() && !value.empty() &&
                                (value[0].is_object() || value[0].is_array()))) {
        os << pad << key << ":\n";
        render_text(value, os, depth + 1);
      } else {
        os << pad << key << ": " << value.dump() << "\n";
      }
    }
  } else if (j.is_array()) {
    for (const Json& item : j) {
      if (item.is_object()) {
        os << pad << "-\n";
        render_text(item, os, depth + 1);
      } else {
        os << pad << item.dump() << "\n";
      }
    }
  } else {
    os << pad << j.dump() << "\n";
  }
}

void emit(const Json& doc, const Options& opt) {
  if (opt.format == "text")
    render_text(doc, std::cout, 0);
  else
    std::cout << doc.dump(2) << "\n";
}

int run_batch(const std::string& command, const Options& opt) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(opt.batch)) {
    Json env = envelope(command, opt.batch, opt);
    env["error"] = Json{{"type", "input"}, {"message", "batch path is not a directory"}};
    emit(env, opt);
    return 2;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(opt.batch))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  Json reports = Json::array();
  for (const fs::path& f : files) {
    Json env;
    run_one(command, f.string(), opt, env);  // per-file failures stay in the report
    reports.push_back(std::move(env));
  }
  emit(reports, opt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"realization-lab: minimality, squaring, feedback and completion "
               "analysis of state-space systems"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze", "minimality verdict, alpha, clusters and the rank formula"},
      {"square", "compress inputs/outputs to alpha with certified transforms"},
      {"feedback", "the four equivalent minimality criteria"},
      {"complete", "per-eigenvalue completions of the D block"},
      {"family", "polynomial-in-L family report"},
      {"probe", "random search for completion-conjecture counterexamples"},
      {"echelon", "row-spec checks, unitary echelon reduction, selector"}};
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--input", opt.input, "input JSON file");
    sub->add_option("--batch", opt.batch, "directory of input JSON files");
    sub->add_option("--seed", opt.seed, "RNG seed (default 0)");
    sub->add_option("--rank-tol", opt.rank_tol, "relative SVD rank cutoff");
    sub->add_option("--eig-tol", opt.eig_tol, "eigenvalue matching tolerance");
    sub->add_option("--max-retries", opt.max_retries, "retry budget");
    sub->add_option("--psi", opt.psi, "polynomial coefficients c0,c1,...");
    sub->add_option("--format", opt.format, "json or text")
        ->check(CLI::IsMember({"json", "text"}));
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  if (opt.input.empty() == opt.batch.empty()) {
    Json env = envelope(command, "", opt);
    env["error"] = Json{{"type", "input"},
                        {"message", "exactly one of --input or --batch is required"}};
    emit(env, opt);
    return 2;
  }
  if (!opt.batch.empty() && (command == "probe")) {
    Json env = envelope(command, opt.batch, opt);
    env["error"] = Json{{"type", "input"}, {"message", "probe does not support --batch"}};
    emit(env, opt);
    return 2;
  }
  if (!opt.batch.empty()) return run_batch(command, opt);

  Json env;
  const int code = run_one(command, opt.input, opt, env);
  emit(env, opt);
  return code;
}
