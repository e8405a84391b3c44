// pidq: quantify redundant, unique and synergistic interactions in discrete
// joint distributions, bound synergy from pairwise marginals, and rank
// candidate models by interaction profile.
//
// Exit codes: 0 success, 2 validation/usage error, 3 solver did not converge
// (values are still printed).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pidq/bounds.hpp"
#include "pidq/discretize.hpp"
#include "pidq/dist.hpp"
#include "pidq/errors.hpp"
#include "pidq/io.hpp"
#include "pidq/model.hpp"
#include "pidq/solver.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNoConverge = 3;

struct GlobalOpts {
  uint64_t seed = 0;
  int precision = 6;
  bool quiet = false;
};

void emit(const json& report, const GlobalOpts& g) {
  std::cout << pidq::io::round_numbers(report, g.precision).dump(2) << "\n";
}

void note(const GlobalOpts& g, const std::string& msg) {
  if (!g.quiet) std::cerr << "pidq: " << msg << "\n";
}

bool looks_like_json(const std::string& path) {
  std::ifstream in(path);
  char ch;
  while (in.get(ch)) {
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r') continue;
    return ch == '{' || ch == '[';
  }
  return false;
}

pidq::DiscretizeConfig make_dconfig(const std::string& bins, std::optional<int> clusters,
                                    uint64_t seed) {
  pidq::DiscretizeConfig d;
  d.seed = seed;
  if (clusters) {
    d.method = pidq::DiscretizeConfig::Method::kmeans;
    d.bins_or_k = *clusters;
    if (*clusters < 2) throw pidq::ArgumentError("--clusters must be >= 2");
  } else if (bins != "auto") {
    char* end = nullptr;
    const long v = std::strtol(bins.c_str(), &end, 10);
    if (end == bins.c_str() || *end != '\0' || v < 2) {
      throw pidq::ArgumentError("--bins must be 'auto' or an integer >= 2, got '" + bins + "'");
    }
    d.bins_or_k = static_cast<int>(v);
  }
  return d;
}

// Load a distribution either directly or by discretizing a sample table.
pidq::JointDist load_input_dist(const std::string& path, const pidq::DiscretizeConfig& dconfig,
                                const GlobalOpts& g) {
  if (looks_like_json(path)) {
    return pidq::io::load_dist(path, pidq::io::cell_cap_from_env());
  }
  pidq::SampleTable table = pidq::io::load_samples(path);
  pidq::DiscretizedTable dt = pidq::discretize_table(std::move(table), dconfig);
  if (dt.x1.degenerate) note(g, "modality x1 is constant; it was mapped to a single bin");
  if (dt.x2.degenerate) note(g, "modality x2 is constant; it was mapped to a single bin");
  dt.joint.validate(pidq::io::cell_cap_from_env());
  return dt.joint;
}

int cmd_pid(const std::string& input, const std::string& bins, std::optional<int> clusters,
            double tol, int max_iters, const GlobalOpts& g) {
  const pidq::DiscretizeConfig dconfig = make_dconfig(bins, clusters, g.seed);
  pidq::SolverConfig sconfig;
  sconfig.tol_obj = tol;
  sconfig.max_iters = max_iters;
  sconfig.seed = g.seed;

  const pidq::JointDist p = load_input_dist(input, dconfig, g);
  const pidq::PairwiseMarginals m = pidq::pairwise_marginals(p, false);
  const pidq::SolveResult solved = pidq::solve_q_star(m, sconfig);
  const pidq::PIDResult pid = pidq::compute_pid(p, solved, sconfig);

  json report{{"schema_version", pidq::io::kSchemaVersion},
              {"r", pid.r},
              {"u1", pid.u1},
              {"u2", pid.u2},
              {"s", pid.s.value()},
              {"total_mi", pid.total_mi.value()},
              {"converged", pid.converged},
              {"iterations", pid.iterations}};
  emit(report, g);
  if (!pid.converged) {
    note(g, "objective change per sweep did not fall below tolerance within --max-iters");
    return kExitNoConverge;
  }
  return kExitOk;
}

int cmd_bounds(const std::string& marginals_path, double c, double tol, const GlobalOpts& g) {
  pidq::SolverConfig sconfig;
  sconfig.tol_obj = tol;
  sconfig.seed = g.seed;
  pidq::DisagreementConfig dcfg;
  dcfg.c = c;

  const pidq::PairwiseMarginals m = pidq::io::load_marginals(marginals_path);
  const pidq::SolveResult solved = pidq::solve_q_star(m, sconfig);
  const pidq::PIDResult pid = pidq::compute_pid(m, solved, sconfig);

  json report{{"schema_version", pidq::io::kSchemaVersion},
              {"r", pid.r},
              {"u1", pid.u1},
              {"u2", pid.u2}};

  if (m.m12) {
    const pidq::SynergyBounds b =
        pidq::compute_synergy_bounds(m, pid.r, pid.u1, pid.u2, sconfig, dcfg);
    const std::vector<double> py = m.p_y();
    const double h_y = pidq::detail::entropy_nocheck(py);
    const pidq::PerfBounds perf = pidq::performance_bounds_range(
        pid.r, pid.u1, pid.u2, std::max(b.s_r_lower, b.s_u_lower), b.s_upper, h_y, m.ny());
    report["s_r"] = b.s_r_lower;
    report["s_u"] = b.s_u_lower;
    report["s_upper"] = b.s_upper;
    report["alpha"] = b.alpha;
    report["min_cmi"] = b.min_cmi;
    report["coupling_entropy"] = b.coupling_entropy;
    report["upper_slack"] = b.upper_slack;
    report["p_lower"] = perf.p_lower;
    report["p_upper"] = perf.p_upper;
    report["p_hat"] = perf.p_hat;
  } else {
    const char* reason = "requires the p(x1,x2) marginal (unlabeled multimodal data)";
    for (const char* field : {"s_r", "s_u", "s_upper", "alpha", "p_lower", "p_upper", "p_hat"}) {
      report[field] = nullptr;
    }
    report["reason"] = reason;
  }
  emit(report, g);
  if (!pid.converged) {
    note(g, "solver did not converge; bound values may be loose");
    return kExitNoConverge;
  }
  return kExitOk;
}

int cmd_select(const std::string& target_path, const std::string& library_path, int top_k,
               const std::string& bins, std::optional<int> clusters, const GlobalOpts& g) {
  pidq::SolverConfig sconfig;
  sconfig.seed = g.seed;

  const pidq::ModelLibrary lib = library_path.empty()
                                     ? pidq::builtin_library(sconfig)
                                     : pidq::io::load_library(library_path);

  const pidq::DiscretizeConfig dconfig = make_dconfig(bins, clusters, g.seed);
  const pidq::JointDist p = load_input_dist(target_path, dconfig, g);
  const pidq::PairwiseMarginals m = pidq::pairwise_marginals(p, false);
  const pidq::PIDResult pid = pidq::compute_pid(p, pidq::solve_q_star(m, sconfig), sconfig);
  const pidq::NormalizedPID profile = pidq::normalize_pid(pid);
  if (profile.degenerate) {
    throw pidq::ValidationError("target distribution carries no interaction information");
  }

  const pidq::ModelSelection sel = pidq::select_models(profile, lib, top_k);
  json report{{"schema_version", pidq::io::kSchemaVersion},
              {"nearest_dataset", sel.dataset_id},
              {"similarity", sel.similarity},
              {"models", sel.models},
              {"target_profile",
               {{"r", profile.r_hat},
                {"u1", profile.u1_hat},
                {"u2", profile.u2_hat},
                {"s", profile.s_hat}}}};
  emit(report, g);
  return kExitOk;
}

int cmd_discretize(const std::string& input, const std::string& output, const std::string& bins,
                   std::optional<int> clusters, const GlobalOpts& g) {
  const pidq::DiscretizeConfig dconfig = make_dconfig(bins, clusters, g.seed);
  pidq::SampleTable table = pidq::io::load_samples(input);
  pidq::DiscretizedTable dt = pidq::discretize_table(std::move(table), dconfig);
  dt.joint.validate(pidq::io::cell_cap_from_env());
  pidq::io::save_dist(dt.joint, output);

  auto modality_meta = [](const pidq::ModalityCoding& mc) {
    json j{{"method", mc.method}, {"cardinality", mc.cardinality}, {"dim", mc.dim},
           {"degenerate", mc.degenerate}};
    if (mc.method == "histogram") {
      j["edges"] = mc.edges;
      j["bins"] = mc.cardinality;
    } else {
      json rows = json::array();
      for (int c = 0; c < mc.cardinality; ++c) {
        rows.push_back(std::vector<double>(mc.centroids.begin() + static_cast<size_t>(c) * mc.dim,
                                           mc.centroids.begin() + static_cast<size_t>(c + 1) * mc.dim));
      }
      j["centroids"] = std::move(rows);
      j["clusters"] = mc.cardinality;
    }
    return j;
  };
  json meta{{"schema_version", pidq::io::kSchemaVersion},
            {"seed", g.seed},
            {"x1", modality_meta(dt.x1)},
            {"x2", modality_meta(dt.x2)}};
  pidq::io::atomic_write_text(output + ".meta.json",
                              pidq::io::round_numbers(meta, 17).dump(2) + "\n");

  if (dt.x1.degenerate) note(g, "modality x1 is constant; it was mapped to a single bin");
  if (dt.x2.degenerate) note(g, "modality x2 is constant; it was mapped to a single bin");
  note(g, "wrote " + output + " and " + output + ".meta.json");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pidq: partial information decomposition toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand name

  GlobalOpts g;
  app.add_option("--seed", g.seed, "seed for all randomness (clustering, restarts)");
  app.add_option("--precision", g.precision, "significant digits in printed numbers")
      ->check(CLI::Range(1, 17));
  app.add_flag("--quiet", g.quiet, "suppress progress notes on stderr");

  std::string input, output, marginals_path, library_path, target_path;
  std::string bins = "auto";
  std::optional<int> clusters;
  double tol = 1e-10;
  int max_iters = 50'000;
  double c = 1.0;
  int top_k = 3;

  CLI::App* pid = app.add_subcommand("pid", "decompose a joint distribution or sample table");
  pid->add_option("--input", input, "distribution (.json) or samples (delimited text)")
      ->required();
  pid->add_option("--bins", bins, "histogram bins per scalar modality, or 'auto'");
  pid->add_option("--clusters", clusters, "k-means clusters per modality (overrides --bins)");
  pid->add_option("--tol", tol, "objective tolerance in bits per sweep");
  pid->add_option("--max-iters", max_iters, "solver sweep budget")->check(CLI::PositiveNumber);

  CLI::App* bounds = app.add_subcommand("bounds", "synergy and performance bounds from marginals");
  bounds->add_option("--marginals", marginals_path, "marginals file (.json)")->required();
  bounds->add_option("--c", c, "disagreement scale constant")->check(CLI::PositiveNumber);
  bounds->add_option("--tol", tol, "objective tolerance in bits per sweep");

  CLI::App* select = app.add_subcommand("select", "rank candidate models for a new dataset");
  select->add_option("--target", target_path, "distribution or samples of the new dataset")
      ->required();
  select->add_option("--library", library_path,
                     "model library (.json); omit to use the built-in synthetic library");
  select->add_option("--top-k", top_k, "number of models to return")->check(CLI::PositiveNumber);
  select->add_option("--bins", bins, "histogram bins when the target is a sample table");
  select->add_option("--clusters", clusters, "k-means clusters when the target is a sample table");

  CLI::App* disc = app.add_subcommand("discretize", "bin or cluster a sample table");
  disc->add_option("--input", input, "samples file (delimited text)")->required();
  disc->add_option("--output", output, "distribution file to write")->required();
  disc->add_option("--bins", bins, "histogram bins per scalar modality, or 'auto'");
  disc->add_option("--clusters", clusters, "k-means clusters per modality (overrides --bins)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (pid->parsed()) return cmd_pid(input, bins, clusters, tol, max_iters, g);
    if (bounds->parsed()) return cmd_bounds(marginals_path, c, tol, g);
    if (select->parsed()) return cmd_select(target_path, library_path, top_k, bins, clusters, g);
    if (disc->parsed()) return cmd_discretize(input, output, bins, clusters, g);
  } catch (const pidq::ValidationError& e) {
    std::cerr << "pidq: validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const pidq::ArgumentError& e) {
    std::cerr << "pidq: " << e.what() << "\n";
    return kExitValidation;
  } catch (const pidq::InfeasibleError& e) {
    std::cerr << "pidq: infeasible: " << e.what() << "\n";
    return kExitValidation;
  } catch (const pidq::StaleSolutionError& e) {
    std::cerr << "pidq: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "pidq: internal error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
