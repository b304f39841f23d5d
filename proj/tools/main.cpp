// quasidiag: decide whether two weighted states share a two-dimensional
// common block structure and, when they do, solve their unambiguous
// discrimination block by block.
//
// Subcommands: analyze | solve | compare | gen. Reports are JSON on stdout;
// --verbose adds a human summary on stderr. Exit codes: 0 success, 2 parse
// error, 3 invalid instance, 4 unsolvable, 5 internal tolerance breakdown.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "quasidiag/comparison.hpp"
#include "quasidiag/io.hpp"
#include "quasidiag/oracle.hpp"
#include "quasidiag/usd.hpp"
#include "quasidiag/version.hpp"

namespace {

using namespace quasidiag;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitInvalid = 3;
constexpr int kExitUnsolvable = 4;
constexpr int kExitBreakdown = 5;

struct CommonOptions {
  Tolerances tol;
  bool tau12 = false;
  bool verbose = false;
  std::string format = "json";
};

void add_common_flags(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--tol-comm", opts.tol.tol_comm, "relative commutator tolerance");
  cmd->add_option("--tol-rank", opts.tol.tol_rank, "relative rank threshold");
  cmd->add_option("--format", opts.format, "output format: json | compact")
      ->check(CLI::IsMember({"json", "compact"}));
  cmd->add_flag("--verbose", opts.verbose, "human-readable summary on stderr");
}

bool use_color() {
  const char* setting = std::getenv("QUASIDIAG_COLOR");
  if (setting == nullptr) return false;
  return std::string(setting) == "always";
}

void verbose_line(const CommonOptions& opts, const std::string& text, bool good) {
  if (!opts.verbose) return;
  if (use_color())
    std::cerr << (good ? "\033[32m" : "\033[31m") << text << "\033[0m\n";
  else
    std::cerr << text << "\n";
}

void emit(const Json& report, const CommonOptions& opts) {
  std::cout << dump_json(report, opts.format == "compact") << "\n";
}

Json disjointness_to_json(const SupportOverlap& s) {
  return Json{{"flag", s.disjoint}, {"max_overlap", s.max_overlap}};
}

Json report_header(const char* command, const CommonOptions& opts) {
  return Json{{"artifact_version", kVersion},
              {"command", command},
              {"tolerances", tolerances_to_json(opts.tol)}};
}

struct Pipeline {
  std::vector<ReductionStep> steps;
  WeightedState reduced1;
  WeightedState reduced2;
  Matrix embedding;
};

Pipeline run_reductions(const WeightedState& g1, const WeightedState& g2,
                        const CommonOptions& opts) {
  ReductionStep s0 = reduce_tau0(g1, g2, opts.tol);
  Matrix embedding = s0.embedding;
  WeightedState r1 = compress_state(s0.output_pair.first, embedding, opts.tol);
  WeightedState r2 = compress_state(s0.output_pair.second, embedding, opts.tol);
  Pipeline p{{std::move(s0)}, std::move(r1), std::move(r2), std::move(embedding)};
  if (opts.tau12) {
    for (int which : {1, 2}) {
      ReductionStep s = reduce_tau(which, p.reduced1, p.reduced2, opts.tol);
      p.reduced1 = s.output_pair.first;
      p.reduced2 = s.output_pair.second;
      p.steps.push_back(std::move(s));
    }
  }
  return p;
}

Json criteria_block(const WeightedState& g1, const WeightedState& g2, const Tolerances& tol) {
  return Json{
      {"three_commutator", criterion_report_to_json(three_commutator_test(g1.gamma(), g2.gamma(), tol))},
      {"laffey", criterion_report_to_json(laffey_test(g1.gamma(), g2.gamma(), tol))},
      {"mutual_commutation",
       criterion_report_to_json(mutual_commutation_test({g1.gamma(), g2.gamma()}, tol))}};
}

Json analyze_instance(const ParsedInstance& inst, const CommonOptions& opts) {
  Json report = report_header("analyze", opts);
  report["input"] = Json{{"dim", inst.g1.dim()},
                         {"trace_gamma1", inst.g1.weight()},
                         {"trace_gamma2", inst.g2.weight()}};
  if (!inst.metadata.empty()) report["input"]["metadata"] = inst.metadata;

  report["criteria"] = criteria_block(inst.g1, inst.g2, opts.tol);
  report["disjoint_supports"] =
      disjointness_to_json(disjoint_supports(inst.g1.gamma(), inst.g2.gamma(), opts.tol));

  const Pipeline pipe = run_reductions(inst.g1, inst.g2, opts);
  Json steps = Json::array();
  for (const ReductionStep& s : pipe.steps) steps.push_back(reduction_step_to_json(s));
  report["reductions"] = std::move(steps);
  report["criteria_reduced"] = criteria_block(pipe.reduced1, pipe.reduced2, opts.tol);
  report["disjoint_supports_reduced"] = disjointness_to_json(
      disjoint_supports(pipe.reduced1.gamma(), pipe.reduced2.gamma(), opts.tol));

  const DjbResult djb =
      diagonalizing_jordan_bases(pipe.reduced1.gamma(), pipe.reduced2.gamma(), opts.tol);
  if (djb.exists()) {
    report["jordan_angles"] = djb.bases->jordan.angles;
    const BlockStructure cbs = extract_cbs(*djb.bases, pipe.reduced1.dim(), opts.tol);
    Json angles = Json::array();
    for (double a : djb.bases->jordan.angles) angles.push_back(a);
    report["block_structure"] = Json{{"num_blocks", cbs.size()},
                                     {"block_ranks", cbs.block_ranks},
                                     {"angles", std::move(angles)}};
  }

  const bool pass = report["criteria"]["three_commutator"]["pass"].get<bool>();
  verbose_line(opts,
               std::string("three-commutator (input pair): ") + (pass ? "PASS" : "FAIL"), pass);
  return report;
}

int cmd_analyze(const std::string& path, const CommonOptions& opts) {
  const ParsedInstance inst = load_instance_file(path, opts.tol);
  emit(analyze_instance(inst, opts), opts);
  return kExitOk;
}

Json solution_to_json(const USDSolution& sol, const WeightedState& g1, const WeightedState& g2,
                      const Tolerances& tol) {
  Json blocks = Json::array();
  for (const BlockReport& b : sol.blocks) {
    blocks.push_back(Json{{"rank", b.projector.rank()},
                          {"rank_gamma1", b.rank1},
                          {"rank_gamma2", b.rank2},
                          {"weight1", b.weight1},
                          {"weight2", b.weight2},
                          {"overlap", b.overlap},
                          {"q_fail", b.q_fail},
                          {"assignment", b.assignment},
                          {"projector", matrix_to_json(b.projector.matrix())}});
  }
  return Json{{"p_succ", sol.p_succ},
              {"blocks", std::move(blocks)},
              {"measurement",
               Json{{"e1", matrix_to_json(sol.measurement.e1.matrix())},
                    {"e2", matrix_to_json(sol.measurement.e2.matrix())},
                    {"e_fail", matrix_to_json(sol.measurement.e_fail.matrix())}}},
              {"validation", validation_report_to_json(validate(sol.measurement, g1, g2, tol))}};
}

int solve_to_report(const ParsedInstance& inst, const CommonOptions& opts, bool with_oracle,
                    Json& report) {
  const SolveResult result = solve_usd(inst.g1, inst.g2, opts.tol, opts.tau12);
  Json steps = Json::array();
  for (const ReductionStep& s : result.reductions_applied)
    steps.push_back(reduction_step_to_json(s));
  report["reductions"] = std::move(steps);
  report["criteria"] = Json{{"three_commutator", criterion_report_to_json(result.report)}};

  if (!result.solvable()) {
    report["unsolvable"] = true;
    verbose_line(opts, "no 2d common block structure: unsolvable by this method", false);
    return kExitUnsolvable;
  }
  report["solution"] = solution_to_json(*result.solution, inst.g1, inst.g2, opts.tol);
  if (with_oracle) {
    if (inst.g1.dim() <= 6) {
      const Pipeline pipe = run_reductions(inst.g1, inst.g2, opts);
      const OracleResult oracle = brute_force_usd(pipe.reduced1, pipe.reduced2);
      report["oracle"] = Json{{"p_succ", oracle.p_succ},
                              {"iterations", oracle.iterations},
                              {"converged", oracle.converged},
                              {"certificate_gap", oracle.certificate_gap}};
    } else {
      report["oracle"] = Json{{"skipped", "dimension above oracle guard"}};
    }
  }
  std::ostringstream msg;
  msg << "p_succ = " << result.solution->p_succ;
  verbose_line(opts, msg.str(), true);
  return kExitOk;
}

int cmd_solve(const std::string& path, const CommonOptions& opts, bool with_oracle) {
  const ParsedInstance inst = load_instance_file(path, opts.tol);
  Json report = report_header("solve", opts);
  report["input"] = Json{{"dim", inst.g1.dim()},
                         {"trace_gamma1", inst.g1.weight()},
                         {"trace_gamma2", inst.g2.weight()}};
  const int code = solve_to_report(inst, opts, with_oracle, report);
  emit(report, opts);
  return code;
}

int cmd_compare(int n, int c, double theta, const std::string& out_path, bool do_analyze,
                bool do_solve, bool with_oracle, const CommonOptions& opts) {
  const auto [g1, g2] = c == 2 ? two_out_of_n_instance(n, theta, opts.tol)
                               : c_out_of_n_instance(n, c, theta, opts.tol);
  const Json metadata = Json{{"generator", "compare"},
                             {"n", n},
                             {"c", c},
                             {"theta", theta},
                             {"label", std::to_string(c) + "_out_of_" + std::to_string(n)}};
  const Json instance = instance_to_json(g1, g2, metadata);
  if (!out_path.empty()) write_text_file(out_path, dump_json(instance) + "\n");

  if (!do_analyze && !do_solve) {
    if (out_path.empty()) emit(instance, opts);
    return kExitOk;
  }

  ParsedInstance inst{g1, g2, metadata};
  Json report = report_header("compare", opts);
  report["instance"] = Json{{"dim", g1.dim()},
                            {"trace_gamma1", g1.weight()},
                            {"trace_gamma2", g2.weight()},
                            {"metadata", metadata}};
  int code = kExitOk;
  if (do_analyze) report["analysis"] = analyze_instance(inst, opts);
  if (do_solve) code = solve_to_report(inst, opts, with_oracle, report);
  emit(report, opts);
  return code;
}

std::vector<BlockSpec> parse_blocks(const std::string& text) {
  std::vector<BlockSpec> specs;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, '/')) {
    const auto comma = part.find(',');
    if (comma == std::string::npos)
      throw InvalidInput("gen: block spec must look like r1,r2/r1,r2/...");
    BlockSpec spec;
    try {
      spec.rank1 = std::stoi(part.substr(0, comma));
      spec.rank2 = std::stoi(part.substr(comma + 1));
    } catch (const std::exception&) {
      throw InvalidInput("gen: block ranks must be integers");
    }
    specs.push_back(spec);
  }
  if (specs.empty()) throw InvalidInput("gen: empty block spec");
  return specs;
}

int cmd_gen(const std::string& blocks, std::uint64_t seed, const std::string& out_path,
            std::string truth_path, const CommonOptions& opts) {
  const std::vector<BlockSpec> specs = parse_blocks(blocks);
  const ConstructedInstance inst =
      random_block_instance(static_cast<int>(specs.size()), specs, seed);

  const Json metadata =
      Json{{"generator", "gen"}, {"blocks", blocks}, {"seed", seed}};
  const Json instance = instance_to_json(inst.pair.first, inst.pair.second, metadata);

  Json truth = Json{{"artifact_version", kVersion}, {"seed", seed}};
  truth["angles"] = inst.truth_angles;
  truth["block_ranks"] = inst.truth_cbs.block_ranks;
  Json projectors = Json::array();
  for (const Projector& p : inst.truth_cbs.projectors)
    projectors.push_back(matrix_to_json(p.matrix()));
  truth["block_projectors"] = std::move(projectors);

  if (out_path.empty()) {
    emit(instance, opts);
  } else {
    write_text_file(out_path, dump_json(instance) + "\n");
    if (truth_path.empty()) truth_path = out_path + ".truth.json";
    write_text_file(truth_path, dump_json(truth) + "\n");
    verbose_line(opts, "wrote " + out_path + " and " + truth_path, true);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-dimensional common block structures for unambiguous state discrimination"};
  app.require_subcommand(1);

  CommonOptions opts;

  std::string analyze_path;
  CLI::App* analyze = app.add_subcommand("analyze", "run the commutator criteria on an instance");
  analyze->add_option("input", analyze_path, "instance JSON file")->required();
  analyze->add_flag("--tau12", opts.tau12, "also apply the pinching reductions tau1, tau2");
  add_common_flags(analyze, opts);

  std::string solve_path;
  bool solve_oracle = false;
  CLI::App* solve = app.add_subcommand("solve", "solve unambiguous discrimination block by block");
  solve->add_option("input", solve_path, "instance JSON file")->required();
  solve->add_flag("--tau12", opts.tau12, "also apply the pinching reductions tau1, tau2");
  solve->add_flag("--oracle", solve_oracle, "cross-check against the brute-force oracle (dim <= 6)");
  add_common_flags(solve, opts);

  int cmp_n = 0;
  int cmp_c = 2;
  double cmp_theta = 0.0;
  std::string cmp_out;
  bool cmp_analyze = false;
  bool cmp_solve = false;
  bool cmp_oracle = false;
  CLI::App* compare = app.add_subcommand("compare", "generate a state-comparison instance");
  compare->add_option("--n", cmp_n, "number of source states")->required();
  compare->add_option("--c", cmp_c, "copies compared (2 = pairwise)");
  compare->add_option("--theta", cmp_theta, "mutual overlap angle, radians")->required();
  compare->add_option("--out", cmp_out, "write the instance file here");
  compare->add_flag("--analyze", cmp_analyze, "run the criteria on the generated instance");
  compare->add_flag("--solve", cmp_solve, "solve the generated instance");
  compare->add_flag("--oracle", cmp_oracle, "cross-check the solution against the oracle");
  compare->add_flag("--tau12", opts.tau12, "also apply the pinching reductions tau1, tau2");
  add_common_flags(compare, opts);

  std::string gen_blocks;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  std::string gen_truth;
  CLI::App* gen = app.add_subcommand("gen", "generate a random instance with known blocks");
  gen->add_option("--blocks", gen_blocks, "per-block ranks, e.g. 1,1/1,1")->required();
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--out", gen_out, "write the instance file here (stdout otherwise)");
  gen->add_option("--truth", gen_truth, "ground-truth sidecar path (default <out>.truth.json)");
  add_common_flags(gen, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    opts.tol.validate();
    if (analyze->parsed()) return cmd_analyze(analyze_path, opts);
    if (solve->parsed()) return cmd_solve(solve_path, opts, solve_oracle);
    if (compare->parsed())
      return cmd_compare(cmp_n, cmp_c, cmp_theta, cmp_out, cmp_analyze, cmp_solve, cmp_oracle,
                         opts);
    if (gen->parsed()) return cmd_gen(gen_blocks, gen_seed, gen_out, gen_truth, opts);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const quasidiag::ToleranceBreakdown& e) {
    std::cerr << "tolerance breakdown: " << e.what() << "\n";
    return kExitBreakdown;
  } catch (const quasidiag::InvalidInput& e) {
    std::cerr << "invalid instance: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}
