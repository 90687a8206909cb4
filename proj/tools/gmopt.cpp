#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gmopt/constraints.hpp"
#include "gmopt/couplings.hpp"
#include "gmopt/gmp.hpp"
#include "gmopt/json_io.hpp"
#include "gmopt/lp.hpp"
#include "gmopt/measures.hpp"
#include "gmopt/monotonicity.hpp"
#include "gmopt/pass.hpp"

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
  if (path == "-") return json::parse(std::cin);
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  return json::parse(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(std::string("JSON schema: missing field \"") + key + "\"");
  }
  return j.at(key);
}

std::vector<gmopt::GroundPoint> points_from_json(const json& j) {
  return j.get<std::vector<gmopt::GroundPoint>>();
}

double measure_cost(const gmopt::DiscreteMeasure& m, const gmopt::CostSpec& cost) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    total += m.masses()[i] * cost.value(m.points()[i]);
  }
  return total;
}

/// Shape flag syntax: neg_square | neg_abs_p:p | log_shift:kappa | affine:a:b.
gmopt::ConcaveFn concave_from_flag(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string piece;
  while (std::getline(stream, piece, ':')) parts.push_back(piece);
  if (parts.size() == 1 && parts[0] == "neg_square") return gmopt::ConcaveFn::neg_square();
  if (parts.size() == 2 && parts[0] == "neg_abs_p") {
    return gmopt::ConcaveFn::neg_abs_p(std::stod(parts[1]));
  }
  if (parts.size() == 2 && parts[0] == "log_shift") {
    return gmopt::ConcaveFn::log_shift(std::stod(parts[1]));
  }
  if (parts.size() == 3 && parts[0] == "affine") {
    return gmopt::ConcaveFn::affine(std::stod(parts[1]), std::stod(parts[2]));
  }
  throw std::invalid_argument("unknown concave shape: " + text +
                              " (expected neg_square, neg_abs_p:p, log_shift:kappa, affine:a:b)");
}

/// Marginal family JSON: {"horizon": T, "marginals": [{"t", "atoms", "weights"}, ...]}.
gmopt::MarginalFamily marginal_family_from_json(const json& j) {
  std::vector<double> times;
  std::vector<gmopt::DiscreteDistribution> marginals;
  for (const json& entry : require(j, "marginals")) {
    times.push_back(require(entry, "t").get<double>());
    marginals.push_back(gmopt::distribution_from_json(entry));
  }
  return gmopt::MarginalFamily(std::move(times), std::move(marginals),
                               require(j, "horizon").get<double>());
}

int run_solve(const std::string& input, const std::string& output, const gmopt::LpTols& tols) {
  gmopt::GmpInstance instance = gmopt::instance_from_json(read_json(input));
  gmopt::Solution solution = gmopt::solve_gmp(instance, tols);
  write_json(output, gmopt::solution_to_json(solution));
  if (solution.status == gmopt::LpStatus::Optimal) return 0;
  std::cerr << (solution.diagnostic.empty() ? "infeasible" : solution.diagnostic) << "\n";
  return 1;
}

int run_check_monotone(const json& j, const std::string& output, double slack) {
  gmopt::CostSpec cost = gmopt::cost_from_json(require(j, "cost"));
  std::vector<gmopt::GroundPoint> pairs;
  if (j.contains("plan")) {
    pairs = gmopt::measure_from_json(j.at("plan")).points();
  } else if (j.contains("points")) {
    pairs = points_from_json(j.at("points"));
  } else {
    throw std::invalid_argument("JSON schema: check-monotone input needs \"points\" or \"plan\"");
  }
  gmopt::Verdict verdict = gmopt::check_cyclical_monotone(pairs, cost, slack);
  write_json(output, gmopt::verdict_to_json(verdict));
  return verdict.status == gmopt::Verdict::Status::Certified ? 0 : 1;
}

struct SearchOptions {
  gmopt::LpTols tols{};
  double improve_tol = 1e-9;
  std::size_t atom_budget = 4;
  int trials = 200;
  std::uint64_t seed = 1;
  bool extend_candidates = false;
  std::size_t exhaustive_limit = 10000;
};

int run_competitor_search(const json& j, const std::string& output, const SearchOptions& opt) {
  gmopt::CostSpec cost = gmopt::cost_from_json(require(j, "cost"));
  if (j.contains("alpha")) {
    gmopt::DiscreteMeasure alpha = gmopt::measure_from_json(j.at("alpha"));
    std::vector<gmopt::GroundPoint> candidates = j.contains("candidates")
                                                     ? points_from_json(j.at("candidates"))
                                                     : gmopt::default_candidate_grid(alpha);
    gmopt::ConstraintFamily family = gmopt::family_from_json(require(j, "family"), candidates);
    gmopt::CompetitorQuery query{alpha, std::move(candidates), cost, std::move(family),
                                 opt.improve_tol, opt.tols};
    std::optional<gmopt::DiscreteMeasure> better = gmopt::find_better_competitor(query);
    json out{{"improved", better.has_value()}, {"alpha_cost", measure_cost(alpha, cost)}};
    if (better.has_value()) {
      out["competitor"] = gmopt::measure_to_json(*better);
      out["competitor_cost"] = measure_cost(*better, cost);
    }
    write_json(output, out);
    return better.has_value() ? 1 : 0;
  }
  if (!j.contains("plan")) {
    throw std::invalid_argument("JSON schema: competitor-search input needs \"alpha\" or \"plan\"");
  }
  gmopt::TransportPlan plan = gmopt::measure_from_json(j.at("plan"));
  std::vector<gmopt::GroundPoint> grid =
      j.contains("grid") ? points_from_json(j.at("grid")) : plan.points();
  gmopt::ConstraintFamily family = gmopt::family_from_json(require(j, "family"), grid);
  gmopt::FinitelyMinimalOptions options;
  options.atom_budget = opt.atom_budget;
  options.trials = opt.trials;
  options.seed = opt.seed;
  options.improvement_tol = opt.improve_tol;
  options.extend_candidates_with_plan = opt.extend_candidates;
  options.exhaustive_limit = opt.exhaustive_limit;
  options.lp_tols = opt.tols;
  gmopt::Verdict verdict = gmopt::is_finitely_minimal(plan, cost, family, options);
  write_json(output, gmopt::verdict_to_json(verdict));
  return verdict.status == gmopt::Verdict::Status::Certified ? 0 : 1;
}

int run_quantile_coupling(const json& j, const std::string& output, std::size_t stratified,
                          bool csv) {
  gmopt::QuantilePlanSpec spec;
  for (const json& m : require(j, "marginals")) {
    spec.marginals.push_back(gmopt::distribution_from_json(m));
  }
  if (stratified > 0) {
    spec.levels = gmopt::stratified_levels(stratified);
  } else if (j.contains("levels")) {
    for (const json& level : j.at("levels")) {
      spec.levels.push_back(
          {require(level, "u").get<double>(), require(level, "weight").get<double>()});
    }
  }
  gmopt::TransportPlan plan = gmopt::quantile_coupling(spec);
  if (csv) {
    write_text(output, gmopt::plan_to_csv(plan));
  } else {
    write_json(output, gmopt::measure_to_json(plan));
  }
  return 0;
}

int run_pass_demo(const gmopt::MarginalFamily& family, int depth, std::size_t levels,
                  const gmopt::ConcaveFn& h, const std::string& output,
                  const gmopt::LpTols& tols) {
  if (depth < 1) throw std::invalid_argument("pass-demo depth must be at least 1");
  std::ostringstream csv;
  csv << "n,quantile_cost,lp_cost,gap\n";
  for (int n = 1; n <= depth; ++n) {
    gmopt::Partition part = gmopt::dyadic_partitions(family.horizon(), n);
    gmopt::PathPlan plan = gmopt::continuum_quantile_plan(family, part, levels);
    const double quantile_cost = gmopt::pass_cost(plan, part, h);
    csv << n << "," << json(quantile_cost).dump() << ",";
    std::size_t grid_size = 1;
    bool affordable = true;
    for (std::size_t i = 1; i < part.points().size() && affordable; ++i) {
      grid_size *= family.at(part.points()[i]).size();
      affordable = grid_size <= 10000;
    }
    if (affordable) {
      gmopt::CompareReport report = gmopt::compare_with_lp(family, part, h, tols);
      // Gap against the printed quantile column, which may use stratified levels.
      csv << json(report.lp_objective).dump() << ","
          << json(std::abs(quantile_cost - report.lp_objective)).dump() << "\n";
    } else {
      csv << ",\n";
    }
  }
  write_text(output, csv.str());
  return 0;
}

int run_mot(const json& j, const std::string& output, const gmopt::LpTols& tols) {
  std::vector<std::vector<double>> axes = require(j, "axes").get<std::vector<std::vector<double>>>();
  if (axes.empty()) throw std::invalid_argument("JSON schema: mot needs at least one axis");
  for (std::vector<double>& axis : axes) {
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    if (axis.empty()) throw std::invalid_argument("JSON schema: mot axes must be nonempty");
  }

  std::vector<gmopt::GroundPoint> grid;
  std::vector<std::size_t> index(axes.size(), 0);
  while (true) {
    gmopt::GroundPoint z(axes.size());
    for (std::size_t k = 0; k < axes.size(); ++k) z[k] = axes[k][index[k]];
    grid.push_back(std::move(z));
    std::size_t k = axes.size();
    while (k > 0 && ++index[k - 1] == axes[k - 1].size()) index[--k] = 0;
    if (k == 0) break;
  }

  // Martingale increments plus whichever marginals the input pins. A pinned
  // law's weights sum to 1, so unlisted axis values carry zero mass for free.
  std::vector<gmopt::TestFunction> functions;
  const gmopt::ConstraintFamily increments = gmopt::martingale_family(grid);
  for (const gmopt::TestFunction& f : increments.functions()) functions.push_back(f);
  if (j.contains("marginals")) {
    std::set<std::size_t> pinned;
    for (const json& entry : j.at("marginals")) {
      const std::size_t axis = require(entry, "axis").get<std::size_t>();
      if (axis >= axes.size()) throw std::invalid_argument("mot marginal axis out of range");
      if (!pinned.insert(axis).second) {
        throw std::invalid_argument("mot pins the same axis twice");
      }
      gmopt::DiscreteDistribution dist = gmopt::distribution_from_json(entry);
      for (std::size_t k = 0; k < dist.size(); ++k) {
        if (!std::binary_search(axes[axis].begin(), axes[axis].end(), dist.atoms()[k])) {
          throw std::invalid_argument("mot marginal atom missing from its axis");
        }
        functions.push_back(
            gmopt::TestFunction::marginal_indicator(axis, dist.atoms()[k], dist.weights()[k]));
      }
    }
  }
  gmopt::ConstraintFamily family(std::move(functions));
  gmopt::CostSpec cost = gmopt::cost_from_json(require(j, "cost"));

  gmopt::Solution lower = gmopt::solve_gmp(gmopt::build_instance(grid, cost, family), tols);
  json out;
  out["minimizing"] = gmopt::solution_to_json(lower);
  if (lower.status != gmopt::LpStatus::Optimal) {
    write_json(output, out);
    std::cerr << (lower.diagnostic.empty() ? "infeasible" : lower.diagnostic) << "\n";
    return 1;
  }

  // The maximum rides the same feasible set with the sign flipped.
  std::map<gmopt::GroundPoint, double> negated;
  for (const gmopt::GroundPoint& z : grid) negated[z] = -cost.value(z);
  gmopt::Solution upper = gmopt::solve_gmp(
      gmopt::build_instance(grid, gmopt::CostSpec::tabulated(std::move(negated)), family), tols);
  if (upper.status != gmopt::LpStatus::Optimal) {
    throw std::runtime_error("mot maximization failed on a nonempty feasible set");
  }
  out["maximizing"] = gmopt::solution_to_json(upper);
  out["lower_value"] = lower.objective;
  out["upper_value"] = -upper.objective;
  write_json(output, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete generalized moment problems: LP solves, optimality certificates, "
               "quantile couplings"};
  app.require_subcommand(1);

  std::string input = "-";
  std::string output = "-";
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  double improve_tol = 1e-9;
  double cycle_slack = 1e-10;

  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("-o,--output", output, "Output file, - for stdout");
  };
  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("input", input, "Input JSON file, - for stdin")->required();
    add_output(cmd);
  };
  auto add_lp_tols = [&](CLI::App* cmd) {
    cmd->add_option("--feas-tol", feas_tol, "LP feasibility tolerance");
    cmd->add_option("--opt-tol", opt_tol, "LP optimality tolerance");
  };

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "Solve a moment-problem instance and emit the certified solution");
  add_input(solve_cmd);
  add_lp_tols(solve_cmd);

  CLI::App* mono_cmd =
      app.add_subcommand("check-monotone", "Check c-cyclical monotonicity of support pairs");
  add_input(mono_cmd);
  mono_cmd->add_option("--max-cycle-slack", cycle_slack,
                       "Tolerated rerouting gain before a cycle counts as a violation");

  CLI::App* search_cmd = app.add_subcommand(
      "competitor-search", "Single competitor query (alpha) or finite-minimality sweep (plan)");
  add_input(search_cmd);
  add_lp_tols(search_cmd);
  SearchOptions search;
  search_cmd->add_option("--improve-tol", improve_tol,
                         "Relative improvement a competitor must beat");
  search_cmd->add_option("--atom-budget", search.atom_budget,
                         "Sub-measure support size k for the sweep");
  search_cmd->add_option("--trials", search.trials, "Random trials when not exhaustive");
  search_cmd->add_option("--seed", search.seed, "Random-trial seed");
  search_cmd->add_flag("--extend-candidates", search.extend_candidates,
                       "Widen candidate axes from the sub-measure to the whole plan");
  search_cmd->add_option("--exhaustive-limit", search.exhaustive_limit,
                         "Subset-count ceiling for exhaustive sweeps");

  CLI::App* quant_cmd =
      app.add_subcommand("quantile-coupling", "Construct the comonotone quantile coupling");
  add_input(quant_cmd);
  std::size_t stratified = 0;
  bool csv = false;
  quant_cmd->add_option("--stratified", stratified,
                        "Use m stratified levels instead of the input or breakpoint levels");
  quant_cmd->add_flag("--csv", csv, "Emit the plan as CSV instead of JSON");

  CLI::App* pass_cmd =
      app.add_subcommand("pass-demo", "Pass-problem convergence table across dyadic depths");
  // Long-form help only: the short -h would shadow the --h shape flag.
  pass_cmd->set_help_flag("--help", "Print this help message and exit");
  add_output(pass_cmd);
  add_lp_tols(pass_cmd);
  std::string family_path;
  int depth = 5;
  std::size_t levels = 0;
  std::string h_flag = "neg_square";
  pass_cmd->add_option("--family", family_path, "Marginal family JSON file")->required();
  pass_cmd->add_option("--depth", depth, "Finest dyadic depth");
  pass_cmd->add_option("--levels", levels, "Stratified level count; 0 selects breakpoint levels");
  pass_cmd->add_option("--h,--shape", h_flag,
                       "Concave shape: neg_square, neg_abs_p:p, log_shift:kappa, affine:a:b");

  CLI::App* mot_cmd =
      app.add_subcommand("mot", "Martingale transport price bounds: minimum and maximum");
  add_input(mot_cmd);
  add_lp_tols(mot_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const gmopt::LpTols tols{feas_tol, opt_tol};
    search.tols = tols;
    search.improve_tol = improve_tol;
    if (*solve_cmd) return run_solve(input, output, tols);
    if (*mono_cmd) return run_check_monotone(read_json(input), output, cycle_slack);
    if (*search_cmd) return run_competitor_search(read_json(input), output, search);
    if (*quant_cmd) return run_quantile_coupling(read_json(input), output, stratified, csv);
    if (*pass_cmd) {
      return run_pass_demo(marginal_family_from_json(read_json(family_path)), depth, levels,
                           concave_from_flag(h_flag), output, tols);
    }
    if (*mot_cmd) return run_mot(read_json(input), output, tols);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
