#include "gmopt/json_io.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace gmopt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("JSON schema: " + what);
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(std::string("missing key \"") + key + "\"");
  }
  return j.at(key);
}

std::vector<double> reals_from_json(const json& j) {
  if (!j.is_array()) fail("expected an array of numbers");
  std::vector<double> values;
  values.reserve(j.size());
  for (const json& v : j) {
    if (!v.is_number()) fail("expected a number");
    values.push_back(v.get<double>());
  }
  return values;
}

std::vector<GroundPoint> points_from_json(const json& j) {
  if (!j.is_array()) fail("expected an array of points");
  std::vector<GroundPoint> points;
  points.reserve(j.size());
  for (const json& p : j) points.push_back(reals_from_json(p));
  return points;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  std::vector<double> values = reals_from_json(j);
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = values[i];
  }
  return v;
}

std::map<GroundPoint, double> table_from_json(const json& j) {
  std::vector<GroundPoint> points = points_from_json(field(j, "points"));
  std::vector<double> values = reals_from_json(field(j, "values"));
  if (points.size() != values.size()) {
    fail("table needs one value per point");
  }
  std::map<GroundPoint, double> table;
  for (std::size_t i = 0; i < points.size(); ++i) table[points[i]] = values[i];
  return table;
}

json table_to_json(const std::map<GroundPoint, double>& table) {
  json points = json::array();
  json values = json::array();
  for (const auto& [z, v] : table) {
    points.push_back(z);
    values.push_back(v);
  }
  return json{{"points", std::move(points)}, {"values", std::move(values)}};
}

const char* status_name(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "optimal";
}

LpStatus status_from_name(const std::string& name) {
  if (name == "optimal") return LpStatus::Optimal;
  if (name == "infeasible") return LpStatus::Infeasible;
  if (name == "unbounded") return LpStatus::Unbounded;
  fail("unknown status \"" + name + "\"");
}

}  // namespace

json distribution_to_json(const DiscreteDistribution& d) {
  return json{{"atoms", d.atoms()}, {"weights", d.weights()}};
}

DiscreteDistribution distribution_from_json(const json& j) {
  return DiscreteDistribution(reals_from_json(field(j, "atoms")),
                              reals_from_json(field(j, "weights")));
}

json measure_to_json(const DiscreteMeasure& m) {
  json points = json::array();
  for (const GroundPoint& z : m.points()) points.push_back(z);
  return json{{"points", std::move(points)}, {"masses", m.masses()}};
}

DiscreteMeasure measure_from_json(const json& j) {
  return DiscreteMeasure(points_from_json(field(j, "points")),
                         reals_from_json(field(j, "masses")));
}

json test_function_to_json(const TestFunction& f) {
  switch (f.kind()) {
    case TestFunction::Kind::MarginalIndicator:
      return json{{"kind", "marginal_indicator"},
                  {"axis", f.axis()},
                  {"atom", f.atom()},
                  {"center", f.center()}};
    case TestFunction::Kind::MartingaleIncrement:
      return json{{"kind", "martingale_increment"},
                  {"level", f.level()},
                  {"prefix", f.prefix()}};
    case TestFunction::Kind::Tabulated: {
      json t = table_to_json(f.table());
      t["kind"] = "tabulated";
      t["center"] = f.center();
      return t;
    }
    case TestFunction::Kind::Expression:
      return json{{"kind", "expression"},
                  {"source", f.expr().source()},
                  {"center", f.center()}};
  }
  fail("unreachable test-function kind");
}

TestFunction test_function_from_json(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "marginal_indicator") {
    return TestFunction::marginal_indicator(field(j, "axis").get<std::size_t>(),
                                            field(j, "atom").get<double>(),
                                            field(j, "center").get<double>());
  }
  if (kind == "martingale_increment") {
    return TestFunction::martingale_increment(field(j, "level").get<std::size_t>(),
                                              reals_from_json(field(j, "prefix")));
  }
  if (kind == "tabulated") {
    return TestFunction::tabulated(table_from_json(j),
                                   field(j, "center").get<double>());
  }
  if (kind == "expression") {
    return TestFunction::expression(
        Expression::parse(field(j, "source").get<std::string>()),
        field(j, "center").get<double>());
  }
  fail("unknown test-function kind \"" + kind + "\"");
}

json family_to_json(const ConstraintFamily& family) {
  json functions = json::array();
  for (const TestFunction& f : family.functions()) {
    functions.push_back(test_function_to_json(f));
  }
  if (!family.has_growth_table()) return functions;
  return json{{"functions", std::move(functions)},
              {"growth_bound", table_to_json(family.growth_table())}};
}

ConstraintFamily family_from_json(const json& j, const std::vector<GroundPoint>& grid) {
  const json* entries = &j;
  const json* growth = nullptr;
  if (j.is_object()) {
    entries = &field(j, "functions");
    if (j.contains("growth_bound")) growth = &j.at("growth_bound");
  }
  if (!entries->is_array()) fail("a family is an array of functions");

  std::vector<TestFunction> functions;
  for (const json& entry : *entries) {
    const std::string kind = field(entry, "kind").get<std::string>();
    if (kind == "multi_marginal") {
      std::vector<DiscreteDistribution> marginals;
      for (const json& m : field(entry, "marginals")) {
        marginals.push_back(distribution_from_json(m));
      }
      const ConstraintFamily expanded = multi_marginal_family(marginals, grid);
      for (const TestFunction& f : expanded.functions()) functions.push_back(f);
    } else if (kind == "martingale") {
      const ConstraintFamily expanded = martingale_family(grid);
      for (const TestFunction& f : expanded.functions()) functions.push_back(f);
    } else {
      functions.push_back(test_function_from_json(entry));
    }
  }
  if (growth == nullptr) return ConstraintFamily(std::move(functions));
  return ConstraintFamily(std::move(functions), table_from_json(*growth));
}

json concave_fn_to_json(const ConcaveFn& h) {
  switch (h.kind()) {
    case ConcaveFn::Kind::NegSquare:
      return json{{"name", "neg_square"}};
    case ConcaveFn::Kind::NegAbsP:
      return json{{"name", "neg_abs_p"}, {"p", h.p()}};
    case ConcaveFn::Kind::LogShift:
      return json{{"name", "log_shift"}, {"kappa", h.kappa()}};
    case ConcaveFn::Kind::Affine:
      return json{{"name", "affine"}, {"slope", h.slope()}, {"intercept", h.intercept()}};
  }
  fail("unreachable concave profile");
}

ConcaveFn concave_fn_from_json(const json& j) {
  const std::string name = field(j, "name").get<std::string>();
  if (name == "neg_square") return ConcaveFn::neg_square();
  if (name == "neg_abs_p") return ConcaveFn::neg_abs_p(field(j, "p").get<double>());
  if (name == "log_shift") return ConcaveFn::log_shift(field(j, "kappa").get<double>());
  if (name == "affine") {
    return ConcaveFn::affine(field(j, "slope").get<double>(),
                             field(j, "intercept").get<double>());
  }
  fail("unknown concave profile \"" + name + "\"");
}

json cost_to_json(const CostSpec& cost) {
  switch (cost.kind()) {
    case CostSpec::Kind::Tabulated: {
      json t = table_to_json(cost.table());
      t["kind"] = "tabulated";
      return t;
    }
    case CostSpec::Kind::Expression:
      return json{{"kind", "expression"}, {"source", cost.expr().source()}};
    case CostSpec::Kind::ConcaveOfSum:
      return json{{"kind", "concave_of_sum"},
                  {"h", concave_fn_to_json(cost.h())},
                  {"weights", cost.weights()}};
  }
  fail("unreachable cost kind");
}

CostSpec cost_from_json(const json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "tabulated") return CostSpec::tabulated(table_from_json(j));
  if (kind == "expression") {
    return CostSpec::expression(
        Expression::parse(field(j, "source").get<std::string>()));
  }
  if (kind == "concave_of_sum") {
    return CostSpec::concave_of_sum(concave_fn_from_json(field(j, "h")),
                                    reals_from_json(field(j, "weights")));
  }
  fail("unknown cost kind \"" + kind + "\"");
}

json instance_to_json(const GmpInstance& instance) {
  json grid = json::array();
  for (const GroundPoint& z : instance.grid) grid.push_back(z);
  return json{{"grid", std::move(grid)},
              {"cost", cost_to_json(instance.cost)},
              {"family", family_to_json(instance.family)}};
}

GmpInstance instance_from_json(const json& j) {
  std::vector<GroundPoint> grid = points_from_json(field(j, "grid"));
  CostSpec cost = cost_from_json(field(j, "cost"));
  ConstraintFamily family = family_from_json(field(j, "family"), grid);
  return build_instance(std::move(grid), std::move(cost), std::move(family));
}

json lp_to_json(const LinearProgram& lp) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < lp.A.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < lp.A.cols(); ++k) row.push_back(lp.A(i, k));
    rows.push_back(std::move(row));
  }
  return json{{"A", std::move(rows)},
              {"b", vector_to_json(lp.b)},
              {"c", vector_to_json(lp.c)}};
}

LinearProgram lp_from_json(const json& j) {
  const json& rows = field(j, "A");
  if (!rows.is_array()) fail("A must be an array of rows");
  LinearProgram lp;
  lp.b = vector_from_json(field(j, "b"));
  lp.c = vector_from_json(field(j, "c"));
  lp.A.resize(static_cast<Eigen::Index>(rows.size()), lp.c.size());
  for (Eigen::Index i = 0; i < lp.A.rows(); ++i) {
    std::vector<double> row = reals_from_json(rows.at(static_cast<std::size_t>(i)));
    if (static_cast<Eigen::Index>(row.size()) != lp.A.cols()) {
      fail("ragged LP row");
    }
    for (Eigen::Index k = 0; k < lp.A.cols(); ++k) {
      lp.A(i, k) = row[static_cast<std::size_t>(k)];
    }
  }
  return lp;
}

json lp_result_to_json(const LpResult& result) {
  return json{{"status", status_name(result.status)},
              {"x", vector_to_json(result.x)},
              {"objective", result.objective},
              {"y", vector_to_json(result.y)},
              {"basis", result.basis},
              {"farkas", vector_to_json(result.farkas)},
              {"iterations", result.iterations}};
}

LpResult lp_result_from_json(const json& j) {
  LpResult result;
  result.status = status_from_name(field(j, "status").get<std::string>());
  result.x = vector_from_json(field(j, "x"));
  result.objective = field(j, "objective").get<double>();
  result.y = vector_from_json(field(j, "y"));
  result.basis = field(j, "basis").get<std::vector<int>>();
  result.farkas = vector_from_json(field(j, "farkas"));
  result.iterations = field(j, "iterations").get<int>();
  return result;
}

json solution_to_json(const Solution& solution) {
  json j{{"status", status_name(solution.status)},
         {"objective", solution.objective},
         {"plan", measure_to_json(solution.plan)},
         {"max_residual", solution.max_residual},
         {"diagnostic", solution.diagnostic},
         {"lp", lp_to_json(solution.lp)},
         {"lp_result", lp_result_to_json(solution.lp_result)}};
  if (solution.status == LpStatus::Optimal) {
    CertificateReport cert = verify_certificate(solution.lp, solution.lp_result);
    j["certificate"] = json{{"pass", cert.pass},
                            {"primal_residual", cert.primal_residual},
                            {"lower_violation", cert.lower_violation},
                            {"dual_violation", cert.dual_violation},
                            {"complementarity", cert.complementarity},
                            {"duality_gap", cert.duality_gap}};
  }
  return j;
}

Solution solution_from_json(const json& j) {
  Solution solution;
  solution.status = status_from_name(field(j, "status").get<std::string>());
  solution.objective = field(j, "objective").get<double>();
  solution.plan = measure_from_json(field(j, "plan"));
  solution.max_residual = field(j, "max_residual").get<double>();
  solution.diagnostic = field(j, "diagnostic").get<std::string>();
  solution.lp = lp_from_json(field(j, "lp"));
  solution.lp_result = lp_result_from_json(field(j, "lp_result"));
  return solution;
}

json verdict_to_json(const Verdict& verdict) {
  json j{{"status",
          verdict.status == Verdict::Status::Certified ? "certified" : "violated"},
         {"margin", verdict.margin},
         {"trials", verdict.trials},
         {"exhaustive", verdict.exhaustive}};
  if (verdict.witness_alpha.has_value()) {
    j["witness_alpha"] = measure_to_json(*verdict.witness_alpha);
  }
  if (verdict.witness_competitor.has_value()) {
    j["witness_competitor"] = measure_to_json(*verdict.witness_competitor);
  }
  if (!verdict.witness_cycle.empty()) j["cycle"] = verdict.witness_cycle;
  return j;
}

std::string plan_to_csv(const TransportPlan& plan) {
  std::ostringstream out;
  const std::size_t dim = plan.size() > 0 ? plan.dimension() : 0;
  for (std::size_t k = 0; k < dim; ++k) out << "x" << (k + 1) << ",";
  out << "mass\n";
  for (std::size_t i = 0; i < plan.size(); ++i) {
    for (double v : plan.points()[i]) out << json(v).dump() << ",";
    out << json(plan.masses()[i]).dump() << "\n";
  }
  return out.str();
}

}  // namespace gmopt
