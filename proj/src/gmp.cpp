#include "gmopt/gmp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gmopt {

ConcaveFn ConcaveFn::neg_square() {
  ConcaveFn h;
  h.kind_ = Kind::NegSquare;
  return h;
}

ConcaveFn ConcaveFn::neg_abs_p(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("neg_abs_p needs p in (0,1)");
  }
  ConcaveFn h;
  h.kind_ = Kind::NegAbsP;
  h.p_ = p;
  return h;
}

ConcaveFn ConcaveFn::log_shift(double kappa) {
  if (!std::isfinite(kappa)) {
    throw std::invalid_argument("log_shift needs a finite shift");
  }
  ConcaveFn h;
  h.kind_ = Kind::LogShift;
  h.kappa_ = kappa;
  return h;
}

ConcaveFn ConcaveFn::affine(double slope, double intercept) {
  if (!std::isfinite(slope) || !std::isfinite(intercept)) {
    throw std::invalid_argument("affine needs finite coefficients");
  }
  ConcaveFn h;
  h.kind_ = Kind::Affine;
  h.slope_ = slope;
  h.intercept_ = intercept;
  return h;
}

double ConcaveFn::operator()(double s) const {
  switch (kind_) {
    case Kind::NegSquare:
      return -s * s;
    case Kind::NegAbsP:
      return -std::pow(std::abs(s), 1.0 + p_);
    case Kind::LogShift: {
      const double shifted = s + kappa_;
      if (shifted <= 0.0) {
        throw std::domain_error("log_shift evaluated at s <= -kappa");
      }
      return std::log(shifted);
    }
    case Kind::Affine:
      return slope_ * s + intercept_;
  }
  return 0.0;
}

CostSpec CostSpec::tabulated(std::map<GroundPoint, double> table) {
  CostSpec c;
  c.kind_ = Kind::Tabulated;
  c.table_ = std::move(table);
  return c;
}

CostSpec CostSpec::expression(gmopt::Expression expr) {
  CostSpec c;
  c.kind_ = Kind::Expression;
  c.expr_ = std::make_shared<const gmopt::Expression>(std::move(expr));
  return c;
}

CostSpec CostSpec::concave_of_sum(ConcaveFn h, std::vector<double> weights) {
  if (weights.empty()) {
    throw std::invalid_argument("concave_of_sum needs at least one weight");
  }
  CostSpec c;
  c.kind_ = Kind::ConcaveOfSum;
  c.h_ = h;
  c.weights_ = std::move(weights);
  return c;
}

double CostSpec::value(const GroundPoint& z) const {
  double v = 0.0;
  switch (kind_) {
    case Kind::Tabulated: {
      auto it = table_.find(z);
      if (it == table_.end()) {
        throw std::out_of_range("cost undefined at a grid point");
      }
      v = it->second;
      break;
    }
    case Kind::Expression:
      v = expr_->evaluate(z);
      break;
    case Kind::ConcaveOfSum: {
      if (weights_.size() != z.size()) {
        throw std::domain_error("concave_of_sum weights must match the point dimension");
      }
      double s = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) s += weights_[i] * z[i];
      v = h_(s);
      break;
    }
  }
  if (!std::isfinite(v)) {
    throw std::domain_error("cost evaluated to a non-finite value");
  }
  return v;
}

GmpInstance build_instance(std::vector<GroundPoint> grid, CostSpec cost,
                           ConstraintFamily family) {
  if (grid.empty()) {
    throw std::invalid_argument("instance grid must be nonempty");
  }
  const std::size_t dim = grid.front().size();
  std::set<GroundPoint> seen;
  for (const GroundPoint& z : grid) {
    if (z.size() != dim || z.empty()) {
      throw std::invalid_argument("grid points must share one dimension >= 1");
    }
    if (!seen.insert(z).second) {
      throw std::invalid_argument("grid points must be distinct");
    }
  }
  for (const GroundPoint& z : grid) {
    try {
      (void)cost.value(z);
      for (const TestFunction& f : family.functions()) (void)f.value(z);
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string("instance invalid at a grid point: ") +
                                  e.what());
    }
  }
  return GmpInstance{std::move(grid), std::move(cost), std::move(family)};
}

LinearProgram assemble_lp(const GmpInstance& instance) {
  const Eigen::Index n = static_cast<Eigen::Index>(instance.grid.size());
  const Eigen::Index rows = static_cast<Eigen::Index>(instance.family.size()) + 1;
  LinearProgram lp;
  lp.A.resize(rows, n);
  lp.b = Eigen::VectorXd::Zero(rows);
  lp.c.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const GroundPoint& z = instance.grid[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i + 1 < rows; ++i) {
      lp.A(i, j) = instance.family.functions()[static_cast<std::size_t>(i)].value(z);
    }
    lp.A(rows - 1, j) = 1.0;
    lp.c(j) = instance.cost.value(z);
  }
  lp.b(rows - 1) = 1.0;
  return lp;
}

namespace {

TransportPlan plan_from_primal(const std::vector<GroundPoint>& grid,
                               const Eigen::VectorXd& x) {
  std::vector<double> masses(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    masses[j] = std::max(0.0, x(static_cast<Eigen::Index>(j)));
  }
  return TransportPlan(grid, masses);
}

double max_family_residual(const ConstraintFamily& family, const TransportPlan& plan) {
  double worst = 0.0;
  for (const TestFunction& f : family.functions()) {
    worst = std::max(worst, std::abs(evaluate_moment(f, plan)));
  }
  return worst;
}

/// Reconstructs per-axis marginals from MarginalIndicator centers and
/// reports consecutive pairs that fail convex order; martingale instances
/// are infeasible exactly in that case.
std::string infeasibility_diagnostic(const ConstraintFamily& family,
                                     const LpResult& lp_result,
                                     const Eigen::VectorXd& b) {
  std::ostringstream out;
  out << "infeasible: Farkas certificate with b'y = " << b.dot(lp_result.farkas);
  bool has_martingale = false;
  for (const TestFunction& f : family.functions()) {
    if (f.kind() == TestFunction::Kind::MartingaleIncrement) has_martingale = true;
  }
  if (!has_martingale) return out.str();

  std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_axis;
  for (const TestFunction& f : family.functions()) {
    if (f.kind() == TestFunction::Kind::MarginalIndicator) {
      by_axis[f.axis()].first.push_back(f.atom());
      by_axis[f.axis()].second.push_back(f.center());
    }
  }
  std::map<std::size_t, DiscreteDistribution> marginals;
  for (auto& [axis, lists] : by_axis) {
    double total = 0.0;
    for (double w : lists.second) total += w;
    if (std::abs(total - 1.0) < 1e-6) {
      marginals.emplace(axis, DiscreteDistribution(lists.first, lists.second));
    }
  }
  for (auto it = marginals.begin(); it != marginals.end(); ++it) {
    auto next = marginals.find(it->first + 1);
    if (next == marginals.end()) continue;
    if (!convex_order(it->second, next->second, 1e-9)) {
      out << "; marginals on axes " << it->first << " and " << it->first + 1
          << " are not in convex order";
    }
  }
  return out.str();
}

}  // namespace

Solution solve_gmp(const GmpInstance& instance, const LpTols& tols) {
  Solution sol;
  sol.lp = assemble_lp(instance);
  sol.lp_result = solve_lp(sol.lp, tols);
  sol.status = sol.lp_result.status;
  if (sol.status == LpStatus::Unbounded) {
    throw std::runtime_error(
        "moment problem reported unbounded; the feasible set should be compact");
  }
  if (sol.status == LpStatus::Infeasible) {
    sol.diagnostic = infeasibility_diagnostic(instance.family, sol.lp_result, sol.lp.b);
    return sol;
  }
  sol.plan = plan_from_primal(instance.grid, sol.lp_result.x);
  sol.objective = sol.lp_result.objective;
  sol.max_residual = max_family_residual(instance.family, sol.plan);
  return sol;
}

LexSolution solve_gmp_lexicographic(const GmpInstance& instance,
                                    const std::vector<CostSpec>& refinement_costs,
                                    const LpTols& tols) {
  const LinearProgram base = assemble_lp(instance);
  std::vector<Eigen::VectorXd> objectives;
  objectives.push_back(base.c);
  for (const CostSpec& cost : refinement_costs) {
    Eigen::VectorXd c(base.A.cols());
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      c(j) = cost.value(instance.grid[static_cast<std::size_t>(j)]);
    }
    objectives.push_back(c);
  }
  LexResult lex = lexicographic_solve(base.A, base.b, objectives, tols);

  LexSolution out;
  out.values = lex.values;
  out.stages = std::move(lex.stages);
  out.final.status = lex.status;
  if (lex.status == LpStatus::Unbounded) {
    throw std::runtime_error(
        "moment problem reported unbounded; the feasible set should be compact");
  }
  if (lex.status == LpStatus::Infeasible) {
    const LpResult& failed = out.stages.back().result;
    out.final.lp = out.stages.back().lp;
    out.final.lp_result = failed;
    if (out.stages.size() == 1) {
      out.final.diagnostic =
          infeasibility_diagnostic(instance.family, failed, out.final.lp.b);
    } else {
      out.final.diagnostic = "refinement stage " + std::to_string(out.stages.size() - 1) +
                             " reported infeasible";
    }
    return out;
  }
  out.final.lp = out.stages.back().lp;
  out.final.lp_result = out.stages.back().result;
  out.final.plan = plan_from_primal(instance.grid, lex.x);
  out.final.objective = objectives.front().dot(lex.x);
  out.final.max_residual = max_family_residual(instance.family, out.final.plan);
  return out;
}

std::vector<GroundPoint> product_grid(const std::vector<DiscreteDistribution>& marginals) {
  if (marginals.empty()) {
    throw std::invalid_argument("product_grid needs at least one marginal");
  }
  std::vector<GroundPoint> grid;
  std::size_t total = 1;
  for (const auto& m : marginals) total *= m.size();
  grid.reserve(total);
  std::vector<std::size_t> odo(marginals.size(), 0);
  while (true) {
    GroundPoint z(marginals.size());
    for (std::size_t i = 0; i < marginals.size(); ++i) z[i] = marginals[i].atoms()[odo[i]];
    grid.push_back(std::move(z));
    std::size_t k = marginals.size();
    while (k > 0) {
      --k;
      if (++odo[k] < marginals[k].size()) break;
      odo[k] = 0;
      if (k == 0) return grid;
    }
  }
}

}  // namespace gmopt
