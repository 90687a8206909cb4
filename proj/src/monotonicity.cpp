#include "gmopt/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "gmopt/lp.hpp"

namespace gmopt {

std::vector<GroundPoint> default_candidate_grid(const DiscreteMeasure& alpha) {
  const std::size_t dim = alpha.dimension();
  std::vector<std::set<double>> values(dim);
  for (const GroundPoint& z : alpha.points()) {
    for (std::size_t i = 0; i < dim; ++i) values[i].insert(z[i]);
  }
  std::vector<GroundPoint> grid;
  GroundPoint current(dim);
  std::vector<std::set<double>::const_iterator> odo(dim);
  for (std::size_t i = 0; i < dim; ++i) odo[i] = values[i].begin();
  while (true) {
    for (std::size_t i = 0; i < dim; ++i) current[i] = *odo[i];
    grid.push_back(current);
    std::size_t k = dim;
    while (k > 0) {
      --k;
      if (++odo[k] != values[k].end()) break;
      odo[k] = values[k].begin();
      if (k == 0) return grid;
    }
  }
}

std::optional<DiscreteMeasure> find_better_competitor(const CompetitorQuery& q) {
  if (q.alpha.size() == 0) {
    throw std::invalid_argument("competitor search needs a nonempty measure");
  }
  std::set<GroundPoint> candidate_set(q.candidate_points.begin(),
                                      q.candidate_points.end());
  for (const GroundPoint& z : q.alpha.points()) {
    if (candidate_set.find(z) == candidate_set.end()) {
      throw std::invalid_argument("candidate points must cover alpha's support");
    }
  }
  std::vector<GroundPoint> candidates(candidate_set.begin(), candidate_set.end());

  const Eigen::Index n = static_cast<Eigen::Index>(candidates.size());
  const Eigen::Index rows = static_cast<Eigen::Index>(q.family.size()) + 1;
  LinearProgram lp;
  lp.A.resize(rows, n);
  lp.b.resize(rows);
  lp.c.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const GroundPoint& z = candidates[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i + 1 < rows; ++i) {
      lp.A(i, j) = q.family.functions()[static_cast<std::size_t>(i)].value(z);
    }
    lp.A(rows - 1, j) = 1.0;
    lp.c(j) = q.cost.value(z);
  }
  for (Eigen::Index i = 0; i + 1 < rows; ++i) {
    lp.b(i) = evaluate_moment(q.family.functions()[static_cast<std::size_t>(i)], q.alpha);
  }
  lp.b(rows - 1) = q.alpha.total_mass();

  LpResult r = solve_lp(lp, q.lp_tols);
  if (r.status != LpStatus::Optimal) {
    throw std::runtime_error(
        "competitor LP did not solve although alpha itself is feasible");
  }
  double target = 0.0;
  for (std::size_t i = 0; i < q.alpha.size(); ++i) {
    target += q.alpha.masses()[i] * q.cost.value(q.alpha.points()[i]);
  }
  if (r.objective >= target - q.improvement_tol * (1.0 + std::abs(target))) {
    return std::nullopt;
  }
  std::vector<double> masses(candidates.size());
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    masses[j] = std::max(0.0, r.x(static_cast<Eigen::Index>(j)));
  }
  return DiscreteMeasure(candidates, masses);
}

namespace {

double measure_cost(const DiscreteMeasure& m, const CostSpec& cost) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    total += m.masses()[i] * cost.value(m.points()[i]);
  }
  return total;
}

/// Candidate grid for a sub-measure: per-axis values of its own support,
/// optionally widened to the full plan's per-axis values.
std::vector<GroundPoint> subset_candidates(const DiscreteMeasure& alpha,
                                           const TransportPlan& plan, bool extend) {
  if (!extend) return default_candidate_grid(alpha);
  const std::size_t dim = alpha.dimension();
  std::vector<std::set<double>> values(dim);
  for (const GroundPoint& z : alpha.points()) {
    for (std::size_t i = 0; i < dim; ++i) values[i].insert(z[i]);
  }
  for (const GroundPoint& z : plan.points()) {
    for (std::size_t i = 0; i < dim; ++i) values[i].insert(z[i]);
  }
  std::vector<GroundPoint> grid;
  GroundPoint current(dim);
  std::vector<std::size_t> odo(dim, 0);
  std::vector<std::vector<double>> lists(dim);
  for (std::size_t i = 0; i < dim; ++i) lists[i].assign(values[i].begin(), values[i].end());
  while (true) {
    for (std::size_t i = 0; i < dim; ++i) current[i] = lists[i][odo[i]];
    grid.push_back(current);
    std::size_t k = dim;
    while (k > 0) {
      --k;
      if (++odo[k] < lists[k].size()) break;
      odo[k] = 0;
      if (k == 0) return grid;
    }
  }
}

/// Number of nonempty subsets of size <= budget, saturating at cap.
std::size_t count_subsets(std::size_t s, std::size_t budget, std::size_t cap) {
  std::size_t total = 0;
  for (std::size_t k = 1; k <= budget && k <= s; ++k) {
    // C(s, k) incrementally; saturate to avoid overflow.
    std::size_t binom = 1;
    for (std::size_t i = 0; i < k; ++i) {
      if (binom > cap) break;
      binom = binom * (s - i) / (i + 1);
    }
    total += binom;
    if (total > cap) return cap + 1;
  }
  return total;
}

void run_query(const TransportPlan& plan, const CostSpec& cost,
               const ConstraintFamily& family, const std::vector<std::size_t>& subset,
               const FinitelyMinimalOptions& options, Verdict& verdict) {
  std::vector<GroundPoint> points;
  std::vector<double> masses;
  double total = 0.0;
  for (std::size_t idx : subset) {
    points.push_back(plan.points()[idx]);
    masses.push_back(plan.masses()[idx]);
    total += plan.masses()[idx];
  }
  if (total > 1.0) {
    // Bounded-mass normalization: sub-measures carry mass at most 1.
    for (double& m : masses) m /= total;
  }
  DiscreteMeasure alpha(points, masses);
  CompetitorQuery q{alpha,
                    subset_candidates(alpha, plan, options.extend_candidates_with_plan),
                    cost, family, options.improvement_tol, options.lp_tols};
  ++verdict.trials;
  auto better = find_better_competitor(q);
  if (better.has_value()) {
    verdict.status = Verdict::Status::Violated;
    verdict.witness_alpha = std::move(alpha);
    verdict.margin = measure_cost(*verdict.witness_alpha, cost) -
                     measure_cost(*better, cost);
    verdict.witness_competitor = std::move(better);
  }
}

}  // namespace

Verdict is_finitely_minimal(const TransportPlan& plan, const CostSpec& cost,
                            const ConstraintFamily& family,
                            const FinitelyMinimalOptions& options) {
  if (options.atom_budget < 2) {
    throw std::invalid_argument("atom budget must be at least 2");
  }
  if (plan.size() == 0) {
    throw std::invalid_argument("plan must be nonempty");
  }
  const std::size_t s = plan.size();
  const std::size_t budget = std::min(options.atom_budget, s);

  Verdict verdict;
  if (count_subsets(s, budget, options.exhaustive_limit) <= options.exhaustive_limit) {
    verdict.exhaustive = true;
    std::vector<std::size_t> subset;
    for (std::size_t k = 1; k <= budget; ++k) {
      subset.resize(k);
      std::iota(subset.begin(), subset.end(), 0);
      while (true) {
        run_query(plan, cost, family, subset, options, verdict);
        if (verdict.status == Verdict::Status::Violated) return verdict;
        // Advance the k-subset odometer.
        std::size_t i = k;
        while (i > 0 && subset[i - 1] == s - k + i - 1) --i;
        if (i == 0) break;
        ++subset[i - 1];
        for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
      }
    }
    return verdict;
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> size_dist(1, budget);
  std::vector<std::size_t> indices(s);
  std::iota(indices.begin(), indices.end(), 0);
  for (int t = 0; t < options.trials; ++t) {
    const std::size_t k = size_dist(rng);
    std::shuffle(indices.begin(), indices.end(), rng);
    std::vector<std::size_t> subset(indices.begin(),
                                    indices.begin() + static_cast<long>(k));
    std::sort(subset.begin(), subset.end());
    run_query(plan, cost, family, subset, options, verdict);
    if (verdict.status == Verdict::Status::Violated) return verdict;
  }
  return verdict;
}

Verdict check_cyclical_monotone(const std::vector<GroundPoint>& pairs,
                                const CostSpec& cost, double slack) {
  for (const GroundPoint& p : pairs) {
    if (p.size() != 2) {
      throw std::domain_error("cyclical monotonicity needs (x, y) pairs");
    }
  }
  std::set<GroundPoint> distinct(pairs.begin(), pairs.end());
  if (distinct.size() != pairs.size()) {
    throw std::invalid_argument("support pairs must be distinct");
  }

  Verdict verdict;
  // Bellman-Ford sees every cycle, so this verdict is always exhaustive.
  verdict.exhaustive = true;
  const std::size_t n = pairs.size();
  if (n < 2) return verdict;

  // w(p -> q): marginal cost of rerouting x_p to y_q.
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (std::size_t p = 0; p < n; ++p) {
    const double base = cost.value(pairs[p]);
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      w[p][q] = cost.value({pairs[p][0], pairs[q][1]}) - base;
    }
  }

  // Bellman-Ford from a virtual source connected to every node with weight 0.
  std::vector<double> dist(n, 0.0);
  std::vector<std::ptrdiff_t> parent(n, -1);
  for (std::size_t round = 0; round + 1 < n; ++round) {
    bool relaxed = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        if (p == q) continue;
        if (dist[p] + w[p][q] < dist[q] - 1e-15) {
          dist[q] = dist[p] + w[p][q];
          parent[q] = static_cast<std::ptrdiff_t>(p);
          relaxed = true;
        }
      }
    }
    if (!relaxed) break;
  }

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q || dist[p] + w[p][q] >= dist[q] - 1e-12) continue;
      // A still-relaxable edge witnesses a negative cycle upstream of q;
      // record it and walk n parent steps to land inside the cycle.
      parent[q] = static_cast<std::ptrdiff_t>(p);
      std::ptrdiff_t x = static_cast<std::ptrdiff_t>(q);
      bool broken = false;
      for (std::size_t step = 0; step < n; ++step) {
        x = parent[static_cast<std::size_t>(x)];
        if (x < 0) {
          broken = true;
          break;
        }
      }
      if (broken) continue;
      std::vector<std::size_t> cycle{static_cast<std::size_t>(x)};
      for (std::ptrdiff_t cur = parent[static_cast<std::size_t>(x)]; cur != x;
           cur = parent[static_cast<std::size_t>(cur)]) {
        if (cur < 0) {
          broken = true;
          break;
        }
        cycle.push_back(static_cast<std::size_t>(cur));
      }
      if (broken) continue;
      std::reverse(cycle.begin(), cycle.end());  // forward edge order
      double total = 0.0;
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        total += w[cycle[i]][cycle[(i + 1) % cycle.size()]];
      }
      if (total < -slack) {
        verdict.status = Verdict::Status::Violated;
        verdict.margin = -total;
        verdict.witness_cycle = std::move(cycle);
        return verdict;
      }
    }
  }
  return verdict;
}

std::pair<GroundPoint, GroundPoint> monotone_swap(const GroundPoint& f,
                                                  const GroundPoint& g,
                                                  const std::vector<std::size_t>& subset) {
  if (f.size() != g.size()) {
    throw std::invalid_argument("monotone_swap needs equal dimensions");
  }
  GroundPoint fp = f;
  GroundPoint gp = g;
  for (std::size_t i : subset) {
    if (i >= f.size()) {
      throw std::invalid_argument("monotone_swap subset index out of range");
    }
    fp[i] = std::max(f[i], g[i]);
    gp[i] = std::min(f[i], g[i]);
  }
  return {fp, gp};
}

}  // namespace gmopt
