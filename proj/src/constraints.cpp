#include "gmopt/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace gmopt {

TestFunction TestFunction::marginal_indicator(std::size_t axis, double atom,
                                              double center) {
  TestFunction f;
  f.kind_ = Kind::MarginalIndicator;
  f.axis_ = axis;
  f.atom_ = atom;
  f.center_ = center;
  return f;
}

TestFunction TestFunction::martingale_increment(std::size_t level,
                                                std::vector<double> prefix) {
  if (level == 0 || prefix.size() != level) {
    throw std::invalid_argument("martingale increment needs a prefix of length level >= 1");
  }
  TestFunction f;
  f.kind_ = Kind::MartingaleIncrement;
  f.level_ = level;
  f.prefix_ = std::move(prefix);
  f.center_ = 0.0;
  return f;
}

TestFunction TestFunction::tabulated(std::map<GroundPoint, double> table, double center) {
  TestFunction f;
  f.kind_ = Kind::Tabulated;
  f.table_ = std::move(table);
  f.center_ = center;
  return f;
}

TestFunction TestFunction::expression(gmopt::Expression expr, double center) {
  TestFunction f;
  f.kind_ = Kind::Expression;
  f.expr_ = std::make_shared<const gmopt::Expression>(std::move(expr));
  f.center_ = center;
  return f;
}

double TestFunction::value(const GroundPoint& z) const {
  double raw = 0.0;
  switch (kind_) {
    case Kind::MarginalIndicator:
      if (axis_ >= z.size()) {
        throw std::domain_error("marginal indicator axis exceeds point dimension");
      }
      raw = (z[axis_] == atom_) ? 1.0 : 0.0;
      break;
    case Kind::MartingaleIncrement: {
      if (level_ + 1 > z.size()) {
        throw std::domain_error("martingale increment level exceeds point dimension");
      }
      bool match = true;
      for (std::size_t i = 0; i < level_; ++i) {
        if (z[i] != prefix_[i]) {
          match = false;
          break;
        }
      }
      raw = match ? z[level_] - z[level_ - 1] : 0.0;
      break;
    }
    case Kind::Tabulated: {
      auto it = table_.find(z);
      if (it == table_.end()) {
        throw std::out_of_range("tabulated test function undefined at the queried point");
      }
      raw = it->second;
      break;
    }
    case Kind::Expression:
      raw = expr_->evaluate(z);
      break;
  }
  return raw - center_;
}

ConstraintFamily::ConstraintFamily(std::vector<TestFunction> functions)
    : functions_(std::move(functions)) {}

ConstraintFamily::ConstraintFamily(std::vector<TestFunction> functions,
                                   std::map<GroundPoint, double> growth_bound)
    : functions_(std::move(functions)),
      growth_table_(std::move(growth_bound)),
      has_growth_table_(true) {
  for (const auto& [z, g] : growth_table_) {
    if (!(g >= 0.0)) {
      throw std::invalid_argument("growth bound must be nonnegative");
    }
  }
}

double ConstraintFamily::growth_bound(const GroundPoint& z) const {
  if (!has_growth_table_) return 1.0;
  auto it = growth_table_.find(z);
  if (it == growth_table_.end()) {
    throw std::out_of_range("growth bound not tabulated at the queried point");
  }
  return it->second;
}

ConstraintFamily merge(const ConstraintFamily& a, const ConstraintFamily& b) {
  std::vector<TestFunction> fs = a.functions();
  fs.insert(fs.end(), b.functions().begin(), b.functions().end());
  if (a.has_growth_table() && b.has_growth_table()) {
    throw std::invalid_argument("merging two families with growth tables is ambiguous");
  }
  if (a.has_growth_table()) return ConstraintFamily(std::move(fs), a.growth_table());
  if (b.has_growth_table()) return ConstraintFamily(std::move(fs), b.growth_table());
  return ConstraintFamily(std::move(fs));
}

ConstraintFamily multi_marginal_family(const std::vector<DiscreteDistribution>& marginals,
                                       const std::vector<GroundPoint>& grid) {
  if (marginals.empty()) {
    throw std::invalid_argument("multi_marginal_family needs at least one marginal");
  }
  for (const GroundPoint& z : grid) {
    if (z.size() != marginals.size()) {
      throw std::invalid_argument("grid dimension must equal the number of marginals");
    }
    for (std::size_t i = 0; i < marginals.size(); ++i) {
      const auto& atoms = marginals[i].atoms();
      if (!std::binary_search(atoms.begin(), atoms.end(), z[i])) {
        throw std::invalid_argument("grid coordinate on axis " + std::to_string(i) +
                                    " lies outside the marginal support");
      }
    }
  }
  std::vector<TestFunction> fs;
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    for (std::size_t a = 0; a < marginals[i].size(); ++a) {
      fs.push_back(TestFunction::marginal_indicator(i, marginals[i].atoms()[a],
                                                    marginals[i].weights()[a]));
    }
  }
  return ConstraintFamily(std::move(fs));
}

ConstraintFamily martingale_family(const std::vector<GroundPoint>& grid) {
  if (grid.empty()) {
    throw std::invalid_argument("martingale_family needs a nonempty grid");
  }
  const std::size_t n = grid.front().size();
  for (const GroundPoint& z : grid) {
    if (z.size() != n) {
      throw std::invalid_argument("grid points must have equal dimension");
    }
  }
  if (n < 2) {
    throw std::invalid_argument("martingale_family needs dimension >= 2");
  }
  std::vector<TestFunction> fs;
  for (std::size_t level = 1; level + 1 <= n; ++level) {
    std::set<std::vector<double>> prefixes;
    for (const GroundPoint& z : grid) {
      prefixes.insert(std::vector<double>(z.begin(), z.begin() + static_cast<long>(level)));
    }
    for (const auto& p : prefixes) {
      fs.push_back(TestFunction::martingale_increment(level, p));
    }
  }
  return ConstraintFamily(std::move(fs));
}

double evaluate_moment(const TestFunction& f, const DiscreteMeasure& m) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    total += m.masses()[i] * f.value(m.points()[i]);
  }
  return total;
}

GrowthBoundReport validate_growth_bound(const ConstraintFamily& family,
                                        const std::vector<GroundPoint>& grid) {
  GrowthBoundReport report;
  report.ok = true;
  for (std::size_t k = 0; k < family.size(); ++k) {
    GrowthBoundEntry entry{k, 0.0, true};
    for (const GroundPoint& z : grid) {
      const double fz = std::abs(family.functions()[k].value(z));
      const double gz = family.growth_bound(z);
      if (gz == 0.0) {
        if (fz != 0.0) entry.defined = false;
        continue;
      }
      entry.bound = std::max(entry.bound, fz / gz);
    }
    report.ok = report.ok && entry.defined;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace gmopt
