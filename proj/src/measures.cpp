#include "gmopt/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace gmopt {

namespace {

void require_finite(const std::vector<double>& xs, const char* what) {
  for (double x : xs) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + " must be finite");
    }
  }
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> atoms,
                                           std::vector<double> weights) {
  if (atoms.size() != weights.size()) {
    throw std::invalid_argument("atoms and weights must have equal length");
  }
  if (atoms.empty()) {
    throw std::invalid_argument("distribution needs at least one atom");
  }
  require_finite(atoms, "atoms");
  require_finite(weights, "weights");
  for (double w : weights) {
    if (w < 0.0) {
      throw std::invalid_argument("weights must be nonnegative");
    }
  }

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  for (std::size_t idx : order) {
    if (!atoms_.empty() && atoms[idx] - atoms_.back() <= kMergeTol) {
      weights_.back() += weights[idx];
    } else {
      atoms_.push_back(atoms[idx]);
      weights_.push_back(weights[idx]);
    }
  }

  // Prune zero-weight atoms so supports are canonical.
  std::size_t kept = 0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (weights_[i] > 0.0) {
      atoms_[kept] = atoms_[i];
      weights_[kept] = weights_[i];
      ++kept;
    }
  }
  atoms_.resize(kept);
  weights_.resize(kept);
  if (atoms_.empty()) {
    throw std::invalid_argument("distribution has zero total weight");
  }

  cumulative_.resize(weights_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    cumulative_[i] = acc;
  }
  if (std::abs(acc - 1.0) > kMassTol) {
    throw std::invalid_argument("weights must sum to 1 within 1e-12");
  }
}

DiscreteDistribution DiscreteDistribution::point_mass(double atom) {
  return DiscreteDistribution({atom}, {1.0});
}

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    m += atoms_[i] * weights_[i];
  }
  return m;
}

double DiscreteDistribution::weight_at(double atom) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), atom);
  if (it != atoms_.end() && *it == atom) {
    return weights_[static_cast<std::size_t>(it - atoms_.begin())];
  }
  return 0.0;
}

double DiscreteDistribution::cdf(double y) const {
  auto it = std::upper_bound(atoms_.begin(), atoms_.end(), y);
  if (it == atoms_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double DiscreteDistribution::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("quantile level must lie in (0,1)");
  }
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) {
    return atoms_.back();  // cumulative rounding left the total slightly below u
  }
  return atoms_[static_cast<std::size_t>(it - cumulative_.begin())];
}

namespace {

double potential(const DiscreteDistribution& rho, double k) {
  double u = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    u += rho.weights()[i] * std::abs(rho.atoms()[i] - k);
  }
  return u;
}

}  // namespace

bool convex_order(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                  double tol) {
  const double mean_mu = mu.mean();
  const double mean_nu = nu.mean();
  if (std::abs(mean_mu - mean_nu) > tol) return false;

  std::vector<double> check = nu.atoms();
  check.push_back(mean_mu);
  check.push_back(mean_nu);
  for (double k : check) {
    if (potential(mu, k) > potential(nu, k) + tol) return false;
  }
  return true;
}

DiscreteMeasure::DiscreteMeasure(std::vector<GroundPoint> points,
                                 std::vector<double> masses) {
  if (points.size() != masses.size()) {
    throw std::invalid_argument("points and masses must have equal length");
  }
  const std::size_t dim = points.empty() ? 0 : points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) {
      throw std::invalid_argument("all points must have equal dimension");
    }
    if (p.empty()) {
      throw std::invalid_argument("points must have dimension >= 1");
    }
    require_finite(p, "point coordinates");
  }
  for (double m : masses) {
    if (!std::isfinite(m) || m < 0.0) {
      throw std::invalid_argument("masses must be finite and nonnegative");
    }
  }

  std::map<GroundPoint, double> merged;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (masses[i] > 0.0) {
      merged[points[i]] += masses[i];
    }
  }
  points_.reserve(merged.size());
  masses_.reserve(merged.size());
  for (auto& [p, m] : merged) {
    points_.push_back(p);
    masses_.push_back(m);
  }
}

std::size_t DiscreteMeasure::dimension() const {
  return points_.empty() ? 0 : points_.front().size();
}

double DiscreteMeasure::total_mass() const {
  return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

DiscreteMeasure::Marginal DiscreteMeasure::marginal(std::size_t axis) const {
  if (axis >= dimension()) {
    throw std::domain_error("marginal axis out of range");
  }
  const double mass = total_mass();
  if (mass <= 0.0) {
    throw std::invalid_argument("marginal of a zero-mass measure is degenerate");
  }
  std::map<double, double> projected;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    projected[points_[i][axis]] += masses_[i] / mass;
  }
  std::vector<double> atoms;
  std::vector<double> weights;
  atoms.reserve(projected.size());
  weights.reserve(projected.size());
  for (auto& [a, w] : projected) {
    atoms.push_back(a);
    weights.push_back(w);
  }
  return Marginal{DiscreteDistribution(std::move(atoms), std::move(weights)), mass};
}

}  // namespace gmopt
