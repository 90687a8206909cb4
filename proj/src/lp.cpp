#include "gmopt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gmopt {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kDegenerateStep = 1e-12;
constexpr int kBlandTrigger = 30;

void validate(const LinearProgram& lp) {
  const auto m = lp.A.rows();
  const auto n = lp.A.cols();
  if (m < 1 || n < 1) {
    throw std::invalid_argument("LP needs at least one row and one column");
  }
  if (lp.b.size() != m || lp.c.size() != n) {
    throw std::invalid_argument("LP dimensions are inconsistent");
  }
  if (!lp.A.allFinite() || !lp.b.allFinite() || !lp.c.allFinite()) {
    throw std::invalid_argument("LP entries must be finite");
  }
}

/// Revised simplex core on min cᵀx, Ax = b, x ≥ 0 from a feasible basis.
/// Columns with index ≥ enter_limit never enter; basic such columns are
/// forced out at zero step whenever the entering direction allows it.
class SimplexCore {
 public:
  SimplexCore(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
              const Eigen::VectorXd& c, double opt_tol)
      : A_(A), b_(b), c_(c), opt_tol_(opt_tol), m_(A.rows()) {}

  LpStatus run(std::vector<int>& basis, Eigen::Index enter_limit, int max_iters,
               int& iterations) {
    bool bland = false;
    int degenerate_run = 0;
    for (int iter = 0; iter < max_iters; ++iter) {
      ++iterations;
      Eigen::MatrixXd B(m_, m_);
      for (Eigen::Index i = 0; i < m_; ++i) B.col(i) = A_.col(basis[i]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
      x_basic_ = lu.solve(b_);
      Eigen::VectorXd c_basic(m_);
      for (Eigen::Index i = 0; i < m_; ++i) c_basic(i) = c_(basis[i]);
      y_ = Eigen::FullPivLU<Eigen::MatrixXd>(B.transpose()).solve(c_basic);

      const Eigen::Index entering = pick_entering(basis, enter_limit, bland);
      if (entering < 0) return LpStatus::Optimal;

      const Eigen::VectorXd d = lu.solve(A_.col(entering));

      // Basic never-entering columns sit at ~0; swap one out at zero step
      // as soon as the direction touches its row.
      Eigen::Index leaving = -1;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (basis[i] >= enter_limit && std::abs(d(i)) > kPivotTol) {
          if (leaving < 0 || std::abs(d(i)) > std::abs(d(leaving))) leaving = i;
        }
      }
      double step = 0.0;
      if (leaving < 0) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m_; ++i) {
          if (d(i) > kPivotTol) {
            const double ratio = std::max(x_basic_(i), 0.0) / d(i);
            if (ratio < best - kPivotTol ||
                (ratio < best + kPivotTol &&
                 (leaving < 0 || basis[i] < basis[leaving]))) {
              best = ratio;
              leaving = i;
            }
          }
        }
        if (leaving < 0) return LpStatus::Unbounded;
        step = best;
      }

      if (step < kDegenerateStep) {
        if (++degenerate_run > kBlandTrigger) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      basis[leaving] = static_cast<int>(entering);
    }
    throw std::runtime_error("simplex iteration cap exceeded");
  }

  const Eigen::VectorXd& basic_values() const { return x_basic_; }
  const Eigen::VectorXd& duals() const { return y_; }

  double objective(const std::vector<int>& basis) const {
    double v = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) v += c_(basis[i]) * x_basic_(i);
    return v;
  }

 private:
  Eigen::Index pick_entering(const std::vector<int>& basis, Eigen::Index enter_limit,
                             bool bland) const {
    std::vector<bool> in_basis(static_cast<std::size_t>(A_.cols()), false);
    for (int j : basis) in_basis[static_cast<std::size_t>(j)] = true;
    Eigen::Index pick = -1;
    double most_negative = -opt_tol_;
    for (Eigen::Index j = 0; j < enter_limit; ++j) {
      if (in_basis[static_cast<std::size_t>(j)]) continue;
      const double rc = c_(j) - y_.dot(A_.col(j));
      if (rc < -opt_tol_) {
        if (bland) return j;
        if (rc < most_negative) {
          most_negative = rc;
          pick = j;
        }
      }
    }
    return pick;
  }

  const Eigen::MatrixXd& A_;
  const Eigen::VectorXd& b_;
  const Eigen::VectorXd& c_;
  const double opt_tol_;
  const Eigen::Index m_;
  Eigen::VectorXd x_basic_;
  Eigen::VectorXd y_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const LpTols& tols) {
  validate(lp);
  const Eigen::Index m = lp.A.rows();
  const Eigen::Index n = lp.A.cols();
  const int max_iters = 2000 + 200 * static_cast<int>(m + n);

  // Standardize to b ≥ 0 by flipping row signs; duals are unflipped on exit.
  Eigen::VectorXd signs(m);
  Eigen::MatrixXd ext(m, n + m);
  Eigen::VectorXd b_pos(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    signs(i) = lp.b(i) < 0.0 ? -1.0 : 1.0;
    ext.row(i).head(n) = signs(i) * lp.A.row(i);
    b_pos(i) = signs(i) * lp.b(i);
  }
  ext.rightCols(m) = Eigen::MatrixXd::Identity(m, m);

  LpResult result;

  // Phase 1: minimize the artificial mass.
  Eigen::VectorXd c1 = Eigen::VectorXd::Zero(n + m);
  c1.tail(m).setOnes();
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = static_cast<int>(n + i);

  SimplexCore phase1(ext, b_pos, c1, tols.opt);
  const LpStatus s1 = phase1.run(basis, n + m, max_iters, result.iterations);
  if (s1 == LpStatus::Unbounded) {
    throw std::runtime_error("phase 1 reported an unbounded artificial objective");
  }
  if (phase1.objective(basis) > tols.feas) {
    result.status = LpStatus::Infeasible;
    result.farkas = signs.cwiseProduct(phase1.duals());
    result.basis = basis;
    return result;
  }

  // Phase 2 on the original objective; artificials are barred from entering
  // and carry zero cost, so redundant rows keep theirs basic at value ~0
  // with dual exactly 0.
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(n + m);
  c2.head(n) = lp.c;
  SimplexCore phase2(ext, b_pos, c2, tols.opt);
  const LpStatus s2 = phase2.run(basis, n, max_iters, result.iterations);
  if (s2 == LpStatus::Unbounded) {
    result.status = LpStatus::Unbounded;
    result.basis = basis;
    return result;
  }

  result.status = LpStatus::Optimal;
  result.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[static_cast<std::size_t>(i)] < n) {
      result.x(basis[static_cast<std::size_t>(i)]) = phase2.basic_values()(i);
    }
  }
  result.objective = lp.c.dot(result.x);
  result.y = signs.cwiseProduct(phase2.duals());
  result.basis = basis;
  return result;
}

LexResult lexicographic_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const std::vector<Eigen::VectorXd>& objectives,
                              const LpTols& tols) {
  if (objectives.empty()) {
    throw std::invalid_argument("lexicographic_solve needs at least one objective");
  }
  for (const auto& c : objectives) {
    if (c.size() != A.cols()) {
      throw std::invalid_argument("objective dimension must match the column count");
    }
  }
  LexResult lex;
  LinearProgram stage_lp{A, b, objectives.front()};
  for (std::size_t k = 0; k < objectives.size(); ++k) {
    stage_lp.c = objectives[k];
    LpResult r = solve_lp(stage_lp, tols);
    lex.stages.push_back({stage_lp, r});
    if (r.status != LpStatus::Optimal) {
      lex.status = r.status;
      return lex;
    }
    lex.values.push_back(r.objective);
    lex.x = r.x;
    if (k + 1 < objectives.size()) {
      // Pin this stage with one equality row; the RHS is recomputed at the
      // found optimizer so the row is exactly attainable.
      const Eigen::Index m_cur = stage_lp.A.rows();
      stage_lp.A.conservativeResize(m_cur + 1, Eigen::NoChange);
      stage_lp.A.row(m_cur) = objectives[k].transpose();
      stage_lp.b.conservativeResize(m_cur + 1);
      stage_lp.b(m_cur) = objectives[k].dot(r.x);
    }
  }
  lex.status = LpStatus::Optimal;
  return lex;
}

CertificateReport verify_certificate(const LinearProgram& lp, const LpResult& result,
                                     const LpTols& tols) {
  if (result.status != LpStatus::Optimal) {
    throw std::invalid_argument("verify_certificate expects an Optimal result");
  }
  validate(lp);
  CertificateReport report;
  const Eigen::VectorXd residual = lp.A * result.x - lp.b;
  report.primal_residual = residual.lpNorm<Eigen::Infinity>();
  report.lower_violation = std::max(0.0, -result.x.minCoeff());
  const Eigen::VectorXd reduced = lp.c - lp.A.transpose() * result.y;
  report.dual_violation = std::max(0.0, -reduced.minCoeff());
  report.complementarity = result.x.cwiseProduct(reduced).cwiseAbs().maxCoeff();
  // The claimed objective (not a recomputed one) enters the gap so tampered
  // values are caught.
  report.duality_gap = std::abs(result.objective - lp.b.dot(result.y));
  report.pass = report.primal_residual <= tols.feas &&
                report.lower_violation <= tols.feas &&
                report.dual_violation <= tols.opt &&
                report.complementarity <= tols.opt &&
                report.duality_gap <= tols.opt * (1.0 + std::abs(result.objective));
  return report;
}

std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < lp.A.rows(); ++i) {
    for (Eigen::Index j = 0; j < lp.A.cols(); ++j) out << lp.A(i, j) << ' ';
    out << "| " << lp.b(i) << '\n';
  }
  for (Eigen::Index j = 0; j < lp.c.size(); ++j) {
    out << lp.c(j) << (j + 1 < lp.c.size() ? ' ' : '\n');
  }
  return out.str();
}

}  // namespace gmopt
