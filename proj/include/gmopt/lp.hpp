#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace gmopt {

/// min cᵀx subject to Ax = b, x ≥ 0. Inequalities must be converted by the
/// caller with explicit slack columns.
struct LinearProgram {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpTols {
  double feas = 1e-9;
  double opt = 1e-9;
};

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  Eigen::VectorXd x;       // primal solution, size n, valid when Optimal
  double objective = 0.0;  // cᵀx, valid when Optimal
  Eigen::VectorXd y;       // dual vector, size m, valid when Optimal
  // Final basis, one column index per row. Indices ≥ n denote artificial
  // columns left basic at value ~0 by redundant rows.
  std::vector<int> basis;
  // Valid when Infeasible: farkas satisfies Aᵀ·farkas ≤ opt_tol
  // componentwise and bᵀ·farkas > feas_tol, witnessing emptiness.
  Eigen::VectorXd farkas;
  int iterations = 0;
};

/// Two-phase dense revised simplex. Dantzig pricing with a switch to
/// Bland's rule while degeneracy persists; artificial columns never
/// re-enter and are pivoted out at zero step when possible.
/// Throws std::invalid_argument on inconsistent or non-finite input and
/// std::runtime_error when the iteration cap trips.
LpResult solve_lp(const LinearProgram& lp, const LpTols& tols = {});

struct LexStage {
  LinearProgram lp;  // the stage's LP (base rows plus one pinning row per
                     // earlier objective), kept for certification
  LpResult result;
};

struct LexResult {
  LpStatus status = LpStatus::Optimal;  // Optimal iff every stage solved
  Eigen::VectorXd x;                    // final optimizer
  std::vector<double> values;           // objective value per completed stage
  std::vector<LexStage> stages;
};

/// Minimizes objectives[0] over {Ax = b, x ≥ 0}, then each later objective
/// over the previous stage's optimizers. Stage k is pinned by appending the
/// equality row objectives[k-1]ᵀ x = (value recomputed at the stage-k-1
/// optimizer), keeping every stage a plain LP with a full certificate.
LexResult lexicographic_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                              const std::vector<Eigen::VectorXd>& objectives,
                              const LpTols& tols = {});

struct CertificateReport {
  bool pass = false;
  double primal_residual = 0.0;  // ‖Ax − b‖_∞
  double lower_violation = 0.0;  // max(0, −min_j x_j)
  double dual_violation = 0.0;   // max(0, max_j (Aᵀy − c)_j)
  double complementarity = 0.0;  // max_j |x_j · (c − Aᵀy)_j|
  double duality_gap = 0.0;      // |cᵀx − bᵀy|
};

/// Independently re-checks an Optimal result against its LP: primal
/// feasibility and sign, dual feasibility, complementary slackness, and the
/// duality gap |claimed objective − bᵀy| ≤ opt_tol·(1 + |claimed|).
/// Throws std::invalid_argument when result.status is not Optimal.
CertificateReport verify_certificate(const LinearProgram& lp, const LpResult& result,
                                     const LpTols& tols = {});

/// Plain-text diagnostic dump: rows of A | b, then c.
std::string dump_lp(const LinearProgram& lp);

}  // namespace gmopt
