#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace isingnet {

/**
 * One l1-penalised logistic regression:
 *
 *   minimise (1/n) sum_i psi(y_i, d_i' theta) + lambda * sum_{j>=1} |theta_j|
 *
 * The first design column is the intercept (all ones) and is left
 * unpenalised unless penalize_intercept is set.
 */
struct LassoProblem {
    Eigen::VectorXd y;
    Eigen::MatrixXd design;
    double lambda = 0.0;
    bool penalize_intercept = false;

    Eigen::Index n() const { return design.rows(); }
    Eigen::Index p() const { return design.cols(); }

    /// Throws std::invalid_argument if shapes disagree, y is not 0/1, the
    /// first column is not all ones or lambda is negative.
    void validate() const;
    /// Penalty weight applied to coordinate j.
    double penalty(Eigen::Index j) const { return (j == 0 && !penalize_intercept) ? 0.0 : lambda; }
};

struct LassoSolution {
    Eigen::VectorXd theta;
    int iterations = 0;
    double max_kkt_violation = 0.0;
    bool converged = false;
};

struct CdOptions {
    /// Stop once the largest coefficient change in a full cycle is below tol.
    double tol = 1e-7;
    int max_iter = 10000;
    double kkt_tol = 1e-6;
    /// Lower clamp on the coordinate curvature.
    double curvature_floor = 1e-5;
    /// Called after every cycle with (cycle, theta, objective). The objective
    /// is only evaluated when a callback is set.
    std::function<void(int, const Eigen::VectorXd&, double)> on_cycle;
};

/// (1/n) sum_i psi(y_i, d_i' theta). Throws on dimension mismatch.
double empirical_risk(const Eigen::VectorXd& theta, const LassoProblem& problem);

/// empirical_risk + lambda * ||theta||_1 (intercept per LassoProblem::penalty).
double lasso_objective(const Eigen::VectorXd& theta, const LassoProblem& problem);

/// Sum of |theta_j| over penalised coordinates.
double penalized_l1(const Eigen::VectorXd& theta, const LassoProblem& problem);

/// (1/n) sum_i (pi(mu_i) - y_i) d_i. Throws on dimension mismatch.
Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const LassoProblem& problem);

/**
 * Cyclic coordinate descent with a per-coordinate quadratic approximation and
 * soft-thresholding:
 *
 *   theta_j <- S(theta_j - g_j / h_j, lambda / h_j)
 *
 * where g_j is the gradient and h_j = (1/n) sum_i pi_i (1 - pi_i) d_ij^2 the
 * Fisher diagonal. A step that would raise the objective is redone with the
 * global curvature bound (1/4n) sum_i d_ij^2, so the objective never increases.
 *
 * Bit-identical predictor columns with equal starting values are updated as a
 * block sharing one value, so duplicated predictors keep equal coefficients
 * throughout.
 *
 * After a full pass, cycles run over the nonzero coordinates until they
 * settle, then another full pass confirms. Never throws on non-convergence;
 * LassoSolution::converged is false instead.
 */
LassoSolution coordinate_descent(const LassoProblem& problem, const Eigen::VectorXd& init,
                                 const CdOptions& options = {});

/**
 * Largest subgradient-condition violation:
 *   theta_j != 0:  |g_j + lambda sign(theta_j)|
 *   theta_j == 0:  max(0, |g_j| - lambda)
 *   intercept:     |g_0| (when unpenalised)
 */
double check_kkt(const Eigen::VectorXd& theta, const LassoProblem& problem);

/// Smallest lambda for which all penalised coefficients are zero:
/// max_{j>=1} |(1/n) sum_i (y_i - ybar) d_ij|. Throws std::invalid_argument
/// ("constant response") when y is all 0 or all 1.
double lambda_max(const LassoProblem& problem);

/// Log-spaced, strictly decreasing grid from lambda_max to ratio*lambda_max.
/// The first value is lambda_max * (1 + 1e-12) so its fit is the null model.
std::vector<double> lambda_path(const LassoProblem& problem, int n_lambdas, double ratio);

/// Fraction of null deviance explained at which a path stops early.
inline constexpr double kDefaultMaxDevianceRatio = 0.999;

/// Fits the lambdas of `grid` in order, warm-starting from the previous
/// solution; the first fit starts from (logit(ybar), 0, ..., 0). The path
/// stops once a fit explains max_deviance_ratio of the null deviance (the
/// model is then close to separating the data), so the result can be shorter
/// than the grid.
std::vector<LassoSolution> fit_path(const LassoProblem& problem, const std::vector<double>& grid,
                                    const CdOptions& options = {},
                                    double max_deviance_ratio = kDefaultMaxDevianceRatio);

/// Unpenalised intercept-only starting point (logit(ybar), 0, ..., 0).
Eigen::VectorXd null_start(const LassoProblem& problem);

} // namespace isingnet
