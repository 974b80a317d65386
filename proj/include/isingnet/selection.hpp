#pragma once

#include <vector>

#include "isingnet/lasso.hpp"

namespace isingnet {

struct EbicConfig {
    double gamma = 0.25;
    int n_lambdas = 50;
    double ratio = 0.01;
    CdOptions solver;
};

/// Number of nonzero penalised (non-intercept) coefficients.
int support_size(const Eigen::VectorXd& theta);

/**
 * Extended BIC of a fitted coefficient vector:
 *
 *   2n * risk(theta) + k log n + 2 gamma k log(p - 1)
 *
 * with k the number of nonzero non-intercept coefficients and p - 1 the
 * number of candidate predictors.
 */
double ebic_score(const Eigen::VectorXd& theta, const LassoProblem& problem, double gamma);

struct LambdaSelection {
    double lambda = 0.0;
    LassoSolution solution;
    /// Fitted prefix of the grid (see fit_path) and its EBIC scores.
    std::vector<double> lambdas;
    std::vector<double> scores;
    std::size_t index = 0;
};

/// Fits the warm-started path and returns the EBIC minimiser. Ties go to the
/// larger lambda. Throws std::invalid_argument for a constant response.
LambdaSelection select_lambda(const LassoProblem& problem, const EbicConfig& cfg);

/// Same, over an explicit grid (must be non-empty and strictly decreasing).
LambdaSelection select_lambda(const LassoProblem& problem, const std::vector<double>& grid, double gamma,
                              const CdOptions& solver = {});

} // namespace isingnet
