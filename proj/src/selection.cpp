#include "isingnet/selection.hpp"

#include <cmath>
#include <stdexcept>

namespace isingnet {

int support_size(const Eigen::VectorXd& theta) {
    int k = 0;
    for (Eigen::Index j = 1; j < theta.size(); ++j) k += theta(j) != 0.0;
    return k;
}

double ebic_score(const Eigen::VectorXd& theta, const LassoProblem& problem, double gamma) {
    const double n = static_cast<double>(problem.n());
    const double k = support_size(theta);
    const double candidates = static_cast<double>(problem.p() - 1);
    const double domain = candidates > 1.0 ? std::log(candidates) : 0.0;
    return 2.0 * n * empirical_risk(theta, problem) + k * std::log(n) + 2.0 * gamma * k * domain;
}

LambdaSelection select_lambda(const LassoProblem& problem, const std::vector<double>& grid, double gamma,
                              const CdOptions& solver) {
    if (grid.empty()) throw std::invalid_argument("select_lambda: empty lambda grid");
    if (gamma < 0.0) throw std::invalid_argument("select_lambda: gamma must be >= 0");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] < grid[k - 1])) throw std::invalid_argument("select_lambda: grid must be strictly decreasing");
    }
    auto path = fit_path(problem, grid, solver);
    LambdaSelection out;
    // The path may stop early; lambdas and scores cover the fitted prefix.
    out.lambdas.assign(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(path.size()));
    out.scores.reserve(grid.size());
    for (const auto& sol : path) out.scores.push_back(ebic_score(sol.theta, problem, gamma));
    // Strict comparison keeps the earliest (largest) lambda on ties.
    for (std::size_t k = 1; k < out.scores.size(); ++k) {
        if (out.scores[k] < out.scores[out.index]) out.index = k;
    }
    out.lambda = grid[out.index];
    out.solution = std::move(path[out.index]);
    return out;
}

LambdaSelection select_lambda(const LassoProblem& problem, const EbicConfig& cfg) {
    return select_lambda(problem, lambda_path(problem, cfg.n_lambdas, cfg.ratio), cfg.gamma, cfg.solver);
}

} // namespace isingnet
