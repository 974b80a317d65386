#include "isingnet/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

#include "isingnet/logistic.hpp"

namespace isingnet {

void LassoProblem::validate() const {
    if (y.size() != design.rows()) throw std::invalid_argument("LassoProblem: y and design row count differ");
    if (design.rows() < 1 || design.cols() < 1) throw std::invalid_argument("LassoProblem: empty design");
    if (!(lambda >= 0.0)) throw std::invalid_argument("LassoProblem: lambda must be >= 0");
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) != 0.0 && y(i) != 1.0) throw std::invalid_argument("LassoProblem: y must be 0/1");
        if (design(i, 0) != 1.0) throw std::invalid_argument("LassoProblem: first design column must be all ones");
    }
}

namespace {

void check_dims(const Eigen::VectorXd& theta, const LassoProblem& problem) {
    if (theta.size() != problem.p()) {
        throw std::invalid_argument("coefficient length " + std::to_string(theta.size()) +
                                    " does not match design width " + std::to_string(problem.p()));
    }
}

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

/// Partition of coordinates into blocks updated together. Block 0 is the
/// intercept; every other block is a set of bit-identical columns that start
/// from the same value.
std::vector<std::vector<Eigen::Index>> duplicate_blocks(const Eigen::MatrixXd& design,
                                                         const Eigen::VectorXd& init) {
    std::vector<std::vector<Eigen::Index>> blocks;
    blocks.push_back({0});
    const auto n = static_cast<std::size_t>(design.rows());
    std::unordered_map<std::size_t, std::vector<std::size_t>> by_hash;
    for (Eigen::Index j = 1; j < design.cols(); ++j) {
        const double* col = design.col(j).data();
        std::size_t h = std::hash<double>{}(init(j));
        for (std::size_t i = 0; i < n; ++i) h = h * 1000003U ^ std::hash<double>{}(col[i]);
        auto& candidates = by_hash[h];
        bool placed = false;
        for (auto b : candidates) {
            const auto first = blocks[b].front();
            if (init(first) == init(j) && std::memcmp(design.col(first).data(), col, n * sizeof(double)) == 0) {
                blocks[b].push_back(j);
                placed = true;
                break;
            }
        }
        if (!placed) {
            candidates.push_back(blocks.size());
            blocks.push_back({j});
        }
    }
    return blocks;
}

class CoordinateSolver {
public:
    CoordinateSolver(const LassoProblem& problem, const Eigen::VectorXd& init, const CdOptions& options)
        : problem_(problem), options_(options), theta_(init), n_(problem.n()),
          inv_n_(1.0 / static_cast<double>(problem.n())) {
        col_sumsq_ = problem.design.colwise().squaredNorm().transpose();
        binary_.resize(static_cast<std::size_t>(problem.p()));
        rows_.resize(static_cast<std::size_t>(problem.p()));
        for (Eigen::Index j = 0; j < problem.p(); ++j) {
            const auto col = problem.design.col(j);
            binary_[static_cast<std::size_t>(j)] = (col.array() == 0.0 || col.array() == 1.0).all();
            for (Eigen::Index i = 0; i < n_; ++i) {
                if (col(i) != 0.0) rows_[static_cast<std::size_t>(j)].push_back(i);
            }
        }
        next_pi_.resize(n_);
        blocks_ = duplicate_blocks(problem.design, init);
        refresh();
    }

    LassoSolution run() {
        LassoSolution out;
        bool full_pass = true;
        bool settled = false;
        int cycle = 0;
        int since_anchor = 0;
        Eigen::VectorXd anchor = theta_;
        while (cycle < options_.max_iter) {
            if (full_pass) refresh();
            double max_change = 0.0;
            for (std::size_t b = 0; b < blocks_.size(); ++b) {
                const auto& block = blocks_[b];
                if (!full_pass && b != 0 && theta_(block.front()) == 0.0) continue;
                max_change = std::max(max_change, update_block(block));
            }
            ++cycle;
            if (!full_pass && ++since_anchor == kExtrapolationWindow) {
                extrapolate(anchor);
                anchor = theta_;
                since_anchor = 0;
            }
            if (options_.on_cycle) options_.on_cycle(cycle, theta_, lasso_objective(theta_, problem_));

            if (max_change < options_.tol) {
                if (full_pass) {
                    if (check_kkt(theta_, problem_) <= options_.kkt_tol) {
                        settled = true;
                        break;
                    }
                } else {
                    full_pass = true;
                }
            } else if (full_pass) {
                full_pass = false;
                anchor = theta_;
                since_anchor = 0;
            }
        }
        out.theta = theta_;
        out.iterations = cycle;
        out.max_kkt_violation = check_kkt(theta_, problem_);
        out.converged = settled && out.max_kkt_violation <= options_.kkt_tol;
        return out;
    }

private:
    void refresh() {
        mu_ = problem_.design * theta_;
        pi_ = mu_.unaryExpr([](double m) { return sigmoid(m); });
    }

    /// Binary columns take multiplicative pi updates unless the step is large.
    bool fast_path(Eigen::Index j, double step) const {
        return binary_[static_cast<std::size_t>(j)] && std::abs(step) < kFastStepLimit;
    }

    /// Change in empirical risk if mu moves by `step * d_j`.
    double risk_delta(Eigen::Index j, double step) const {
        const double* col = problem_.design.col(j).data();
        double delta = 0.0;
        if (fast_path(j, step)) {
            // psi(y, mu + step) - psi(y, mu) = -y step + log1p(pi (e^step - 1))
            const double growth = std::expm1(step);
            for (auto i : rows_[static_cast<std::size_t>(j)]) {
                delta += -problem_.y(i) * step + std::log1p(pi_(i) * growth);
            }
        } else {
            for (auto i : rows_[static_cast<std::size_t>(j)]) {
                const double y = problem_.y(i);
                delta += logistic_loss(y, mu_(i) + step * col[i]) - logistic_loss(y, mu_(i));
            }
        }
        return delta * inv_n_;
    }

    /// Whether moving the block from `old` to `next` changes the objective by at
    /// most `slack`. On the fast path this also leaves the moved pi values in
    /// next_pi_.
    bool acceptable(Eigen::Index j, double k, double pen, double g, double old, double next, double slack) {
        const double step = k * (next - old);
        const double pen_change = pen * k * (std::abs(next) - std::abs(old));
        if (fast_path(j, step)) {
            // sigma(mu + step) = pi e^step / (1 - pi + pi e^step). psi'' is largest
            // at mu = 0 and falls off on both sides, so the larger endpoint
            // curvature (1/4 if the segment crosses 0) bounds it along the move;
            // a negative quadratic upper bound proves descent without logs.
            const double growth = std::exp(step);
            double curvature = 0.0;
            for (auto i : rows_[static_cast<std::size_t>(j)]) {
                const double p = pi_(i);
                const double scaled = p * growth;
                const double q = scaled / (1.0 - p + scaled);
                next_pi_(i) = q;
                const bool crosses = (mu_(i) < 0.0) != (mu_(i) + step < 0.0);
                curvature += crosses ? 0.25 : std::max(p * (1.0 - p), q * (1.0 - q));
            }
            if (g * step + 0.5 * curvature * inv_n_ * step * step + pen_change <= 0.0) return true;
        }
        return risk_delta(j, step) + pen_change <= slack;
    }

    double update_block(const std::vector<Eigen::Index>& block) {
        const Eigen::Index j = block.front();
        const double* col = problem_.design.col(j).data();
        const auto& rows = rows_[static_cast<std::size_t>(j)];
        const double k = static_cast<double>(block.size());
        const double pen = problem_.penalty(j);
        const double old = theta_(j);

        double g = 0.0;
        double h = 0.0;
        for (auto i : rows) {
            g += (pi_(i) - problem_.y(i)) * col[i];
            h += pi_(i) * (1.0 - pi_(i)) * col[i] * col[i];
        }
        g *= inv_n_;
        h = std::max(h * inv_n_, options_.curvature_floor);

        auto propose = [&](double curvature) {
            return soft_threshold(old - g / (k * curvature), pen / (k * curvature));
        };

        double next = propose(h);
        if (next == old) return 0.0;
        if (!acceptable(j, k, pen, g, old, next, 0.0)) {
            // The local quadratic model overshot; the global bound pi(1-pi) <= 1/4
            // majorises the risk along this coordinate.
            const double bound = std::max(0.25 * col_sumsq_(j) * inv_n_, h);
            next = propose(bound);
            if (next == old || !acceptable(j, k, pen, g, old, next, 1e-15)) return 0.0;
        }

        const double step = k * (next - old);
        for (auto m : block) theta_(m) = next;
        if (fast_path(j, step)) {
            for (auto i : rows) {
                mu_(i) += step;
                pi_(i) = next_pi_(i);
            }
        } else {
            for (auto i : rows) {
                mu_(i) += step * col[i];
                pi_(i) = sigmoid(mu_(i));
            }
        }
        return std::abs(next - old);
    }

    /// On ill-conditioned problems cyclic updates creep along a nearly flat
    /// direction. Extend the move made over the last window, doubling the
    /// step while the objective keeps falling; no move unless it falls.
    void extrapolate(const Eigen::VectorXd& anchor) {
        const Eigen::VectorXd direction = theta_ - anchor;
        if (direction.isZero(0.0)) return;
        const Eigen::VectorXd mu_direction = problem_.design * direction;
        auto objective_at = [&](double scale) {
            double risk = 0.0;
            for (Eigen::Index i = 0; i < n_; ++i) {
                risk += logistic_loss(problem_.y(i), mu_(i) + scale * mu_direction(i));
            }
            double l1 = 0.0;
            for (Eigen::Index j = 0; j < theta_.size(); ++j) {
                l1 += problem_.penalty(j) * std::abs(theta_(j) + scale * direction(j));
            }
            return risk * inv_n_ + l1;
        };
        double best_scale = 0.0;
        double best = objective_at(0.0);
        for (double scale = 1.0; scale <= kMaxExtrapolation; scale *= 2.0) {
            const double value = objective_at(scale);
            if (!(value < best)) break;
            best = value;
            best_scale = scale;
        }
        if (best_scale == 0.0) return;
        theta_ += best_scale * direction;
        mu_ += best_scale * mu_direction;
        pi_ = mu_.unaryExpr([](double m) { return sigmoid(m); });
    }

    static constexpr double kFastStepLimit = 30.0;
    static constexpr int kExtrapolationWindow = 5;
    static constexpr double kMaxExtrapolation = 1024.0;

    const LassoProblem& problem_;
    const CdOptions& options_;
    std::vector<bool> binary_;
    /// Rows where each column is nonzero.
    std::vector<std::vector<Eigen::Index>> rows_;
    Eigen::VectorXd next_pi_;
    Eigen::VectorXd theta_;
    Eigen::VectorXd mu_;
    Eigen::VectorXd pi_;
    Eigen::VectorXd col_sumsq_;
    std::vector<std::vector<Eigen::Index>> blocks_;
    Eigen::Index n_;
    double inv_n_;
};

} // namespace

double empirical_risk(const Eigen::VectorXd& theta, const LassoProblem& problem) {
    check_dims(theta, problem);
    const Eigen::VectorXd mu = problem.design * theta;
    double total = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) total += logistic_loss(problem.y(i), mu(i));
    return total / static_cast<double>(problem.n());
}

double penalized_l1(const Eigen::VectorXd& theta, const LassoProblem& problem) {
    check_dims(theta, problem);
    double l1 = theta.tail(theta.size() - 1).lpNorm<1>();
    if (problem.penalize_intercept) l1 += std::abs(theta(0));
    return l1;
}

double lasso_objective(const Eigen::VectorXd& theta, const LassoProblem& problem) {
    return empirical_risk(theta, problem) + problem.lambda * penalized_l1(theta, problem);
}

Eigen::VectorXd gradient(const Eigen::VectorXd& theta, const LassoProblem& problem) {
    check_dims(theta, problem);
    const Eigen::VectorXd mu = problem.design * theta;
    Eigen::VectorXd resid(mu.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i) resid(i) = sigmoid(mu(i)) - problem.y(i);
    return problem.design.transpose() * resid / static_cast<double>(problem.n());
}

double check_kkt(const Eigen::VectorXd& theta, const LassoProblem& problem) {
    const Eigen::VectorXd g = gradient(theta, problem);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
        const double pen = problem.penalty(j);
        double v;
        if (theta(j) != 0.0) {
            v = std::abs(g(j) + pen * (theta(j) > 0.0 ? 1.0 : -1.0));
        } else {
            v = std::max(0.0, std::abs(g(j)) - pen);
        }
        worst = std::max(worst, v);
    }
    return worst;
}

LassoSolution coordinate_descent(const LassoProblem& problem, const Eigen::VectorXd& init,
                                 const CdOptions& options) {
    problem.validate();
    check_dims(init, problem);
    CoordinateSolver solver(problem, init, options);
    return solver.run();
}

double lambda_max(const LassoProblem& problem) {
    problem.validate();
    const double ybar = problem.y.mean();
    if (ybar == 0.0 || ybar == 1.0) throw std::invalid_argument("constant response");
    const Eigen::VectorXd centered = problem.y.array() - ybar;
    double top = 0.0;
    for (Eigen::Index j = 1; j < problem.p(); ++j) {
        top = std::max(top, std::abs(problem.design.col(j).dot(centered)) / static_cast<double>(problem.n()));
    }
    return top;
}

std::vector<double> lambda_path(const LassoProblem& problem, int n_lambdas, double ratio) {
    if (n_lambdas < 2) throw std::invalid_argument("lambda_path: need at least 2 lambdas");
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("lambda_path: ratio must lie in (0, 1)");
    const double top = lambda_max(problem);
    if (!(top > 0.0)) throw std::invalid_argument("lambda_path: lambda_max is zero (no predictor varies with y)");
    std::vector<double> grid(static_cast<std::size_t>(n_lambdas));
    const double log_top = std::log(top);
    const double log_step = std::log(ratio) / static_cast<double>(n_lambdas - 1);
    for (int k = 0; k < n_lambdas; ++k) grid[static_cast<std::size_t>(k)] = std::exp(log_top + log_step * k);
    // The intercept-only start reproduces ybar only up to rounding, which can
    // leave |g_j| a few ulps above lambda_max; a relative nudge keeps the
    // first fit exactly null.
    grid.front() = top * (1.0 + 1e-12);
    grid.back() = ratio * top;
    return grid;
}

Eigen::VectorXd null_start(const LassoProblem& problem) {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(problem.p());
    const double ybar = problem.y.mean();
    if (ybar > 0.0 && ybar < 1.0) theta(0) = std::log(ybar / (1.0 - ybar));
    return theta;
}

std::vector<LassoSolution> fit_path(const LassoProblem& problem, const std::vector<double>& grid,
                                    const CdOptions& options, double max_deviance_ratio) {
    LassoProblem current = problem;
    Eigen::VectorXd warm = null_start(problem);
    const double null_risk = empirical_risk(warm, problem);
    std::vector<LassoSolution> out;
    out.reserve(grid.size());
    for (double lambda : grid) {
        current.lambda = lambda;
        out.push_back(coordinate_descent(current, warm, options));
        warm = out.back().theta;
        if (null_risk > 0.0 && 1.0 - empirical_risk(warm, problem) / null_risk >= max_deviance_ratio) break;
    }
    return out;
}

} // namespace isingnet
