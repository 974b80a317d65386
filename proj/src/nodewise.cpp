#include "isingnet/nodewise.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>
#include <thread>

#include "isingnet/logistic.hpp"

namespace isingnet {

LassoProblem nodewise_problem(const BinaryDataset& data, std::size_t s) {
    if (s >= data.p()) throw std::out_of_range("nodewise_problem: node index out of range");
    const auto n = static_cast<Eigen::Index>(data.n());
    LassoProblem problem;
    problem.y.resize(n);
    problem.design.resize(n, static_cast<Eigen::Index>(data.p()));
    problem.design.col(0).setOnes();
    const auto ys = data.column(s);
    for (Eigen::Index i = 0; i < n; ++i) problem.y(i) = ys[static_cast<std::size_t>(i)];
    for (std::size_t t = 0; t < data.p(); ++t) {
        if (t == s) continue;
        const auto col = data.column(t);
        auto dst = problem.design.col(coefficient_index(s, t));
        for (Eigen::Index i = 0; i < n; ++i) dst(i) = col[static_cast<std::size_t>(i)];
    }
    return problem;
}

Eigen::MatrixXd NodewiseFit::directed() const {
    const auto np = static_cast<Eigen::Index>(p());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(np, np);
    for (std::size_t s = 0; s < p(); ++s) {
        for (std::size_t t = 0; t < p(); ++t) {
            out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = interaction(s, t);
        }
    }
    return out;
}

std::size_t NodewiseFit::degenerate_count() const {
    return static_cast<std::size_t>(
        std::count_if(per_node.begin(), per_node.end(), [](const NodeFit& f) { return f.degenerate; }));
}

namespace {

NodeFit fit_node(const BinaryDataset& data, std::size_t s, const EbicConfig& cfg) {
    NodeFit fit;
    fit.theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.p()));
    if (data.column_is_constant(s)) {
        fit.degenerate = true;
        return fit;
    }
    const auto problem = nodewise_problem(data, s);
    if (lambda_max(problem) == 0.0) {
        // y varies but no predictor column does: only the intercept is estimable.
        auto sol = coordinate_descent(problem, null_start(problem), cfg.solver);
        fit.theta = sol.theta;
        fit.iterations = sol.iterations;
        fit.max_kkt_violation = sol.max_kkt_violation;
        fit.converged = sol.converged;
        return fit;
    }
    auto sel = select_lambda(problem, cfg);
    fit.theta = std::move(sel.solution.theta);
    fit.lambda = sel.lambda;
    fit.lambdas = std::move(sel.lambdas);
    fit.scores = std::move(sel.scores);
    fit.iterations = sel.solution.iterations;
    fit.max_kkt_violation = sel.solution.max_kkt_violation;
    fit.converged = sel.solution.converged;
    return fit;
}

} // namespace

NodewiseFit fit_nodewise(const BinaryDataset& data, const EbicConfig& cfg, unsigned threads) {
    if (data.n() < 2) throw std::invalid_argument("fit_nodewise: need at least 2 observations");
    NodewiseFit out;
    out.per_node.resize(data.p());
    const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(data.p())));
    if (workers == 1) {
        for (std::size_t s = 0; s < data.p(); ++s) out.per_node[s] = fit_node(data, s, cfg);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t s = next++; s < data.p(); s = next++) out.per_node[s] = fit_node(data, s, cfg);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

EdgeSetEstimate symmetrize(const NodewiseFit& fit, Rule rule) {
    const auto np = static_cast<Eigen::Index>(fit.p());
    EdgeSetEstimate out;
    out.rule = rule;
    out.weights = Eigen::MatrixXd::Zero(np, np);
    out.fields.resize(np);
    for (std::size_t s = 0; s < fit.p(); ++s) {
        out.fields(static_cast<Eigen::Index>(s)) = fit.field(s);
        for (std::size_t t = s + 1; t < fit.p(); ++t) {
            const double st = fit.interaction(s, t);
            const double ts = fit.interaction(t, s);
            const bool present = rule == Rule::And ? (st != 0.0 && ts != 0.0) : (st != 0.0 || ts != 0.0);
            if (!present) continue;
            const double w = 0.5 * (st + ts);
            // Opposite-signed directed estimates can cancel exactly; such a
            // pair carries no weight and is left out of the support.
            if (w == 0.0) continue;
            out.weights(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = w;
            out.weights(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = w;
            out.support.emplace_back(s, t);
        }
    }
    return out;
}

Eigen::MatrixXd predict_log_odds(const NodewiseFit& fit, const BinaryDataset& newdata) {
    if (newdata.p() != fit.p()) throw std::invalid_argument("predict: column count does not match the fit");
    const auto n = static_cast<Eigen::Index>(newdata.n());
    const auto np = static_cast<Eigen::Index>(fit.p());
    Eigen::MatrixXd x(n, np);
    for (Eigen::Index j = 0; j < np; ++j) {
        const auto col = newdata.column(static_cast<std::size_t>(j));
        for (Eigen::Index i = 0; i < n; ++i) x(i, j) = col[static_cast<std::size_t>(i)];
    }
    // Column s of (x * B^T) is sum_t A_hat_st x_t; the diagonal of B is zero.
    const Eigen::MatrixXd b = fit.directed();
    Eigen::MatrixXd mu = x * b.transpose();
    for (Eigen::Index s = 0; s < np; ++s) mu.col(s).array() += fit.field(static_cast<std::size_t>(s));
    return mu;
}

Eigen::MatrixXd predict_conditionals(const NodewiseFit& fit, const BinaryDataset& newdata) {
    return predict_log_odds(fit, newdata).unaryExpr([](double m) { return sigmoid(m); });
}

} // namespace isingnet
