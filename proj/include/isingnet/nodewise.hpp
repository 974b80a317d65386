#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "isingnet/model.hpp"
#include "isingnet/selection.hpp"

namespace isingnet {

/// Position of node t inside node s's coefficient vector (0 is the intercept).
inline Eigen::Index coefficient_index(std::size_t s, std::size_t t) {
    return static_cast<Eigen::Index>(t < s ? t + 1 : t);
}

/// Node behind coefficient position k >= 1 of node s's vector.
inline std::size_t node_at(std::size_t s, Eigen::Index k) {
    const auto t = static_cast<std::size_t>(k - 1);
    return t < s ? t : t + 1;
}

/// y = column s, design = (1, remaining columns in node order), lambda = 0.
LassoProblem nodewise_problem(const BinaryDataset& data, std::size_t s);

struct NodeFit {
    /// (m_s, A_st for t != s ascending).
    Eigen::VectorXd theta;
    double lambda = 0.0;
    std::vector<double> lambdas;
    std::vector<double> scores;
    int iterations = 0;
    double max_kkt_violation = 0.0;
    bool converged = false;
    /// Constant response column: theta is zero and no fit was attempted.
    bool degenerate = false;
};

struct NodewiseFit {
    std::vector<NodeFit> per_node;

    std::size_t p() const { return per_node.size(); }
    double field(std::size_t s) const { return per_node[s].theta(0); }
    /// Directed estimate A_hat[s][t] from node s's regression.
    double interaction(std::size_t s, std::size_t t) const {
        return s == t ? 0.0 : per_node[s].theta(coefficient_index(s, t));
    }
    Eigen::MatrixXd directed() const;
    std::size_t degenerate_count() const;
};

/**
 * Regresses every node on all others with EBIC-selected lambda. Nodes are
 * independent; with threads > 1 they are fitted concurrently and gathered by
 * index, so the result does not depend on the schedule.
 * Throws std::invalid_argument if n < 2.
 */
NodewiseFit fit_nodewise(const BinaryDataset& data, const EbicConfig& cfg, unsigned threads = 1);

enum class Rule { And, Or };

struct EdgeSetEstimate {
    /// Symmetric, zero diagonal; W[s][t] != 0 exactly on the support.
    Eigen::MatrixXd weights;
    /// Estimated fields (intercepts), carried for field-inclusive error.
    Eigen::VectorXd fields;
    std::vector<std::pair<std::size_t, std::size_t>> support;
    Rule rule = Rule::And;

    std::size_t p() const { return static_cast<std::size_t>(weights.rows()); }
};

/**
 * AND: edge iff both directed coefficients are nonzero. OR: iff either is.
 * Present edges get the mean of the two directed coefficients (a zero side
 * counts under OR).
 */
EdgeSetEstimate symmetrize(const NodewiseFit& fit, Rule rule);

/// (i, s) -> sigma(m_hat_s + sum_t A_hat_st x_it), using each node's own directed fit.
Eigen::MatrixXd predict_conditionals(const NodewiseFit& fit, const BinaryDataset& newdata);

/// Log-odds counterpart of predict_conditionals.
Eigen::MatrixXd predict_log_odds(const NodewiseFit& fit, const BinaryDataset& newdata);

} // namespace isingnet
