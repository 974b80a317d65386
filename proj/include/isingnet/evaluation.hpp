#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "isingnet/model.hpp"
#include "isingnet/nodewise.hpp"
#include "isingnet/sampler.hpp"

namespace isingnet {

struct RecoveryMetrics {
    double recall = 1.0;
    double precision = 1.0;
    /// sum_{s<t} |W_hat_st - A_st|, interactions only.
    double l1_error = 0.0;
    double l1_error_scaled = 0.0;
    /// l1_error plus sum_s |m_hat_s - m_s|.
    double l1_error_with_fields = 0.0;
    std::size_t true_edges = 0;
    std::size_t estimated_edges = 0;
    std::size_t true_positives = 0;
};

/**
 * Support and weight recovery against the generating model. recall and
 * precision are 1 when their denominators are empty. The scaled error divides
 * by `scale_u`; without one, u = sum_{s<t} |A_st| + |W_hat_st|, which bounds
 * the raw error.
 */
RecoveryMetrics recovery_metrics(const EdgeSetEstimate& estimate, const IsingModel& truth,
                                 std::optional<double> scale_u = std::nullopt);

struct PredictionMetrics {
    /// Mean psi(x_is, mu_hat_is) over rows and nodes.
    double logistic_loss = 0.0;
    /// Mean of 1{ 1{mu_hat_is > 0} != x_is }; mu = 0 predicts 0.
    double zero_one_loss = 0.0;
};

PredictionMetrics prediction_metrics(const NodewiseFit& fit, const BinaryDataset& test);

/// (1/n) sum_i pi(mu_i) pi(-mu_i) d_i d_i'.
Eigen::MatrixXd empirical_fisher(const Eigen::VectorXd& theta, const LassoProblem& problem);

struct ReDiagnostics {
    /// Smallest eigenvalue of each node's Fisher submatrix on {intercept} ∪ S0(s).
    std::vector<double> min_eig_fisher_s0;
    double gamma_g = 0.0;
    /// Largest diagonal Fisher entry over all nodes (the empirical K).
    double max_fisher_diagonal = 0.0;
    bool re_violated = false;
};

inline constexpr double kReViolationThreshold = 1e-10;

/**
 * Restricted-eigenvalue proxy: for every node, the Fisher matrix at
 * theta_per_node[s] (the generating parameters when empty) restricted to the
 * intercept and the true neighbours, and its smallest eigenvalue by Jacobi.
 * gamma_G is the minimum over nodes.
 */
ReDiagnostics re_diagnostics(const BinaryDataset& data, const IsingModel& truth,
                             const std::vector<Eigen::VectorXd>& theta_per_node = {});

struct CopyInvarianceReport {
    double risk_weighted = 0.0;
    double risk_deleted = 0.0;
    double l1_weighted = 0.0;
    double l1_deleted = 0.0;
    double risk_delta = 0.0;
    double l1_delta = 0.0;
    /// |risk(fit) - risk_deleted|.
    double risk_delta_vs_fit = 0.0;
    std::size_t classes = 0;
};

/**
 * Connected-copy invariance for node `node`'s regression on data containing
 * the plan's copies.
 *
 * Each copy class (a source and its targets, minus `node`) holds identical
 * design columns. With T the class's fitted coefficient total, the weighted
 * solution gives member k the value weights[k] * T. It is compared with the
 * design where every member but the first is deleted and the first carries T.
 *
 * `weights` maps a source node to one weight per remaining class member
 * (source first, then targets ascending); absent classes put all weight on
 * the first member. Throws std::invalid_argument if weights fall outside
 * [0, 1], do not sum to 1 or a class's columns are not identical.
 */
CopyInvarianceReport verify_copy_invariance(const BinaryDataset& data, std::size_t node,
                                            const Eigen::VectorXd& theta, const CopyPlan& plan,
                                            const std::map<std::size_t, std::vector<double>>& weights = {});

enum class RiskOrdering {
    /// Every row contributes zero difference.
    Equal,
    /// risk_B_removed >= risk_A_removed.
    BRemovedHigher,
    /// risk_B_removed <= risk_A_removed.
    BRemovedLower,
    Undetermined,
};

struct MonotonicityReport {
    double risk_a_removed = 0.0;
    double risk_b_removed = 0.0;
    /// sum of theta_j over j in B \ A.
    double sum_coeff_between = 0.0;
    /// Ordering implied by the signs of (2 y_i - 1) * sum_{j in B\A} x_ij theta_j.
    RiskOrdering row_condition = RiskOrdering::Undetermined;
    /// Ordering the sum-of-coefficients rule predicts (positive sum: keeping B\A lowers risk).
    RiskOrdering sum_rule = RiskOrdering::Undetermined;
    /// Observed risks agree with row_condition whenever it is determined.
    bool consistent = true;
    /// Observed risks agree with sum_rule whenever it is determined.
    bool sum_rule_agrees = true;
};

/**
 * Zeroes the contributions of node sets A ⊂ B out of node `node`'s linear
 * predictor and compares the two empirical risks. Per row,
 *
 *   psi(y, m) - psi(y, m + d) >= 0   whenever (2y - 1) d >= 0,
 *
 * so a uniform sign of (2y_i - 1) d_i across rows fixes the ordering exactly.
 * Throws std::invalid_argument unless A ⊂ B and neither contains `node`.
 */
MonotonicityReport verify_risk_monotonicity(const Eigen::VectorXd& theta, const BinaryDataset& data,
                                            std::size_t node, const std::vector<std::size_t>& subset_a,
                                            const std::vector<std::size_t>& subset_b);

struct BoundsOptions {
    /// Enumerate the pmf when p is at most this.
    std::size_t exact_max_p = 12;
    /// Monte Carlo rows otherwise; 0 means max(100000 / p, n).
    std::size_t test_rows = 0;
    SamplerConfig sampler;
};

struct NodeBounds {
    double pred_loss = 0.0;
    double lambda = 0.0;
    double l1_hat = 0.0;
    double l1_true = 0.0;
    /// ||theta_hat - theta*||_1 including the intercept.
    double l1_err = 0.0;
    /// 1 (intercept) + number of true neighbours.
    std::size_t s0 = 0;
    double l1_bound = 0.0;
};

struct BoundsReport {
    /// Mean over nodes of the excess logistic risk.
    double pred_loss_hat = 0.0;
    /// Node means of L + lambda ||theta_hat||_1 and 2 lambda ||theta*||_1.
    double oracle_lhs = 0.0;
    double oracle_rhs = 0.0;
    /// Node mean of 2 lambda ||theta_hat - theta*||_1.
    double excess_rhs = 0.0;
    /// max_s ||theta_hat_s - theta*_s||_1.
    double l1_err = 0.0;
    /// The l1 bound at the node attaining l1_err (infinite when gamma_G <= 0).
    double l1_bound = 0.0;
    double gamma_g = 0.0;
    bool holds_oracle = false;
    bool holds_excess = false;
    bool holds_l1 = false;
    double node_oracle_pass_fraction = 0.0;
    bool exact = false;
    std::vector<NodeBounds> nodes;
};

/**
 * Evaluates both sides of the prediction bound L + lambda||theta_hat||_1 <=
 * 2 lambda ||theta*||_1, the estimation-error bound L <= 2 lambda
 * ||theta_hat - theta*||_1 and the l1 bound ||delta_s||_1 <= 16 s0 lambda /
 * gamma_G. L is the excess logistic risk over fresh data from `truth`:
 * exact when p <= exact_max_p, Monte Carlo otherwise.
 */
BoundsReport verify_bounds(const NodewiseFit& fit, const IsingModel& truth, const BinaryDataset& data,
                           const BoundsOptions& options = {});

} // namespace isingnet
