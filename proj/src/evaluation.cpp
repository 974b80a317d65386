#include "isingnet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "isingnet/logistic.hpp"
#include "isingnet/symmetric_eigen.hpp"

namespace isingnet {

RecoveryMetrics recovery_metrics(const EdgeSetEstimate& estimate, const IsingModel& truth,
                                 std::optional<double> scale_u) {
    if (estimate.p() != truth.p()) throw std::invalid_argument("recovery_metrics: node counts differ");
    RecoveryMetrics out;
    double weight_mass = 0.0;
    for (std::size_t s = 0; s < truth.p(); ++s) {
        for (std::size_t t = s + 1; t < truth.p(); ++t) {
            const double a = truth.interaction(s, t);
            const double w = estimate.weights(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
            out.true_edges += a != 0.0;
            out.estimated_edges += w != 0.0;
            out.true_positives += (a != 0.0 && w != 0.0);
            out.l1_error += std::abs(w - a);
            weight_mass += std::abs(a) + std::abs(w);
        }
    }
    out.recall = out.true_edges == 0 ? 1.0
                                     : static_cast<double>(out.true_positives) / static_cast<double>(out.true_edges);
    out.precision = out.estimated_edges == 0
                        ? 1.0
                        : static_cast<double>(out.true_positives) / static_cast<double>(out.estimated_edges);
    out.l1_error_with_fields = out.l1_error;
    if (estimate.fields.size() == static_cast<Eigen::Index>(truth.p())) {
        out.l1_error_with_fields += (estimate.fields - truth.fields()).lpNorm<1>();
    }
    const double u = scale_u.value_or(weight_mass);
    out.l1_error_scaled = u > 0.0 ? out.l1_error / u : 0.0;
    return out;
}

PredictionMetrics prediction_metrics(const NodewiseFit& fit, const BinaryDataset& test) {
    const Eigen::MatrixXd mu = predict_log_odds(fit, test);
    PredictionMetrics out;
    const auto count = static_cast<double>(mu.size());
    if (count == 0.0) return out;
    for (Eigen::Index s = 0; s < mu.cols(); ++s) {
        const auto col = test.column(static_cast<std::size_t>(s));
        for (Eigen::Index i = 0; i < mu.rows(); ++i) {
            const double y = col[static_cast<std::size_t>(i)];
            out.logistic_loss += logistic_loss(y, mu(i, s));
            const double predicted = mu(i, s) > 0.0 ? 1.0 : 0.0;
            out.zero_one_loss += predicted != y;
        }
    }
    out.logistic_loss /= count;
    out.zero_one_loss /= count;
    return out;
}

Eigen::MatrixXd empirical_fisher(const Eigen::VectorXd& theta, const LassoProblem& problem) {
    if (theta.size() != problem.p()) throw std::invalid_argument("empirical_fisher: dimension mismatch");
    const Eigen::VectorXd mu = problem.design * theta;
    Eigen::VectorXd w(mu.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i) w(i) = sigmoid(mu(i)) * sigmoid(-mu(i));
    const Eigen::MatrixXd weighted = problem.design.array().colwise() * w.array();
    Eigen::MatrixXd f = problem.design.transpose() * weighted / static_cast<double>(problem.n());
    // Exact symmetry; the product above is symmetric only up to rounding.
    return 0.5 * (f + f.transpose());
}

ReDiagnostics re_diagnostics(const BinaryDataset& data, const IsingModel& truth,
                             const std::vector<Eigen::VectorXd>& theta_per_node) {
    if (data.p() != truth.p()) throw std::invalid_argument("re_diagnostics: node counts differ");
    if (!theta_per_node.empty() && theta_per_node.size() != truth.p()) {
        throw std::invalid_argument("re_diagnostics: need one coefficient vector per node");
    }
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    ReDiagnostics out;
    out.min_eig_fisher_s0.resize(p);
    out.gamma_g = std::numeric_limits<double>::infinity();
    std::vector<double> w(n);
    for (std::size_t s = 0; s < p; ++s) {
        const Eigen::VectorXd theta = theta_per_node.empty() ? truth.node_parameters(s) : theta_per_node[s];
        if (theta.size() != static_cast<Eigen::Index>(p)) throw std::invalid_argument("re_diagnostics: bad theta size");
        for (std::size_t i = 0; i < n; ++i) {
            double mu = theta(0);
            for (std::size_t t = 0; t < p; ++t) {
                if (t != s && data(i, t)) mu += theta(coefficient_index(s, t));
            }
            w[i] = sigmoid(mu) * sigmoid(-mu);
        }
        // Intercept first, then the true neighbours.
        std::vector<std::size_t> cols;
        for (auto t : truth.neighbors(s)) cols.push_back(t);
        const auto k = static_cast<Eigen::Index>(cols.size() + 1);
        auto entry = [&](std::size_t i, Eigen::Index a) -> double {
            return a == 0 ? 1.0 : static_cast<double>(data(i, cols[static_cast<std::size_t>(a - 1)]));
        };
        Eigen::MatrixXd sub = Eigen::MatrixXd::Zero(k, k);
        for (std::size_t i = 0; i < n; ++i) {
            for (Eigen::Index a = 0; a < k; ++a) {
                const double xa = entry(i, a);
                if (xa == 0.0) continue;
                for (Eigen::Index b = a; b < k; ++b) sub(a, b) += w[i] * xa * entry(i, b);
            }
        }
        sub /= static_cast<double>(n);
        const double smallest = jacobi_eigenvalues(sub)(0);
        out.min_eig_fisher_s0[s] = smallest;
        out.gamma_g = std::min(out.gamma_g, smallest);

        double diag_intercept = 0.0;
        for (std::size_t i = 0; i < n; ++i) diag_intercept += w[i];
        out.max_fisher_diagonal = std::max(out.max_fisher_diagonal, diag_intercept / static_cast<double>(n));
        for (std::size_t t = 0; t < p; ++t) {
            if (t == s) continue;
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += data(i, t) ? w[i] : 0.0;
            out.max_fisher_diagonal = std::max(out.max_fisher_diagonal, d / static_cast<double>(n));
        }
    }
    if (p == 0) out.gamma_g = 0.0;
    out.re_violated = out.gamma_g <= kReViolationThreshold;
    return out;
}

CopyInvarianceReport verify_copy_invariance(const BinaryDataset& data, std::size_t node,
                                            const Eigen::VectorXd& theta, const CopyPlan& plan,
                                            const std::map<std::size_t, std::vector<double>>& weights) {
    if (node >= data.p()) throw std::out_of_range("verify_copy_invariance: node out of range");
    const LassoProblem problem = nodewise_problem(data, node);
    if (theta.size() != problem.p()) throw std::invalid_argument("verify_copy_invariance: dimension mismatch");

    std::map<std::size_t, std::vector<std::size_t>> classes;
    for (const auto& pair : plan.pairs) {
        if (pair.source >= data.p() || pair.target >= data.p()) {
            throw std::out_of_range("verify_copy_invariance: plan index out of range");
        }
        auto& members = classes[pair.source];
        if (members.empty()) members.push_back(pair.source);
        members.push_back(pair.target);
    }

    Eigen::VectorXd weighted = theta;
    std::vector<Eigen::Index> keep;
    std::vector<char> dropped(static_cast<std::size_t>(problem.p()), 0);
    Eigen::VectorXd deleted_full = theta;
    CopyInvarianceReport out;

    for (auto& [source, all_members] : classes) {
        std::sort(all_members.begin() + 1, all_members.end());
        std::vector<std::size_t> members;
        for (auto m : all_members) {
            if (m != node) members.push_back(m);
        }
        if (members.size() < 2) continue;
        ++out.classes;

        const auto first = data.column(members.front());
        for (auto m : members) {
            const auto col = data.column(m);
            if (!std::equal(col.begin(), col.end(), first.begin())) {
                throw std::invalid_argument("verify_copy_invariance: columns of copy class " + std::to_string(source) +
                                            " are not identical");
            }
        }

        std::vector<double> alpha(members.size(), 0.0);
        alpha.front() = 1.0;
        if (auto it = weights.find(source); it != weights.end()) {
            if (it->second.size() != members.size()) {
                throw std::invalid_argument("verify_copy_invariance: class " + std::to_string(source) + " needs " +
                                            std::to_string(members.size()) + " weights");
            }
            alpha = it->second;
            double total = 0.0;
            for (double a : alpha) {
                if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("verify_copy_invariance: weights must lie in [0, 1]");
                total += a;
            }
            if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("verify_copy_invariance: weights must sum to 1");
        }

        double class_total = 0.0;
        for (auto m : members) class_total += theta(coefficient_index(node, m));
        for (std::size_t k = 0; k < members.size(); ++k) {
            weighted(coefficient_index(node, members[k])) = alpha[k] * class_total;
        }
        deleted_full(coefficient_index(node, members.front())) = class_total;
        for (std::size_t k = 1; k < members.size(); ++k) dropped[static_cast<std::size_t>(coefficient_index(node, members[k]))] = 1;
    }

    for (Eigen::Index j = 0; j < problem.p(); ++j) {
        if (!dropped[static_cast<std::size_t>(j)]) keep.push_back(j);
    }
    LassoProblem reduced;
    reduced.y = problem.y;
    reduced.design = problem.design(Eigen::all, keep);
    reduced.penalize_intercept = problem.penalize_intercept;
    const Eigen::VectorXd theta_deleted = deleted_full(keep);

    out.risk_weighted = empirical_risk(weighted, problem);
    out.risk_deleted = empirical_risk(theta_deleted, reduced);
    out.l1_weighted = penalized_l1(weighted, problem);
    out.l1_deleted = penalized_l1(theta_deleted, reduced);
    out.risk_delta = std::abs(out.risk_weighted - out.risk_deleted);
    out.l1_delta = std::abs(out.l1_weighted - out.l1_deleted);
    out.risk_delta_vs_fit = std::abs(empirical_risk(theta, problem) - out.risk_deleted);
    return out;
}

namespace {

RiskOrdering ordering_from_signs(bool any_positive, bool any_negative) {
    if (any_positive && any_negative) return RiskOrdering::Undetermined;
    if (any_positive) return RiskOrdering::BRemovedHigher;
    if (any_negative) return RiskOrdering::BRemovedLower;
    return RiskOrdering::Equal;
}

bool observed_matches(RiskOrdering predicted, double risk_a, double risk_b) {
    constexpr double slack = 1e-12;
    switch (predicted) {
    case RiskOrdering::Equal:
        return std::abs(risk_a - risk_b) <= slack;
    case RiskOrdering::BRemovedHigher:
        return risk_b >= risk_a - slack;
    case RiskOrdering::BRemovedLower:
        return risk_b <= risk_a + slack;
    case RiskOrdering::Undetermined:
        return true;
    }
    return true;
}

} // namespace

MonotonicityReport verify_risk_monotonicity(const Eigen::VectorXd& theta, const BinaryDataset& data,
                                            std::size_t node, const std::vector<std::size_t>& subset_a,
                                            const std::vector<std::size_t>& subset_b) {
    if (node >= data.p()) throw std::out_of_range("verify_risk_monotonicity: node out of range");
    if (theta.size() != static_cast<Eigen::Index>(data.p())) {
        throw std::invalid_argument("verify_risk_monotonicity: dimension mismatch");
    }
    const std::set<std::size_t> a(subset_a.begin(), subset_a.end());
    const std::set<std::size_t> b(subset_b.begin(), subset_b.end());
    if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) {
        throw std::invalid_argument("verify_risk_monotonicity: subsets are not nested");
    }
    for (auto t : b) {
        if (t == node || t >= data.p()) throw std::invalid_argument("verify_risk_monotonicity: bad node in subset");
    }

    MonotonicityReport out;
    std::vector<std::size_t> between;
    for (auto t : b) {
        if (!a.contains(t)) {
            between.push_back(t);
            out.sum_coeff_between += theta(coefficient_index(node, t));
        }
    }

    const auto ys = data.column(node);
    bool row_pos = false;
    bool row_neg = false;
    for (std::size_t i = 0; i < data.n(); ++i) {
        double mu = theta(0);
        for (std::size_t t = 0; t < data.p(); ++t) {
            if (t != node && data(i, t)) mu += theta(coefficient_index(node, t));
        }
        double removed_a = 0.0;
        for (auto t : a) removed_a += data(i, t) ? theta(coefficient_index(node, t)) : 0.0;
        double d = 0.0;
        for (auto t : between) d += data(i, t) ? theta(coefficient_index(node, t)) : 0.0;
        const double mu_a = mu - removed_a;
        const double mu_b = mu_a - d;
        const double y = ys[i];
        out.risk_a_removed += logistic_loss(y, mu_a);
        out.risk_b_removed += logistic_loss(y, mu_b);
        const double signed_d = (2.0 * y - 1.0) * d;
        row_pos |= signed_d > 0.0;
        row_neg |= signed_d < 0.0;
    }
    const auto n = static_cast<double>(data.n());
    out.risk_a_removed /= n;
    out.risk_b_removed /= n;

    out.row_condition = ordering_from_signs(row_pos, row_neg);
    out.sum_rule = ordering_from_signs(out.sum_coeff_between > 0.0, out.sum_coeff_between < 0.0);
    out.consistent = observed_matches(out.row_condition, out.risk_a_removed, out.risk_b_removed);
    out.sum_rule_agrees = observed_matches(out.sum_rule, out.risk_a_removed, out.risk_b_removed);
    return out;
}

namespace {

/// Excess logistic risk per node of the fit over the truth, by enumeration.
std::vector<double> excess_risk_exact(const NodewiseFit& fit, const IsingModel& truth) {
    const std::size_t p = truth.p();
    const auto pmf = exact_pmf(truth);
    std::vector<double> out(p, 0.0);
    for (std::uint64_t k = 0; k < pmf.size(); ++k) {
        const auto x = config_from_index(k, p);
        for (std::size_t s = 0; s < p; ++s) {
            double mu_hat = fit.field(s);
            for (std::size_t t = 0; t < p; ++t) {
                if (t != s && x[t]) mu_hat += fit.interaction(s, t);
            }
            const double mu_star = truth.log_odds(s, x);
            out[s] += pmf[k] * (logistic_loss(x[s], mu_hat) - logistic_loss(x[s], mu_star));
        }
    }
    return out;
}

std::vector<double> excess_risk_sampled(const NodewiseFit& fit, const IsingModel& truth, const BinaryDataset& test) {
    const std::size_t p = truth.p();
    const Eigen::MatrixXd mu_hat = predict_log_odds(fit, test);
    std::vector<double> out(p, 0.0);
    for (std::size_t i = 0; i < test.n(); ++i) {
        const auto x = test.row(i);
        for (std::size_t s = 0; s < p; ++s) {
            out[s] += logistic_loss(x[s], mu_hat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s))) -
                      logistic_loss(x[s], truth.log_odds(s, x));
        }
    }
    for (auto& v : out) v /= static_cast<double>(test.n());
    return out;
}

} // namespace

BoundsReport verify_bounds(const NodewiseFit& fit, const IsingModel& truth, const BinaryDataset& data,
                           const BoundsOptions& options) {
    const std::size_t p = truth.p();
    if (fit.p() != p || data.p() != p) throw std::invalid_argument("verify_bounds: node counts differ");
    BoundsReport out;
    std::vector<double> loss;
    if (p <= options.exact_max_p && p <= kMaxExactNodes) {
        out.exact = true;
        loss = excess_risk_exact(fit, truth);
    } else {
        const std::size_t rows = options.test_rows > 0 ? options.test_rows : std::max<std::size_t>(100000 / p, data.n());
        loss = excess_risk_sampled(fit, truth, sample(truth, rows, options.sampler));
    }

    const ReDiagnostics re = re_diagnostics(data, truth);
    out.gamma_g = re.gamma_g;

    double oracle_lhs_sum = 0.0;
    double oracle_rhs_sum = 0.0;
    double excess_rhs_sum = 0.0;
    std::size_t node_pass = 0;
    out.holds_l1 = true;
    std::size_t worst = 0;
    out.nodes.resize(p);
    for (std::size_t s = 0; s < p; ++s) {
        auto& nb = out.nodes[s];
        const Eigen::VectorXd& hat = fit.per_node[s].theta;
        const Eigen::VectorXd star = truth.node_parameters(s);
        nb.pred_loss = loss[s];
        nb.lambda = fit.per_node[s].lambda;
        nb.l1_hat = hat.tail(hat.size() - 1).lpNorm<1>();
        nb.l1_true = star.tail(star.size() - 1).lpNorm<1>();
        nb.l1_err = (hat - star).lpNorm<1>();
        // The intercept is unpenalised and always in the restricted submatrix,
        // so it counts towards s0 even when m_s happens to be 0.
        nb.s0 = 1 + truth.neighbors(s).size();
        nb.l1_bound = re.gamma_g > 0.0 ? 16.0 / re.gamma_g * static_cast<double>(nb.s0) * nb.lambda
                                         : std::numeric_limits<double>::infinity();

        const double node_lhs = nb.pred_loss + nb.lambda * nb.l1_hat;
        const double node_rhs = 2.0 * nb.lambda * nb.l1_true;
        node_pass += node_lhs <= node_rhs;
        oracle_lhs_sum += node_lhs;
        oracle_rhs_sum += node_rhs;
        excess_rhs_sum += 2.0 * nb.lambda * nb.l1_err;
        out.pred_loss_hat += nb.pred_loss;
        out.holds_l1 = out.holds_l1 && nb.l1_err <= nb.l1_bound;
        if (nb.l1_err > out.nodes[worst].l1_err) worst = s;
    }
    const auto np = static_cast<double>(p);
    out.pred_loss_hat /= np;
    out.oracle_lhs = oracle_lhs_sum / np;
    out.oracle_rhs = oracle_rhs_sum / np;
    out.excess_rhs = excess_rhs_sum / np;
    out.holds_oracle = out.oracle_lhs <= out.oracle_rhs;
    out.holds_excess = out.pred_loss_hat <= out.excess_rhs;
    out.node_oracle_pass_fraction = static_cast<double>(node_pass) / np;
    out.l1_err = out.nodes[worst].l1_err;
    out.l1_bound = out.nodes[worst].l1_bound;
    return out;
}

} // namespace isingnet
