#pragma once

#include <cstdint>
#include <vector>

#include "isingnet/evaluation.hpp"
#include "isingnet/graph.hpp"

namespace isingnet {

/// Shared setup of the replicated verifiers: each replication draws a graph,
/// samples n rows and (where relevant) fits every node.
struct CheckConfig {
    int reps = 20;
    std::uint64_t seed = 1;
    std::size_t p = 10;
    std::size_t n = 200;
    double edge_prob = 0.3;
    WeightSampler weights;
    int burn_in_sweeps = 1000;
    int thinning_sweeps = 10;
    double ebic_gamma = 0.25;

    /// Throws std::invalid_argument on reps < 1, p < 4, n < 2 or edge_prob outside [0, 1].
    void validate() const;
};

/// Tolerance of the exact identities (copy invariance, zero eigenvalues).
inline constexpr double kExactTolerance = 1e-10;

struct CopyCheckRep {
    std::size_t copies = 0;
    double max_risk_delta = 0.0;
    double max_l1_delta = 0.0;
    /// Largest spread of fitted coefficients inside one copy class.
    double max_fit_spread = 0.0;
};

struct CopyCheckResult {
    std::vector<CopyCheckRep> reps;
    double max_risk_delta = 0.0;
    double max_l1_delta = 0.0;
    double max_fit_spread = 0.0;
    bool pass = false;
};

/**
 * Replication k plants 1 + k % 3 connected copies, fits every node and checks
 * the weighted-versus-deleted identity with random class weights for each
 * node. Passes when every delta is within kExactTolerance and the fitted
 * coefficients of each class are equal.
 */
CopyCheckResult run_copy_check(const CheckConfig& cfg);

struct ReCheckRep {
    std::size_t copies = 0;
    /// Nodes whose true neighbourhood holds two members of one copy class.
    std::vector<std::size_t> affected;
    /// Largest smallest-eigenvalue over the affected nodes (0 when none).
    double max_affected_eigenvalue = 0.0;
    double gamma_g = 0.0;
};

struct ReCheckResult {
    std::vector<ReCheckRep> reps;
    std::size_t affected_nodes = 0;
    double max_affected_eigenvalue = 0.0;
    /// Every affected node is at most kExactTolerance, and at least one occurred.
    bool pass = false;
};

/// Plants copies (alpha 0.3 of the edges) and runs re_diagnostics on the copied data.
ReCheckResult run_re_check(const CheckConfig& cfg);

struct MonotonicityCheckResult {
    std::size_t comparisons = 0;
    std::size_t determined = 0;
    std::size_t consistent = 0;
    /// Comparisons where the sum-of-coefficients rule predicted an order.
    std::size_t sum_rule_determined = 0;
    std::size_t sum_rule_agrees = 0;
    bool pass = false;
};

/// Random nested subsets A ⊂ B on every fitted node; passes when no observed
/// ordering contradicts the per-row sign condition.
MonotonicityCheckResult run_monotonicity_check(const CheckConfig& cfg);

struct BoundsCheckRep {
    bool holds_oracle = false;
    bool holds_excess = false;
    bool holds_l1 = false;
    double gamma_g = 0.0;
    double pred_loss = 0.0;
    double oracle_lhs = 0.0;
    double oracle_rhs = 0.0;
    double l1_err = 0.0;
    double l1_bound = 0.0;
};

inline constexpr double kBoundsGammaFloor = 0.05;

struct BoundsCheckResult {
    std::vector<BoundsCheckRep> reps;
    std::size_t oracle_holds = 0;
    /// Replications where the prediction bound held but the excess bound did not.
    std::size_t implication_failures = 0;
    /// Replications with gamma_G > kBoundsGammaFloor, and how many of them met the l1 bound.
    std::size_t l1_qualifying = 0;
    std::size_t l1_holds = 0;
    /// l1 bound over all replications, regardless of gamma_G.
    std::size_t l1_holds_all = 0;
    double oracle_rate = 0.0;
    double l1_rate = 0.0;
    /// oracle_rate >= 0.95, no implication failures, l1_rate >= 0.9.
    bool pass = false;
};

/// Default edge probability of the bounds check (about 4.5 edges at p = 10).
inline constexpr double kBoundsEdgeProb = 0.1;

BoundsCheckResult run_bounds_check(const CheckConfig& cfg, const BoundsOptions& options = {});

} // namespace isingnet
