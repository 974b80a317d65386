#include "isingnet/checks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "isingnet/nodewise.hpp"
#include "isingnet/random.hpp"
#include "isingnet/sampler.hpp"

namespace isingnet {

void CheckConfig::validate() const {
    if (reps < 1) throw std::invalid_argument("check: reps must be >= 1");
    if (p < 4) throw std::invalid_argument("check: p must be >= 4");
    if (n < 2) throw std::invalid_argument("check: n must be >= 2");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw std::invalid_argument("check: edge_prob must lie in [0, 1]");
}

namespace {

enum Stream : std::uint64_t { kGraph = 1, kData = 2, kPlan = 3, kWeights = 4, kTest = 5 };

struct Draw {
    IsingModel truth;
    BinaryDataset data;
};

/// Graph with at least `min_edges` edges (redrawn until it has them) and its sample.
Draw draw(const CheckConfig& cfg, std::uint64_t rep_seed, std::size_t min_edges = 0) {
    Draw d;
    for (std::uint64_t attempt = 0;; ++attempt) {
        d.truth = generate_erdos_renyi(cfg.p, cfg.edge_prob, cfg.weights, derive_seed(rep_seed, kGraph, attempt));
        if (d.truth.edge_count() >= min_edges) break;
        if (attempt > 1000) throw std::runtime_error("check: edge probability too small for the requested copies");
    }
    SamplerConfig sc;
    sc.burn_in_sweeps = cfg.burn_in_sweeps;
    sc.thinning_sweeps = cfg.thinning_sweeps;
    sc.seed = derive_seed(rep_seed, kData);
    d.data = sample(d.truth, cfg.n, sc);
    return d;
}

EbicConfig ebic(const CheckConfig& cfg) {
    EbicConfig ec;
    ec.gamma = cfg.ebic_gamma;
    return ec;
}

/// Copy classes: source first, then its targets ascending.
std::vector<std::vector<std::size_t>> copy_classes(const CopyPlan& plan) {
    std::map<std::size_t, std::vector<std::size_t>> by_source;
    for (const auto& pair : plan.pairs) {
        auto& members = by_source[pair.source];
        if (members.empty()) members.push_back(pair.source);
        members.push_back(pair.target);
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto& [source, members] : by_source) {
        std::sort(members.begin() + 1, members.end());
        out.push_back(members);
    }
    return out;
}

} // namespace

CopyCheckResult run_copy_check(const CheckConfig& cfg) {
    cfg.validate();
    CopyCheckResult out;
    for (int k = 0; k < cfg.reps; ++k) {
        const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
        const std::size_t wanted = 1 + static_cast<std::size_t>(k % 3);
        const Draw d = draw(cfg, rep_seed, wanted);
        const double alpha = static_cast<double>(wanted) / static_cast<double>(d.truth.edge_count());
        const CopyPlan plan = plan_connected_copies(d.truth, alpha, derive_seed(rep_seed, kPlan));
        const BinaryDataset data = apply_connected_copies(d.data, plan);
        const NodewiseFit fit = fit_nodewise(data, ebic(cfg));
        const auto classes = copy_classes(plan);

        CopyCheckRep rep;
        rep.copies = plan.pairs.size();
        Rng rng(derive_seed(rep_seed, kWeights));
        for (std::size_t node = 0; node < data.p(); ++node) {
            std::map<std::size_t, std::vector<double>> weights;
            const Eigen::VectorXd& theta = fit.per_node[node].theta;
            for (const auto& members : classes) {
                std::vector<std::size_t> rest;
                for (auto m : members) {
                    if (m != node) rest.push_back(m);
                }
                if (rest.size() < 2) continue;
                std::vector<double> w(rest.size());
                double total = 0.0;
                for (auto& v : w) total += (v = uniform01(rng) + 1e-3);
                for (auto& v : w) v /= total;
                weights[members.front()] = w;

                double lo = theta(coefficient_index(node, rest.front()));
                double hi = lo;
                for (auto m : rest) {
                    lo = std::min(lo, theta(coefficient_index(node, m)));
                    hi = std::max(hi, theta(coefficient_index(node, m)));
                }
                rep.max_fit_spread = std::max(rep.max_fit_spread, hi - lo);
            }
            const auto report = verify_copy_invariance(data, node, theta, plan, weights);
            rep.max_risk_delta = std::max({rep.max_risk_delta, report.risk_delta, report.risk_delta_vs_fit});
            rep.max_l1_delta = std::max(rep.max_l1_delta, report.l1_delta);
        }
        out.max_risk_delta = std::max(out.max_risk_delta, rep.max_risk_delta);
        out.max_l1_delta = std::max(out.max_l1_delta, rep.max_l1_delta);
        out.max_fit_spread = std::max(out.max_fit_spread, rep.max_fit_spread);
        out.reps.push_back(rep);
    }
    out.pass = out.max_risk_delta <= kExactTolerance && out.max_l1_delta <= kExactTolerance && out.max_fit_spread == 0.0;
    return out;
}

ReCheckResult run_re_check(const CheckConfig& cfg) {
    cfg.validate();
    ReCheckResult out;
    bool all_zero = true;
    for (int k = 0; k < cfg.reps; ++k) {
        const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
        const Draw d = draw(cfg, rep_seed, 2);
        const CopyPlan plan = plan_connected_copies(d.truth, 0.3, derive_seed(rep_seed, kPlan));
        const BinaryDataset data = apply_connected_copies(d.data, plan);
        const ReDiagnostics re = re_diagnostics(data, d.truth);
        const auto classes = copy_classes(plan);

        ReCheckRep rep;
        rep.copies = plan.pairs.size();
        rep.gamma_g = re.gamma_g;
        for (std::size_t u = 0; u < d.truth.p(); ++u) {
            const auto nb = d.truth.neighbors(u);
            bool affected = false;
            for (const auto& members : classes) {
                const auto inside = std::count_if(members.begin(), members.end(), [&](std::size_t m) {
                    return std::find(nb.begin(), nb.end(), m) != nb.end();
                });
                affected = affected || inside >= 2;
            }
            if (!affected) continue;
            rep.affected.push_back(u);
            rep.max_affected_eigenvalue = std::max(rep.max_affected_eigenvalue, std::abs(re.min_eig_fisher_s0[u]));
            all_zero = all_zero && std::abs(re.min_eig_fisher_s0[u]) <= kExactTolerance &&
                       re.gamma_g <= kExactTolerance;
        }
        out.affected_nodes += rep.affected.size();
        out.max_affected_eigenvalue = std::max(out.max_affected_eigenvalue, rep.max_affected_eigenvalue);
        out.reps.push_back(rep);
    }
    out.pass = all_zero && out.affected_nodes > 0;
    return out;
}

MonotonicityCheckResult run_monotonicity_check(const CheckConfig& cfg) {
    cfg.validate();
    MonotonicityCheckResult out;
    bool ok = true;
    for (int k = 0; k < cfg.reps; ++k) {
        const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
        const Draw d = draw(cfg, rep_seed);
        const NodewiseFit fit = fit_nodewise(d.data, ebic(cfg));
        Rng rng(derive_seed(rep_seed, kWeights));
        for (std::size_t node = 0; node < d.data.p(); ++node) {
            if (fit.per_node[node].degenerate) continue;
            std::vector<std::size_t> a, b;
            for (std::size_t t = 0; t < d.data.p(); ++t) {
                if (t == node || uniform01(rng) < 0.5) continue;
                b.push_back(t);
                if (uniform01(rng) < 0.5) a.push_back(t);
            }
            if (b.empty()) continue;
            const auto r = verify_risk_monotonicity(fit.per_node[node].theta, d.data, node, a, b);
            ++out.comparisons;
            out.determined += r.row_condition != RiskOrdering::Undetermined;
            out.consistent += r.consistent;
            if (r.sum_rule != RiskOrdering::Undetermined && r.sum_rule != RiskOrdering::Equal) {
                ++out.sum_rule_determined;
                out.sum_rule_agrees += r.sum_rule_agrees;
            }
            ok = ok && r.consistent;
        }
    }
    out.pass = ok && out.comparisons > 0;
    return out;
}

BoundsCheckResult run_bounds_check(const CheckConfig& cfg, const BoundsOptions& options) {
    cfg.validate();
    BoundsCheckResult out;
    for (int k = 0; k < cfg.reps; ++k) {
        const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(k));
        const Draw d = draw(cfg, rep_seed);
        const NodewiseFit fit = fit_nodewise(d.data, ebic(cfg));
        BoundsOptions opts = options;
        opts.sampler.seed = derive_seed(rep_seed, kTest);
        const BoundsReport b = verify_bounds(fit, d.truth, d.data, opts);

        BoundsCheckRep rep;
        rep.holds_oracle = b.holds_oracle;
        rep.holds_excess = b.holds_excess;
        rep.holds_l1 = b.holds_l1;
        rep.gamma_g = b.gamma_g;
        rep.pred_loss = b.pred_loss_hat;
        rep.oracle_lhs = b.oracle_lhs;
        rep.oracle_rhs = b.oracle_rhs;
        rep.l1_err = b.l1_err;
        rep.l1_bound = b.l1_bound;
        out.oracle_holds += b.holds_oracle;
        out.implication_failures += b.holds_oracle && !b.holds_excess;
        out.l1_holds_all += b.holds_l1;
        if (b.gamma_g > kBoundsGammaFloor) {
            ++out.l1_qualifying;
            out.l1_holds += b.holds_l1;
        }
        out.reps.push_back(rep);
    }
    out.oracle_rate = static_cast<double>(out.oracle_holds) / static_cast<double>(cfg.reps);
    out.l1_rate = out.l1_qualifying == 0 ? 1.0
                                         : static_cast<double>(out.l1_holds) / static_cast<double>(out.l1_qualifying);
    out.pass = out.oracle_rate >= 0.95 && out.implication_failures == 0 && out.l1_rate >= 0.9;
    return out;
}

} // namespace isingnet
