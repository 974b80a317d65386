#include "isingnet/graph.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "isingnet/random.hpp"

namespace isingnet {

IsingModel generate_erdos_renyi(std::size_t p, double edge_prob, const WeightSampler& weights,
                                std::uint64_t seed) {
    if (p < 2) throw std::invalid_argument("generate_erdos_renyi: p must be at least 2");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
        throw std::invalid_argument("generate_erdos_renyi: edge probability must lie in [0, 1]");
    }
    if (!(weights.weight_lo <= weights.weight_hi)) {
        throw std::invalid_argument("generate_erdos_renyi: weight_lo must not exceed weight_hi");
    }

    Rng rng(seed);
    const auto np = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(np, np);
    for (Eigen::Index s = 0; s < np; ++s) {
        for (Eigen::Index t = s + 1; t < np; ++t) {
            // Both draws are consumed for every pair so the graph for a given
            // seed does not depend on the weight range.
            const double u_edge = uniform01(rng);
            const double u_weight = uniform01(rng);
            if (u_edge < edge_prob) {
                const double w = weights.weight_lo + (weights.weight_hi - weights.weight_lo) * u_weight;
                a(s, t) = w;
                a(t, s) = w;
            }
        }
    }

    Eigen::VectorXd m(np);
    switch (weights.field_rule) {
    case FieldRule::HalfIncidentNegative:
        m = -0.5 * a.colwise().sum().transpose();
        break;
    case FieldRule::Constant:
        m.setConstant(weights.field_value);
        break;
    }
    return IsingModel(std::move(m), std::move(a));
}

CopyPlan plan_connected_copies(const IsingModel& model, double alpha, std::uint64_t seed) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("plan_connected_copies: alpha must lie in [0, 1]");
    }
    auto edges = model.edges();
    CopyPlan plan;
    plan.alpha = alpha;
    plan.edge_count = edges.size();

    // std::round rounds half away from zero.
    const auto wanted = static_cast<std::size_t>(std::round(alpha * static_cast<double>(edges.size())));
    if (wanted == 0) return plan;

    Rng rng(seed);
    for (std::size_t i = edges.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(edges[i - 1], edges[j]);
    }

    std::vector<char> is_source(model.p(), 0);
    std::vector<char> is_target(model.p(), 0);
    for (const auto& e : edges) {
        if (plan.pairs.size() == wanted) break;
        if (is_target[e.t] || is_source[e.t] || is_target[e.s]) continue;
        is_source[e.s] = 1;
        is_target[e.t] = 1;
        plan.pairs.push_back({e.s, e.t});
    }
    std::sort(plan.pairs.begin(), plan.pairs.end());
    return plan;
}

BinaryDataset apply_connected_copies(const BinaryDataset& data, const CopyPlan& plan) {
    BinaryDataset out = data;
    for (const auto& pair : plan.pairs) {
        if (pair.source >= data.p() || pair.target >= data.p()) {
            throw std::out_of_range("apply_connected_copies: node index " +
                                    std::to_string(std::max(pair.source, pair.target)) +
                                    " out of range for p=" + std::to_string(data.p()));
        }
        const auto src = out.column(pair.source);
        auto dst = out.column(pair.target);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

} // namespace isingnet
