#pragma once

#include <cstdint>

#include "isingnet/model.hpp"

namespace isingnet {

enum class FieldRule {
    /// m_s = -(sum of incident weights) / 2, keeps marginals near 1/2.
    HalfIncidentNegative,
    /// m_s = WeightSampler::field_value for every node.
    Constant,
};

/// Distribution of generated edge weights and external fields.
struct WeightSampler {
    double weight_lo = 0.5;
    double weight_hi = 2.0;
    FieldRule field_rule = FieldRule::HalfIncidentNegative;
    double field_value = 0.0;
};

/**
 * Erdos-Renyi graph over p nodes: each pair s < t is an edge independently
 * with probability edge_prob, weight uniform on [weight_lo, weight_hi].
 * Deterministic in `seed`.
 *
 * Throws std::invalid_argument if p < 2, edge_prob is outside [0, 1] or the
 * weight range is reversed.
 */
IsingModel generate_erdos_renyi(std::size_t p, double edge_prob, const WeightSampler& weights,
                                std::uint64_t seed);

/**
 * Picks round(alpha * |E|) edges uniformly without replacement and turns each
 * selected edge (s, t), s < t, into a copy pair source=s, target=t. A candidate
 * is rejected when t is already a target or a source, or s is already a target,
 * so no copy is ever copied again. When rejections exhaust the edge list the
 * plan is shorter than requested; see CopyPlan::realized_fraction().
 */
CopyPlan plan_connected_copies(const IsingModel& model, double alpha, std::uint64_t seed);

/// Column target := column source for every pair. Throws std::out_of_range on a bad index.
BinaryDataset apply_connected_copies(const BinaryDataset& data, const CopyPlan& plan);

} // namespace isingnet
