#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isingnet/model.hpp"

namespace isingnet {

enum class SamplerMethod { Gibbs, Exact };

struct SamplerConfig {
    int burn_in_sweeps = 1000;
    int thinning_sweeps = 10;
    std::uint64_t seed = 0;
    SamplerMethod method = SamplerMethod::Gibbs;
};

/// Largest p accepted by exact enumeration.
inline constexpr std::size_t kMaxExactNodes = 16;

/// P(X_s = 1 | x_{\s}) for the model's conditional at node s.
double conditional_prob(const IsingModel& model, std::size_t node, std::span<const std::uint8_t> config);

/**
 * Exact pmf over all 2^p configurations. Index bit s holds x_s. Throws
 * std::invalid_argument when p exceeds kMaxExactNodes.
 */
std::vector<double> exact_pmf(const IsingModel& model);

/// Exact P(X_s = 1) for every node, by enumeration.
std::vector<double> exact_marginals(const IsingModel& model);

/// Configuration for an enumeration index.
std::vector<std::uint8_t> config_from_index(std::uint64_t index, std::size_t p);
std::uint64_t index_from_config(std::span<const std::uint8_t> config);

/**
 * Draws n rows from the model.
 *
 * Gibbs: sequential-scan heat-bath updates from the all-zero state, one sweep
 * being p single-site updates in node order. After burn_in_sweeps, a row is
 * recorded every thinning_sweeps sweeps of the running chain.
 *
 * Exact: enumerates the pmf and draws n i.i.d. rows by inverse CDF.
 */
BinaryDataset sample(const IsingModel& model, std::size_t n, const SamplerConfig& cfg);

} // namespace isingnet
