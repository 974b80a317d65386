#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "isingnet/graph.hpp"
#include "isingnet/nodewise.hpp"

namespace isingnet {

enum class SweepMode { Sparsity, Collinearity };

struct ExperimentConfig {
    SweepMode mode = SweepMode::Sparsity;
    std::size_t p = 100;
    std::size_t n = 50;
    /// Rows of independent test data; 0 means n.
    std::size_t n_test = 0;
    /// Edge probabilities (sparsity) or copy fractions alpha (collinearity).
    std::vector<double> grid;
    int reps = 100;
    double ebic_gamma = 0.25;
    Rule rule = Rule::And;
    std::uint64_t seed = 1;
    /// Generating edge probability of the collinearity sweep.
    double collinearity_edge_prob = 0.05;
    WeightSampler weights;
    int burn_in_sweeps = 1000;
    int thinning_sweeps = 10;
    int n_lambdas = 50;
    double lambda_ratio = 0.01;
    unsigned threads = 1;

    /// p=100, n=50, 100 replications.
    static ExperimentConfig full(SweepMode mode);
    /// p=40, n=50, 20 replications.
    static ExperimentConfig desk(SweepMode mode);

    /// Throws std::invalid_argument on reps < 1, grid values outside [0, 1],
    /// an empty grid, or p < 2.
    void validate() const;
};

struct Stat {
    double mean = 0.0;
    double se = 0.0;

    bool operator==(const Stat&) const = default;
};

/// Aggregate over replications (each already averaged over nodes) of one sweep point.
struct ExperimentRecord {
    double condition = 0.0;
    int reps = 0;
    Stat recall;
    Stat precision;
    Stat l1_error_scaled;
    Stat logistic_loss;
    Stat zero_one_loss;
    /// Realised copied fraction of edges; 0 in the sparsity sweep.
    Stat realized_alpha;
    /// Restricted-eigenvalue proxy at the generating parameters.
    Stat gamma_g;
    /// Mean raw interaction l1 error, before scaling by the sweep maximum.
    double l1_error_raw = 0.0;
    /// Largest fraction of degenerate (constant) node fits in any replication.
    double max_degenerate_fraction = 0.0;

    bool operator==(const ExperimentRecord&) const = default;
};

/// Mean and standard error (sample sd / sqrt(count); 0 for one value).
Stat summarize(const std::vector<double>& values);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/**
 * For each edge probability and replication: generate a graph, sample train
 * and test data, fit nodewise, symmetrise and score. The l1 error is scaled by
 * the largest raw error seen anywhere in the sweep.
 */
std::vector<ExperimentRecord> run_sparsity_sweep(const ExperimentConfig& cfg);

/**
 * One graph (at collinearity_edge_prob) and one train/test draw per
 * replication; for each alpha, connected copies are planned and applied to
 * both train and test data before fitting and scoring.
 */
std::vector<ExperimentRecord> run_collinearity_sweep(const ExperimentConfig& cfg);

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg);

enum class ResultFormat { Csv, Json };

/// Column order of the CSV output.
const std::vector<std::string>& result_columns();

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> records_from_csv(const std::string& text);
std::string records_to_json(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> records_from_json(const std::string& text);

/// Writes records sorted by ascending condition. Throws std::runtime_error on I/O failure.
void emit_results(std::vector<ExperimentRecord> records, ResultFormat format, const std::filesystem::path& path);

} // namespace isingnet
