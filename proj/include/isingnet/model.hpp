#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace isingnet {

/// An undirected weighted edge with s < t.
struct Edge {
    std::size_t s = 0;
    std::size_t t = 0;
    double weight = 0.0;

    bool operator==(const Edge&) const = default;
};

/**
 * Ising model over p binary nodes: external fields m and a symmetric
 * interaction matrix A with zero diagonal.
 *
 *   P(x) ∝ exp( sum_s m_s x_s + sum_{s<t} A_st x_s x_t ),   x ∈ {0,1}^p
 */
class IsingModel {
public:
    IsingModel() = default;

    /// Throws std::invalid_argument if A is not square, symmetric with a zero
    /// diagonal, or its size differs from m.
    IsingModel(Eigen::VectorXd fields, Eigen::MatrixXd interactions);

    /// Builds a model from an edge list; duplicate edges overwrite.
    static IsingModel from_edges(Eigen::VectorXd fields, std::span<const Edge> edges);

    std::size_t p() const { return static_cast<std::size_t>(fields_.size()); }
    const Eigen::VectorXd& fields() const { return fields_; }
    const Eigen::MatrixXd& interactions() const { return interactions_; }
    double field(std::size_t s) const { return fields_(static_cast<Eigen::Index>(s)); }
    double interaction(std::size_t s, std::size_t t) const {
        return interactions_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
    }

    /// Edges (s < t, A_st != 0) in lexicographic order.
    std::vector<Edge> edges() const;
    std::size_t edge_count() const;
    /// Nodes t with A_st != 0, ascending.
    std::vector<std::size_t> neighbors(std::size_t s) const;

    /// m_s + sum_t A_st x_t. `config` holds p entries in {0,1}.
    double log_odds(std::size_t s, std::span<const std::uint8_t> config) const;
    /// Unnormalised log-probability of a configuration.
    double energy(std::span<const std::uint8_t> config) const;

    /// Node s's true coefficient vector in nodewise layout: (m_s, A_st for t != s ascending).
    Eigen::VectorXd node_parameters(std::size_t s) const;

    bool operator==(const IsingModel& other) const {
        return fields_ == other.fields_ && interactions_ == other.interactions_;
    }

private:
    Eigen::VectorXd fields_;
    Eigen::MatrixXd interactions_;
};

/// n x p matrix of {0,1} observations, stored column-major.
class BinaryDataset {
public:
    BinaryDataset() = default;
    /// All-zero dataset.
    BinaryDataset(std::size_t n, std::size_t p);
    /// `column_major` must have n*p entries, each 0 or 1.
    BinaryDataset(std::size_t n, std::size_t p, std::vector<std::uint8_t> column_major);

    static BinaryDataset from_rows(const std::vector<std::vector<std::uint8_t>>& rows);

    std::size_t n() const { return n_; }
    std::size_t p() const { return p_; }

    std::uint8_t operator()(std::size_t i, std::size_t j) const { return values_[j * n_ + i]; }
    /// Throws std::invalid_argument on a value other than 0 or 1.
    void set(std::size_t i, std::size_t j, std::uint8_t v);

    std::span<const std::uint8_t> column(std::size_t j) const {
        return {values_.data() + j * n_, n_};
    }
    std::span<std::uint8_t> column(std::size_t j) { return {values_.data() + j * n_, n_}; }
    std::vector<std::uint8_t> row(std::size_t i) const;
    bool column_is_constant(std::size_t j) const;

    const std::vector<std::uint8_t>& values() const { return values_; }

    bool operator==(const BinaryDataset&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t p_ = 0;
    std::vector<std::uint8_t> values_;
};

/// Ordered (source, target) pairs: column `target` is overwritten with column `source`.
struct CopyPair {
    std::size_t source = 0;
    std::size_t target = 0;

    bool operator==(const CopyPair&) const = default;
    auto operator<=>(const CopyPair&) const = default;
};

struct CopyPlan {
    std::vector<CopyPair> pairs;
    /// Requested fraction of edges to copy.
    double alpha = 0.0;
    /// |E| of the generating graph.
    std::size_t edge_count = 0;

    /// pairs.size() / edge_count, 0 for an empty graph.
    double realized_fraction() const {
        return edge_count == 0 ? 0.0 : static_cast<double>(pairs.size()) / static_cast<double>(edge_count);
    }
};

} // namespace isingnet
