#include "isingnet/model.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

namespace isingnet {

IsingModel::IsingModel(Eigen::VectorXd fields, Eigen::MatrixXd interactions)
    : fields_(std::move(fields)), interactions_(std::move(interactions)) {
    const auto p = fields_.size();
    if (interactions_.rows() != p || interactions_.cols() != p) {
        throw std::invalid_argument("IsingModel: interaction matrix must be p x p");
    }
    for (Eigen::Index s = 0; s < p; ++s) {
        if (interactions_(s, s) != 0.0) {
            throw std::invalid_argument("IsingModel: interaction diagonal must be zero");
        }
        for (Eigen::Index t = s + 1; t < p; ++t) {
            if (interactions_(s, t) != interactions_(t, s)) {
                throw std::invalid_argument("IsingModel: interaction matrix must be symmetric");
            }
        }
    }
}

IsingModel IsingModel::from_edges(Eigen::VectorXd fields, std::span<const Edge> edges) {
    const auto p = fields.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    for (const auto& e : edges) {
        if (e.s >= static_cast<std::size_t>(p) || e.t >= static_cast<std::size_t>(p) || e.s == e.t) {
            throw std::invalid_argument("IsingModel: bad edge (" + std::to_string(e.s) + ", " +
                                        std::to_string(e.t) + ")");
        }
        const auto s = static_cast<Eigen::Index>(e.s);
        const auto t = static_cast<Eigen::Index>(e.t);
        a(s, t) = e.weight;
        a(t, s) = e.weight;
    }
    return IsingModel(std::move(fields), std::move(a));
}

std::vector<Edge> IsingModel::edges() const {
    std::vector<Edge> out;
    const auto p = fields_.size();
    for (Eigen::Index s = 0; s < p; ++s) {
        for (Eigen::Index t = s + 1; t < p; ++t) {
            if (interactions_(s, t) != 0.0) {
                out.push_back({static_cast<std::size_t>(s), static_cast<std::size_t>(t), interactions_(s, t)});
            }
        }
    }
    return out;
}

std::size_t IsingModel::edge_count() const {
    std::size_t count = 0;
    const auto p = fields_.size();
    for (Eigen::Index s = 0; s < p; ++s) {
        for (Eigen::Index t = s + 1; t < p; ++t) {
            count += interactions_(s, t) != 0.0;
        }
    }
    return count;
}

std::vector<std::size_t> IsingModel::neighbors(std::size_t s) const {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < p(); ++t) {
        if (t != s && interaction(s, t) != 0.0) out.push_back(t);
    }
    return out;
}

double IsingModel::log_odds(std::size_t s, std::span<const std::uint8_t> config) const {
    double mu = field(s);
    const auto row = interactions_.col(static_cast<Eigen::Index>(s));
    for (std::size_t t = 0; t < config.size(); ++t) {
        if (config[t]) mu += row(static_cast<Eigen::Index>(t));
    }
    return mu;
}

double IsingModel::energy(std::span<const std::uint8_t> config) const {
    double e = 0.0;
    for (std::size_t s = 0; s < p(); ++s) {
        if (!config[s]) continue;
        e += field(s);
        for (std::size_t t = s + 1; t < p(); ++t) {
            if (config[t]) e += interaction(s, t);
        }
    }
    return e;
}

Eigen::VectorXd IsingModel::node_parameters(std::size_t s) const {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(p()));
    theta(0) = field(s);
    Eigen::Index k = 1;
    for (std::size_t t = 0; t < p(); ++t) {
        if (t != s) theta(k++) = interaction(s, t);
    }
    return theta;
}

BinaryDataset::BinaryDataset(std::size_t n, std::size_t p) : n_(n), p_(p), values_(n * p, 0) {}

BinaryDataset::BinaryDataset(std::size_t n, std::size_t p, std::vector<std::uint8_t> column_major)
    : n_(n), p_(p), values_(std::move(column_major)) {
    if (values_.size() != n * p) {
        throw std::invalid_argument("BinaryDataset: expected n*p values");
    }
    if (std::any_of(values_.begin(), values_.end(), [](std::uint8_t v) { return v > 1; })) {
        throw std::invalid_argument("BinaryDataset: entries must be 0 or 1");
    }
}

BinaryDataset BinaryDataset::from_rows(const std::vector<std::vector<std::uint8_t>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t p = n == 0 ? 0 : rows.front().size();
    BinaryDataset out(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != p) throw std::invalid_argument("BinaryDataset: ragged rows");
        for (std::size_t j = 0; j < p; ++j) out.set(i, j, rows[i][j]);
    }
    return out;
}

void BinaryDataset::set(std::size_t i, std::size_t j, std::uint8_t v) {
    if (v > 1) throw std::invalid_argument("BinaryDataset: entries must be 0 or 1");
    values_[j * n_ + i] = v;
}

std::vector<std::uint8_t> BinaryDataset::row(std::size_t i) const {
    std::vector<std::uint8_t> out(p_);
    for (std::size_t j = 0; j < p_; ++j) out[j] = (*this)(i, j);
    return out;
}

bool BinaryDataset::column_is_constant(std::size_t j) const {
    const auto col = column(j);
    return std::adjacent_find(col.begin(), col.end(), std::not_equal_to<>()) == col.end();
}

} // namespace isingnet
