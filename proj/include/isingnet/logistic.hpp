#pragma once

#include <cmath>

namespace isingnet {

/// 1 / (1 + exp(-x)), two-branch form so neither branch overflows.
inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// log(1 + exp(x)) without overflow.
inline double log1pexp(double x) {
    if (x > 30.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

/// Logistic (negative log pseudo-likelihood) loss -y*mu + log(1 + exp(mu)).
inline double logistic_loss(double y, double mu) {
    if (mu > 30.0) return mu - y * mu + std::log1p(std::exp(-mu));
    return -y * mu + std::log1p(std::exp(mu));
}

} // namespace isingnet
