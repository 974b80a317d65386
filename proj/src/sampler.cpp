#include "isingnet/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isingnet/logistic.hpp"
#include "isingnet/random.hpp"

namespace isingnet {

double conditional_prob(const IsingModel& model, std::size_t node, std::span<const std::uint8_t> config) {
    return sigmoid(model.log_odds(node, config));
}

std::vector<std::uint8_t> config_from_index(std::uint64_t index, std::size_t p) {
    std::vector<std::uint8_t> x(p);
    for (std::size_t s = 0; s < p; ++s) x[s] = static_cast<std::uint8_t>((index >> s) & 1U);
    return x;
}

std::uint64_t index_from_config(std::span<const std::uint8_t> config) {
    std::uint64_t index = 0;
    for (std::size_t s = 0; s < config.size(); ++s) {
        if (config[s]) index |= std::uint64_t{1} << s;
    }
    return index;
}

std::vector<double> exact_pmf(const IsingModel& model) {
    const std::size_t p = model.p();
    if (p > kMaxExactNodes) {
        throw std::invalid_argument("exact enumeration supports p <= " + std::to_string(kMaxExactNodes) +
                                    ", got p=" + std::to_string(p));
    }
    const std::uint64_t count = std::uint64_t{1} << p;
    std::vector<double> logp(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        logp[k] = model.energy(config_from_index(k, p));
    }
    const double top = *std::max_element(logp.begin(), logp.end());
    double z = 0.0;
    for (auto& v : logp) {
        v = std::exp(v - top);
        z += v;
    }
    for (auto& v : logp) v /= z;
    return logp;
}

std::vector<double> exact_marginals(const IsingModel& model) {
    const auto pmf = exact_pmf(model);
    std::vector<double> marg(model.p(), 0.0);
    for (std::uint64_t k = 0; k < pmf.size(); ++k) {
        for (std::size_t s = 0; s < model.p(); ++s) {
            if ((k >> s) & 1U) marg[s] += pmf[k];
        }
    }
    return marg;
}

namespace {

BinaryDataset sample_exact(const IsingModel& model, std::size_t n, std::uint64_t seed) {
    const auto pmf = exact_pmf(model);
    std::vector<double> cdf(pmf.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        acc += pmf[k];
        cdf[k] = acc;
    }
    Rng rng(seed);
    BinaryDataset out(n, model.p());
    for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        const auto k = static_cast<std::uint64_t>(it - cdf.begin());
        for (std::size_t s = 0; s < model.p(); ++s) out.set(i, s, static_cast<std::uint8_t>((k >> s) & 1U));
    }
    return out;
}

class GibbsChain {
public:
    GibbsChain(const IsingModel& model, std::uint64_t seed)
        : model_(model), rng_(seed), state_(model.p(), 0), log_odds_(model.p()) {
        const std::size_t p = model.p();
        neighbors_.resize(p);
        for (std::size_t s = 0; s < p; ++s) {
            log_odds_[s] = model.field(s);
            for (std::size_t t = 0; t < p; ++t) {
                if (t != s && model.interaction(s, t) != 0.0) neighbors_[s].push_back({t, model.interaction(s, t)});
            }
        }
    }

    void sweep() {
        for (std::size_t s = 0; s < state_.size(); ++s) {
            const std::uint8_t next = uniform01(rng_) < sigmoid(log_odds_[s]) ? 1 : 0;
            if (next == state_[s]) continue;
            state_[s] = next;
            const double sign = next ? 1.0 : -1.0;
            for (const auto& [t, w] : neighbors_[s]) log_odds_[t] += sign * w;
        }
    }

    const std::vector<std::uint8_t>& state() const { return state_; }

private:
    struct Neighbor {
        std::size_t node;
        double weight;
    };

    const IsingModel& model_;
    Rng rng_;
    std::vector<std::uint8_t> state_;
    // Running m_s + sum_t A_st x_t, updated on every flip.
    std::vector<double> log_odds_;
    std::vector<std::vector<Neighbor>> neighbors_;
};

} // namespace

BinaryDataset sample(const IsingModel& model, std::size_t n, const SamplerConfig& cfg) {
    if (n < 1) throw std::invalid_argument("sample: n must be at least 1");
    if (cfg.burn_in_sweeps < 0) throw std::invalid_argument("sample: burn_in_sweeps must be >= 0");
    if (cfg.thinning_sweeps < 1) throw std::invalid_argument("sample: thinning_sweeps must be >= 1");
    if (cfg.method == SamplerMethod::Exact) return sample_exact(model, n, cfg.seed);

    GibbsChain chain(model, cfg.seed);
    for (int k = 0; k < cfg.burn_in_sweeps; ++k) chain.sweep();
    BinaryDataset out(n, model.p());
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < cfg.thinning_sweeps; ++k) chain.sweep();
        const auto& x = chain.state();
        for (std::size_t s = 0; s < x.size(); ++s) out.set(i, s, x[s]);
    }
    return out;
}

} // namespace isingnet
