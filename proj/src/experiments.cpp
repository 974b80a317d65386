#include "isingnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "isingnet/evaluation.hpp"
#include "isingnet/io.hpp"
#include "isingnet/random.hpp"
#include "isingnet/sampler.hpp"

namespace isingnet {

ExperimentConfig ExperimentConfig::full(SweepMode mode) {
    ExperimentConfig cfg;
    cfg.mode = mode;
    cfg.p = 100;
    cfg.n = 50;
    cfg.reps = 100;
    cfg.grid = mode == SweepMode::Sparsity ? std::vector<double>{0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2}
                                           : std::vector<double>{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    return cfg;
}

ExperimentConfig ExperimentConfig::desk(SweepMode mode) {
    ExperimentConfig cfg;
    cfg.mode = mode;
    cfg.p = 40;
    cfg.n = 50;
    cfg.reps = 20;
    cfg.grid = mode == SweepMode::Sparsity ? std::vector<double>{0.025, 0.05, 0.1, 0.15, 0.2}
                                           : std::vector<double>{0.0, 0.2, 0.4, 0.6};
    return cfg;
}

void ExperimentConfig::validate() const {
    if (reps < 1) throw std::invalid_argument("experiment: reps must be >= 1");
    if (p < 2) throw std::invalid_argument("experiment: p must be >= 2");
    if (n < 2) throw std::invalid_argument("experiment: n must be >= 2");
    if (grid.empty()) throw std::invalid_argument("experiment: empty sweep grid");
    for (double v : grid) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("experiment: sweep values must lie in [0, 1]");
    }
    if (!(collinearity_edge_prob >= 0.0 && collinearity_edge_prob <= 1.0)) {
        throw std::invalid_argument("experiment: collinearity edge probability must lie in [0, 1]");
    }
}

Stat summarize(const std::vector<double>& values) {
    Stat out;
    if (values.empty()) return out;
    const auto count = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.se = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    }
    return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

namespace {

struct Replication {
    double recall = 0.0;
    double precision = 0.0;
    double l1_raw = 0.0;
    double logistic_loss = 0.0;
    double zero_one_loss = 0.0;
    double realized_alpha = 0.0;
    double gamma_g = 0.0;
    double degenerate_fraction = 0.0;
};

enum SeedStream : std::uint64_t { kGraph = 1, kTrain = 2, kTest = 3, kCopies = 4 };

SamplerConfig sampler_config(const ExperimentConfig& cfg, std::uint64_t seed) {
    SamplerConfig sc;
    sc.burn_in_sweeps = cfg.burn_in_sweeps;
    sc.thinning_sweeps = cfg.thinning_sweeps;
    sc.seed = seed;
    return sc;
}

EbicConfig ebic_config(const ExperimentConfig& cfg) {
    EbicConfig ec;
    ec.gamma = cfg.ebic_gamma;
    ec.n_lambdas = cfg.n_lambdas;
    ec.ratio = cfg.lambda_ratio;
    return ec;
}

Replication score(const ExperimentConfig& cfg, const IsingModel& truth, const BinaryDataset& train,
                  const BinaryDataset& test) {
    const NodewiseFit fit = fit_nodewise(train, ebic_config(cfg));
    const EdgeSetEstimate est = symmetrize(fit, cfg.rule);
    const RecoveryMetrics rec = recovery_metrics(est, truth);
    const PredictionMetrics pred = prediction_metrics(fit, test);
    Replication r;
    r.recall = rec.recall;
    r.precision = rec.precision;
    r.l1_raw = rec.l1_error;
    r.logistic_loss = pred.logistic_loss;
    r.zero_one_loss = pred.zero_one_loss;
    r.gamma_g = re_diagnostics(train, truth).gamma_g;
    r.degenerate_fraction = static_cast<double>(fit.degenerate_count()) / static_cast<double>(fit.p());
    return r;
}

/// Runs `count` independent work items on cfg.threads workers, results by index.
void run_parallel(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& work) {
    const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (workers == 1) {
        for (std::size_t k = 0; k < count; ++k) work(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t k = next++; k < count; k = next++) work(k);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::vector<ExperimentRecord> aggregate(const ExperimentConfig& cfg, const std::vector<Replication>& reps) {
    const std::size_t per = static_cast<std::size_t>(cfg.reps);
    double u = 0.0;
    for (const auto& r : reps) u = std::max(u, r.l1_raw);

    std::vector<ExperimentRecord> out;
    for (std::size_t c = 0; c < cfg.grid.size(); ++c) {
        std::vector<double> recall, precision, scaled, logistic, zero_one, alpha, gamma, raw;
        ExperimentRecord rec;
        rec.condition = cfg.grid[c];
        rec.reps = cfg.reps;
        for (std::size_t k = 0; k < per; ++k) {
            const auto& r = reps[c * per + k];
            recall.push_back(r.recall);
            precision.push_back(r.precision);
            scaled.push_back(u > 0.0 ? r.l1_raw / u : 0.0);
            logistic.push_back(r.logistic_loss);
            zero_one.push_back(r.zero_one_loss);
            alpha.push_back(r.realized_alpha);
            gamma.push_back(r.gamma_g);
            raw.push_back(r.l1_raw);
            rec.max_degenerate_fraction = std::max(rec.max_degenerate_fraction, r.degenerate_fraction);
        }
        rec.recall = summarize(recall);
        rec.precision = summarize(precision);
        rec.l1_error_scaled = summarize(scaled);
        rec.logistic_loss = summarize(logistic);
        rec.zero_one_loss = summarize(zero_one);
        rec.realized_alpha = summarize(alpha);
        rec.gamma_g = summarize(gamma);
        rec.l1_error_raw = summarize(raw).mean;
        out.push_back(rec);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.condition < b.condition; });
    return out;
}

} // namespace

std::vector<ExperimentRecord> run_sparsity_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t per = static_cast<std::size_t>(cfg.reps);
    const std::size_t n_test = cfg.n_test > 0 ? cfg.n_test : cfg.n;
    std::vector<Replication> reps(cfg.grid.size() * per);
    run_parallel(reps.size(), cfg.threads, [&](std::size_t item) {
        const std::size_t c = item / per;
        const std::size_t k = item % per;
        const std::uint64_t rep_seed = derive_seed(cfg.seed, c, k);
        const IsingModel truth = generate_erdos_renyi(cfg.p, cfg.grid[c], cfg.weights, derive_seed(rep_seed, kGraph));
        const BinaryDataset train = sample(truth, cfg.n, sampler_config(cfg, derive_seed(rep_seed, kTrain)));
        const BinaryDataset test = sample(truth, n_test, sampler_config(cfg, derive_seed(rep_seed, kTest)));
        reps[item] = score(cfg, truth, train, test);
    });
    return aggregate(cfg, reps);
}

std::vector<ExperimentRecord> run_collinearity_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t per = static_cast<std::size_t>(cfg.reps);
    const std::size_t n_test = cfg.n_test > 0 ? cfg.n_test : cfg.n;
    std::vector<Replication> reps(cfg.grid.size() * per);
    run_parallel(reps.size(), cfg.threads, [&](std::size_t item) {
        const std::size_t c = item / per;
        const std::size_t k = item % per;
        // Graph and data depend on the replication only, so every alpha sees
        // the same draw and differs only by the copies.
        const std::uint64_t rep_seed = derive_seed(cfg.seed, 0xC011, k);
        const IsingModel truth =
            generate_erdos_renyi(cfg.p, cfg.collinearity_edge_prob, cfg.weights, derive_seed(rep_seed, kGraph));
        const BinaryDataset train = sample(truth, cfg.n, sampler_config(cfg, derive_seed(rep_seed, kTrain)));
        const BinaryDataset test = sample(truth, n_test, sampler_config(cfg, derive_seed(rep_seed, kTest)));
        const CopyPlan plan = plan_connected_copies(truth, cfg.grid[c], derive_seed(rep_seed, kCopies, c));
        reps[item] = score(cfg, truth, apply_connected_copies(train, plan), apply_connected_copies(test, plan));
        reps[item].realized_alpha = plan.realized_fraction();
    });
    return aggregate(cfg, reps);
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
    return cfg.mode == SweepMode::Sparsity ? run_sparsity_sweep(cfg) : run_collinearity_sweep(cfg);
}

const std::vector<std::string>& result_columns() {
    static const std::vector<std::string> columns = {
        "condition",         "reps",
        "recall_mean",       "recall_se",
        "precision_mean",    "precision_se",
        "l1_scaled_mean",    "l1_scaled_se",
        "logistic_loss_mean", "logistic_loss_se",
        "zero_one_loss_mean", "zero_one_loss_se",
        "realized_alpha_mean", "realized_alpha_se",
        "gamma_g_mean",      "gamma_g_se",
        "l1_raw_mean",       "degenerate_max",
    };
    return columns;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument("results: cannot parse number '" + s + "'");
    }
    return v;
}

std::vector<double> flatten(const ExperimentRecord& r) {
    return {r.condition,
            static_cast<double>(r.reps),
            r.recall.mean,
            r.recall.se,
            r.precision.mean,
            r.precision.se,
            r.l1_error_scaled.mean,
            r.l1_error_scaled.se,
            r.logistic_loss.mean,
            r.logistic_loss.se,
            r.zero_one_loss.mean,
            r.zero_one_loss.se,
            r.realized_alpha.mean,
            r.realized_alpha.se,
            r.gamma_g.mean,
            r.gamma_g.se,
            r.l1_error_raw,
            r.max_degenerate_fraction};
}

ExperimentRecord unflatten(const std::vector<double>& v) {
    if (v.size() != result_columns().size()) throw std::invalid_argument("results: wrong column count");
    ExperimentRecord r;
    r.condition = v[0];
    r.reps = static_cast<int>(v[1]);
    r.recall = {v[2], v[3]};
    r.precision = {v[4], v[5]};
    r.l1_error_scaled = {v[6], v[7]};
    r.logistic_loss = {v[8], v[9]};
    r.zero_one_loss = {v[10], v[11]};
    r.realized_alpha = {v[12], v[13]};
    r.gamma_g = {v[14], v[15]};
    r.l1_error_raw = v[16];
    r.max_degenerate_fraction = v[17];
    return r;
}

} // namespace

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
    std::string out;
    const auto& cols = result_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (k) out += ',';
        out += cols[k];
    }
    out += '\n';
    for (const auto& r : records) {
        const auto values = flatten(r);
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (k) out += ',';
            out += format_double(values[k]);
        }
        out += '\n';
    }
    return out;
}

std::vector<ExperimentRecord> records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("results: empty csv");
    std::string expected;
    for (std::size_t k = 0; k < result_columns().size(); ++k) expected += (k ? "," : "") + result_columns()[k];
    if (line != expected) throw std::invalid_argument("results: unexpected csv header");
    std::vector<ExperimentRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> values;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) values.push_back(parse_double(cell));
        out.push_back(unflatten(values));
    }
    return out;
}

std::string records_to_json(const std::vector<ExperimentRecord>& records) {
    nlohmann::json rows = nlohmann::json::array();
    const auto& cols = result_columns();
    for (const auto& r : records) {
        const auto values = flatten(r);
        nlohmann::json row = nlohmann::json::object();
        for (std::size_t k = 0; k < cols.size(); ++k) row[cols[k]] = values[k];
        rows.push_back(std::move(row));
    }
    return rows.dump(2) + "\n";
}

std::vector<ExperimentRecord> records_from_json(const std::string& text) {
    const auto rows = nlohmann::json::parse(text);
    std::vector<ExperimentRecord> out;
    for (const auto& row : rows) {
        std::vector<double> values;
        for (const auto& c : result_columns()) values.push_back(row.at(c).get<double>());
        out.push_back(unflatten(values));
    }
    return out;
}

void emit_results(std::vector<ExperimentRecord> records, ResultFormat format, const std::filesystem::path& path) {
    std::stable_sort(records.begin(), records.end(),
                     [](const auto& a, const auto& b) { return a.condition < b.condition; });
    io::write_text(path, format == ResultFormat::Csv ? records_to_csv(records) : records_to_json(records));
}

} // namespace isingnet
