#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "isingnet/checks.hpp"
#include "isingnet/experiments.hpp"
#include "isingnet/graph.hpp"
#include "isingnet/io.hpp"
#include "isingnet/nodewise.hpp"
#include "isingnet/sampler.hpp"

using namespace isingnet;
using nlohmann::json;

namespace {

// Exit codes beyond CLI11's own.
constexpr int kExitError = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitCheckFailed = 3;

struct WeightFlags {
    double lo = 0.5;
    double hi = 2.0;
    std::string field_rule = "half-incident";
    double field_value = 0.0;

    void add(CLI::App* app) {
        app->add_option("--weight-lo", lo, "Lower end of the edge-weight range")->capture_default_str();
        app->add_option("--weight-hi", hi, "Upper end of the edge-weight range")->capture_default_str();
        app->add_option("--field-rule", field_rule, "half-incident: m_s = -(incident weight)/2; constant: m_s = --field-value")
            ->check(CLI::IsMember({"half-incident", "constant"}))
            ->capture_default_str();
        app->add_option("--field-value", field_value, "Field used by --field-rule constant")->capture_default_str();
    }

    WeightSampler sampler() const {
        WeightSampler w;
        w.weight_lo = lo;
        w.weight_hi = hi;
        w.field_rule = field_rule == "constant" ? FieldRule::Constant : FieldRule::HalfIncidentNegative;
        w.field_value = field_value;
        return w;
    }

    json describe() const {
        json j = {{"weight_distribution", "uniform"}, {"weight_lo", lo}, {"weight_hi", hi}, {"field_rule", field_rule}};
        if (field_rule == "constant") j["field_value"] = field_value;
        return j;
    }
};

void write_json(const std::string& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

Rule parse_rule(const std::string& s) { return s == "or" ? Rule::Or : Rule::And; }

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad grid value '" + item + "'");
        out.push_back(v);
    }
    return out;
}

json fit_to_json(const NodewiseFit& fit, const EdgeSetEstimate& est, double gamma) {
    json j;
    j["p"] = fit.p();
    j["rule"] = est.rule == Rule::And ? "and" : "or";
    j["ebic_gamma"] = gamma;
    auto& nodes = j["per_node"] = json::array();
    for (std::size_t s = 0; s < fit.p(); ++s) {
        const auto& f = fit.per_node[s];
        json node = {{"node", s},
                     {"lambda", f.lambda},
                     {"intercept", f.theta(0)},
                     {"converged", f.converged},
                     {"degenerate", f.degenerate},
                     {"iterations", f.iterations},
                     {"max_kkt_violation", f.max_kkt_violation}};
        auto& coef = node["coefficients"] = json::array();
        for (std::size_t t = 0; t < fit.p(); ++t) coef.push_back(fit.interaction(s, t));
        nodes.push_back(node);
    }
    auto& w = j["W"] = json::array();
    for (Eigen::Index s = 0; s < est.weights.rows(); ++s) {
        json row = json::array();
        for (Eigen::Index t = 0; t < est.weights.cols(); ++t) row.push_back(est.weights(s, t));
        w.push_back(row);
    }
    auto& edges = j["edges"] = json::array();
    for (const auto& [s, t] : est.support) {
        edges.push_back(json::array({s, t, est.weights(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t))}));
    }
    j["degenerate_nodes"] = fit.degenerate_count();
    return j;
}

json check_config_json(const CheckConfig& c) {
    return {{"reps", c.reps}, {"seed", c.seed}, {"p", c.p}, {"n", c.n}, {"edge_prob", c.edge_prob},
            {"burn_in_sweeps", c.burn_in_sweeps}, {"thinning_sweeps", c.thinning_sweeps}, {"ebic_gamma", c.ebic_gamma}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ising network estimation by nodewise l1-penalised logistic regression"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Random Erdos-Renyi Ising model");
    std::size_t gen_p = 0;
    double gen_edge_prob = 0.0;
    std::uint64_t gen_seed = 1;
    std::string gen_out, gen_meta;
    WeightFlags gen_weights;
    gen->add_option("--p", gen_p, "Number of nodes")->required();
    gen->add_option("--edge-prob", gen_edge_prob, "Edge probability")->required();
    gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Model JSON")->required();
    gen->add_option("--meta", gen_meta, "Optional JSON recording the generator settings");
    gen_weights.add(gen);

    // sample
    auto* smp = app.add_subcommand("sample", "Draw a 0/1 dataset from a model");
    std::string smp_model, smp_out, smp_method = "gibbs";
    std::size_t smp_n = 0;
    SamplerConfig smp_cfg;
    smp->add_option("--model", smp_model, "Model JSON")->required()->check(CLI::ExistingFile);
    smp->add_option("--n", smp_n, "Rows")->required();
    smp->add_option("--seed", smp_cfg.seed, "Random seed")->capture_default_str();
    smp->add_option("--burnin", smp_cfg.burn_in_sweeps, "Burn-in sweeps")->capture_default_str();
    smp->add_option("--thin", smp_cfg.thinning_sweeps, "Sweeps between recorded rows")->capture_default_str();
    smp->add_option("--method", smp_method, "gibbs or exact (p <= 16)")
        ->check(CLI::IsMember({"gibbs", "exact"}))
        ->capture_default_str();
    smp->add_option("--out", smp_out, "Dataset CSV")->required();

    // fit
    auto* fit = app.add_subcommand("fit", "Nodewise estimation with EBIC-selected lambda");
    std::string fit_data, fit_out, fit_rule = "and";
    double fit_gamma = 0.25;
    unsigned fit_threads = 1;
    fit->add_option("--data", fit_data, "Dataset CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--rule", fit_rule, "and or or")->check(CLI::IsMember({"and", "or"}))->capture_default_str();
    fit->add_option("--ebic-gamma", fit_gamma, "EBIC gamma")->capture_default_str();
    fit->add_option("--threads", fit_threads, "Worker threads (result does not depend on it)")->capture_default_str();
    fit->add_option("--out", fit_out, "Fit JSON")->required();

    // verify
    auto* ver = app.add_subcommand("verify", "Replicated checks of the estimator's properties");
    std::string ver_check, ver_out;
    CheckConfig ver_cfg;
    ver->add_option("--check", ver_check, "copies, monotonicity, bounds or re")
        ->required()
        ->check(CLI::IsMember({"copies", "monotonicity", "bounds", "re"}));
    auto* ver_reps = ver->add_option("--reps", ver_cfg.reps, "Replications (default 100 for bounds, else 20)");
    ver->add_option("--seed", ver_cfg.seed, "Random seed")->capture_default_str();
    ver->add_option("--p", ver_cfg.p, "Nodes")->capture_default_str();
    ver->add_option("--n", ver_cfg.n, "Rows")->capture_default_str();
    auto* ver_edge = ver->add_option("--edge-prob", ver_cfg.edge_prob, "Edge probability (default 0.1 for bounds, else 0.3)");
    ver->add_option("--ebic-gamma", ver_cfg.ebic_gamma, "EBIC gamma")->capture_default_str();
    ver->add_option("--out", ver_out, "Report JSON")->required();

    // experiment
    auto* exp = app.add_subcommand("experiment", "Sparsity or collinearity sweep");
    std::string exp_mode = "sparsity", exp_preset, exp_grid, exp_rule = "and", exp_out, exp_format;
    ExperimentConfig exp_cfg;
    WeightFlags exp_weights;
    exp->add_option("--mode", exp_mode, "sparsity or collinearity")
        ->check(CLI::IsMember({"sparsity", "collinearity"}))
        ->capture_default_str();
    exp->add_option("--preset", exp_preset, "desk (p=40, 20 reps) or paper (p=100, 100 reps)")
        ->check(CLI::IsMember({"desk", "paper"}));
    auto* exp_p = exp->add_option("--p", exp_cfg.p, "Nodes");
    auto* exp_n = exp->add_option("--n", exp_cfg.n, "Training rows");
    auto* exp_reps = exp->add_option("--reps", exp_cfg.reps, "Replications per condition");
    exp->add_option("--grid", exp_grid, "Comma-separated edge probabilities or copy fractions");
    auto* exp_seed = exp->add_option("--seed", exp_cfg.seed, "Random seed");
    auto* exp_gamma = exp->add_option("--ebic-gamma", exp_cfg.ebic_gamma, "EBIC gamma");
    exp->add_option("--rule", exp_rule, "and or or")->check(CLI::IsMember({"and", "or"}))->capture_default_str();
    auto* exp_ntest = exp->add_option("--n-test", exp_cfg.n_test, "Test rows (default n)");
    auto* exp_edge = exp->add_option("--edge-prob", exp_cfg.collinearity_edge_prob, "Edge probability of the collinearity sweep");
    auto* exp_burn = exp->add_option("--burnin", exp_cfg.burn_in_sweeps, "Burn-in sweeps");
    auto* exp_thin = exp->add_option("--thin", exp_cfg.thinning_sweeps, "Sweeps between recorded rows");
    auto* exp_threads = exp->add_option("--threads", exp_cfg.threads, "Worker threads (result does not depend on it)");
    exp->add_option("--format", exp_format, "csv or json (default from the --out extension)")
        ->check(CLI::IsMember({"csv", "json"}));
    exp->add_option("--out", exp_out, "Results file; settings go to <out>.meta.json")->required();
    exp_weights.add(exp);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const auto model = generate_erdos_renyi(gen_p, gen_edge_prob, gen_weights.sampler(), gen_seed);
            io::write_model(model, gen_out);
            if (!gen_meta.empty()) {
                json meta = {{"generator", "erdos_renyi"}, {"p", gen_p}, {"edge_prob", gen_edge_prob},
                             {"seed", gen_seed}, {"edges", model.edge_count()}};
                meta.update(gen_weights.describe());
                write_json(gen_meta, meta);
            }
            std::cerr << "generated p=" << model.p() << " with " << model.edge_count() << " edges\n";
        } else if (*smp) {
            smp_cfg.method = smp_method == "exact" ? SamplerMethod::Exact : SamplerMethod::Gibbs;
            const auto data = sample(io::read_model(smp_model), smp_n, smp_cfg);
            io::write_dataset(data, std::filesystem::path(smp_out));
        } else if (*fit) {
            const auto data = io::read_dataset(std::filesystem::path(fit_data));
            EbicConfig ec;
            ec.gamma = fit_gamma;
            const auto nf = fit_nodewise(data, ec, fit_threads);
            const auto est = symmetrize(nf, parse_rule(fit_rule));
            write_json(fit_out, fit_to_json(nf, est, fit_gamma));
            std::cerr << "fitted " << est.support.size() << " edges";
            if (nf.degenerate_count() > 0) std::cerr << "; " << nf.degenerate_count() << " constant columns";
            std::cerr << '\n';
        } else if (*ver) {
            const bool bounds = ver_check == "bounds";
            if (ver_reps->count() == 0) ver_cfg.reps = bounds ? 100 : 20;
            if (ver_edge->count() == 0) ver_cfg.edge_prob = bounds ? kBoundsEdgeProb : 0.3;
            json report = {{"check", ver_check}, {"config", check_config_json(ver_cfg)}};
            bool pass = false;
            if (ver_check == "copies") {
                const auto r = run_copy_check(ver_cfg);
                pass = r.pass;
                report["max_risk_delta"] = r.max_risk_delta;
                report["max_l1_delta"] = r.max_l1_delta;
                report["max_fit_spread"] = r.max_fit_spread;
                report["tolerance"] = kExactTolerance;
                auto& reps = report["reps"] = json::array();
                for (const auto& rep : r.reps) {
                    reps.push_back({{"copies", rep.copies}, {"risk_delta", rep.max_risk_delta},
                                    {"l1_delta", rep.max_l1_delta}, {"fit_spread", rep.max_fit_spread}});
                }
            } else if (ver_check == "re") {
                const auto r = run_re_check(ver_cfg);
                pass = r.pass;
                report["affected_nodes"] = r.affected_nodes;
                report["max_affected_eigenvalue"] = r.max_affected_eigenvalue;
                report["tolerance"] = kExactTolerance;
                auto& reps = report["reps"] = json::array();
                for (const auto& rep : r.reps) {
                    reps.push_back({{"copies", rep.copies}, {"affected", rep.affected}, {"gamma_g", rep.gamma_g},
                                    {"max_affected_eigenvalue", rep.max_affected_eigenvalue}});
                }
            } else if (ver_check == "monotonicity") {
                const auto r = run_monotonicity_check(ver_cfg);
                pass = r.pass;
                report["comparisons"] = r.comparisons;
                report["determined"] = r.determined;
                report["consistent"] = r.consistent;
                report["sum_rule_determined"] = r.sum_rule_determined;
                report["sum_rule_agrees"] = r.sum_rule_agrees;
            } else {
                const auto r = run_bounds_check(ver_cfg);
                pass = r.pass;
                report["prediction_bound_holds"] = r.oracle_holds;
                report["prediction_bound_rate"] = r.oracle_rate;
                report["implication_failures"] = r.implication_failures;
                report["l1_qualifying"] = r.l1_qualifying;
                report["l1_holds"] = r.l1_holds;
                report["l1_holds_all"] = r.l1_holds_all;
                report["gamma_floor"] = kBoundsGammaFloor;
                auto& reps = report["reps"] = json::array();
                for (const auto& rep : r.reps) {
                    reps.push_back({{"prediction_bound", rep.holds_oracle}, {"excess_bound", rep.holds_excess},
                                    {"l1_bound", rep.holds_l1}, {"gamma_g", rep.gamma_g},
                                    {"pred_loss", rep.pred_loss}, {"lhs", rep.oracle_lhs}, {"rhs", rep.oracle_rhs},
                                    {"l1_err", rep.l1_err}, {"l1_bound_value", rep.l1_bound}});
                }
            }
            report["pass"] = pass;
            write_json(ver_out, report);
            std::cerr << ver_check << ": " << (pass ? "pass" : "FAIL") << '\n';
            if (!pass) return kExitCheckFailed;
        } else if (*exp) {
            const auto mode = exp_mode == "collinearity" ? SweepMode::Collinearity : SweepMode::Sparsity;
            ExperimentConfig cfg = exp_preset == "paper" ? ExperimentConfig::full(mode) : ExperimentConfig::desk(mode);
            if (exp_preset.empty() && exp_grid.empty()) throw std::invalid_argument("experiment: give --grid or --preset");
            // Explicit flags override the preset.
            if (exp_p->count()) cfg.p = exp_cfg.p;
            if (exp_n->count()) cfg.n = exp_cfg.n;
            if (exp_reps->count()) cfg.reps = exp_cfg.reps;
            if (exp_seed->count()) cfg.seed = exp_cfg.seed;
            if (exp_gamma->count()) cfg.ebic_gamma = exp_cfg.ebic_gamma;
            if (exp_ntest->count()) cfg.n_test = exp_cfg.n_test;
            if (exp_edge->count()) cfg.collinearity_edge_prob = exp_cfg.collinearity_edge_prob;
            if (exp_burn->count()) cfg.burn_in_sweeps = exp_cfg.burn_in_sweeps;
            if (exp_thin->count()) cfg.thinning_sweeps = exp_cfg.thinning_sweeps;
            if (exp_threads->count()) cfg.threads = exp_cfg.threads;
            if (!exp_grid.empty()) cfg.grid = parse_grid(exp_grid);
            cfg.rule = parse_rule(exp_rule);
            cfg.weights = exp_weights.sampler();

            const auto records = run_experiment(cfg);
            const bool as_json =
                exp_format.empty() ? std::filesystem::path(exp_out).extension() == ".json" : exp_format == "json";
            emit_results(records, as_json ? ResultFormat::Json : ResultFormat::Csv, exp_out);

            json meta = {{"mode", exp_mode},
                         {"preset", exp_preset.empty() ? "none" : exp_preset},
                         {"p", cfg.p},
                         {"n", cfg.n},
                         {"n_test", cfg.n_test > 0 ? cfg.n_test : cfg.n},
                         {"reps", cfg.reps},
                         {"grid", cfg.grid},
                         {"seed", cfg.seed},
                         {"ebic_gamma", cfg.ebic_gamma},
                         {"rule", exp_rule},
                         {"n_lambdas", cfg.n_lambdas},
                         {"lambda_ratio", cfg.lambda_ratio},
                         {"burn_in_sweeps", cfg.burn_in_sweeps},
                         {"thinning_sweeps", cfg.thinning_sweeps},
                         {"columns", result_columns()}};
            if (mode == SweepMode::Collinearity) meta["edge_prob"] = cfg.collinearity_edge_prob;
            meta.update(exp_weights.describe());
            write_json(exp_out + ".meta.json", meta);

            double worst = 0.0;
            for (const auto& r : records) worst = std::max(worst, r.max_degenerate_fraction);
            if (worst > 0.5) {
                std::cerr << "experiment: up to " << worst * 100.0
                          << "% of nodes had constant columns in one replication\n";
                return kExitDegenerate;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "isingnet: error: " << e.what() << '\n';
        return kExitError;
    }
    return EXIT_SUCCESS;
}
