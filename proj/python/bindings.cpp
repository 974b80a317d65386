#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isingnet/evaluation.hpp"
#include "isingnet/graph.hpp"
#include "isingnet/io.hpp"
#include "isingnet/nodewise.hpp"
#include "isingnet/sampler.hpp"

namespace py = pybind11;
using namespace isingnet;

namespace {

using Array01 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

BinaryDataset to_dataset(const Array01& x) {
    if (x.ndim() != 2) throw std::invalid_argument("data must be a 2-d array");
    const auto n = static_cast<std::size_t>(x.shape(0));
    const auto p = static_cast<std::size_t>(x.shape(1));
    auto v = x.unchecked<2>();
    BinaryDataset d(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) d.set(i, j, v(i, j));
    return d;
}

Array01 to_array(const BinaryDataset& d) {
    Array01 out({d.n(), d.p()});
    auto v = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < d.n(); ++i)
        for (std::size_t j = 0; j < d.p(); ++j) v(i, j) = d(i, j);
    return out;
}

Rule parse_rule(const std::string& rule) {
    if (rule == "and") return Rule::And;
    if (rule == "or") return Rule::Or;
    throw std::invalid_argument("rule must be 'and' or 'or'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Ising network estimation by nodewise l1-penalised logistic regression";

    py::class_<IsingModel>(m, "IsingModel")
        .def(py::init<Eigen::VectorXd, Eigen::MatrixXd>(), py::arg("fields"), py::arg("interactions"))
        .def_property_readonly("p", &IsingModel::p)
        .def_property_readonly("fields", &IsingModel::fields)
        .def_property_readonly("interactions", &IsingModel::interactions)
        .def("edges",
             [](const IsingModel& model) {
                 std::vector<std::tuple<std::size_t, std::size_t, double>> out;
                 for (const auto& e : model.edges()) out.emplace_back(e.s, e.t, e.weight);
                 return out;
             })
        .def("to_json", &io::model_to_json)
        .def_static("from_json", &io::model_from_json, py::arg("text"));

    m.def(
        "generate",
        [](std::size_t p, double edge_prob, std::uint64_t seed, double weight_lo, double weight_hi) {
            WeightSampler w;
            w.weight_lo = weight_lo;
            w.weight_hi = weight_hi;
            return generate_erdos_renyi(p, edge_prob, w, seed);
        },
        py::arg("p"), py::arg("edge_prob"), py::arg("seed") = 1, py::arg("weight_lo") = 0.5,
        py::arg("weight_hi") = 2.0);

    m.def(
        "sample",
        [](const IsingModel& model, std::size_t n, std::uint64_t seed, int burn_in, int thin,
           const std::string& method) {
            SamplerConfig cfg;
            cfg.seed = seed;
            cfg.burn_in_sweeps = burn_in;
            cfg.thinning_sweeps = thin;
            if (method == "exact") cfg.method = SamplerMethod::Exact;
            else if (method != "gibbs") throw std::invalid_argument("method must be 'gibbs' or 'exact'");
            BinaryDataset d;
            {
                py::gil_scoped_release release;
                d = sample(model, n, cfg);
            }
            return to_array(d);
        },
        py::arg("model"), py::arg("n"), py::arg("seed") = 1, py::arg("burn_in") = 1000, py::arg("thin") = 10,
        py::arg("method") = "gibbs");

    m.def("exact_pmf", &exact_pmf, py::arg("model"));

    m.def(
        "fit",
        [](const Array01& x, const std::string& rule, double ebic_gamma, unsigned threads) {
            const BinaryDataset data = to_dataset(x);
            const Rule r = parse_rule(rule);
            EbicConfig cfg;
            cfg.gamma = ebic_gamma;
            NodewiseFit fit;
            {
                py::gil_scoped_release release;
                fit = fit_nodewise(data, cfg, threads);
            }
            const EdgeSetEstimate est = symmetrize(fit, r);
            std::vector<double> lambdas;
            std::vector<bool> degenerate;
            for (const auto& node : fit.per_node) {
                lambdas.push_back(node.lambda);
                degenerate.push_back(node.degenerate);
            }
            py::dict out;
            out["weights"] = est.weights;
            out["fields"] = est.fields;
            out["directed"] = fit.directed();
            out["edges"] = est.support;
            out["lambdas"] = lambdas;
            out["degenerate"] = degenerate;
            return out;
        },
        py::arg("data"), py::arg("rule") = "and", py::arg("ebic_gamma") = 0.25, py::arg("threads") = 1);

    m.def(
        "recovery",
        [](const Eigen::MatrixXd& weights, const IsingModel& truth) {
            EdgeSetEstimate est;
            est.weights = weights;
            est.fields = Eigen::VectorXd::Zero(weights.rows());
            for (Eigen::Index s = 0; s < weights.rows(); ++s)
                for (Eigen::Index t = s + 1; t < weights.cols(); ++t)
                    if (weights(s, t) != 0.0) est.support.emplace_back(s, t);
            const auto r = recovery_metrics(est, truth);
            py::dict out;
            out["recall"] = r.recall;
            out["precision"] = r.precision;
            out["l1_error"] = r.l1_error;
            return out;
        },
        py::arg("weights"), py::arg("truth"));
}
