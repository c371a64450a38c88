#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "rjmix/distributions.hpp"
#include "rjmix/gb2_chain.hpp"
#include "rjmix/grouped_data.hpp"
#include "rjmix/inference.hpp"
#include "rjmix/likelihood.hpp"
#include "rjmix/rjmcmc.hpp"
#include "rjmix/rng.hpp"
#include "rjmix/simulate.hpp"

namespace py = pybind11;
using namespace rjmix;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lognormal-mixture income distributions from grouped data";

    py::class_<LognormalParams>(m, "LognormalParams")
        .def(py::init<double, double>(), py::arg("mu"), py::arg("sigma2"))
        .def_readwrite("mu", &LognormalParams::mu)
        .def_readwrite("sigma2", &LognormalParams::sigma2);

    py::class_<Gb2Params>(m, "Gb2Params")
        .def(py::init<double, double, double, double>(), py::arg("a"), py::arg("b"),
             py::arg("p"), py::arg("q"))
        .def_readwrite("a", &Gb2Params::a)
        .def_readwrite("b", &Gb2Params::b)
        .def_readwrite("p", &Gb2Params::p)
        .def_readwrite("q", &Gb2Params::q);

    py::class_<MixtureParams>(m, "MixtureParams")
        .def(py::init([](std::vector<double> weights, std::vector<double> mus,
                         std::vector<double> sigma2s) {
                 MixtureParams p;
                 p.weights = std::move(weights);
                 p.mus = std::move(mus);
                 p.sigma2s = std::move(sigma2s);
                 p.validate();
                 return p;
             }),
             py::arg("weights"), py::arg("mus"), py::arg("sigma2s"))
        .def_readwrite("weights", &MixtureParams::weights)
        .def_readwrite("mus", &MixtureParams::mus)
        .def_readwrite("sigma2s", &MixtureParams::sigma2s)
        .def_property_readonly("r", &MixtureParams::components);

    m.def("ln_pdf", &ln_pdf, py::arg("x"), py::arg("params"));
    m.def("ln_cdf", &ln_cdf, py::arg("x"), py::arg("params"));
    m.def("mln_pdf", &mln_pdf, py::arg("x"), py::arg("params"));
    m.def("mln_cdf", &mln_cdf, py::arg("x"), py::arg("params"));
    m.def("gb2_pdf", &gb2_pdf, py::arg("x"), py::arg("params"));
    m.def("gb2_cdf", &gb2_cdf, py::arg("x"), py::arg("params"));

    py::class_<GroupedData>(m, "GroupedData")
        .def(py::init([](std::vector<double> boundaries, std::vector<long long> counts,
                         std::vector<double> means) {
                 GroupedData d;
                 d.boundaries = std::move(boundaries);
                 d.counts = std::move(counts);
                 d.group_means = std::move(means);
                 d.validate();
                 return d;
             }),
             py::arg("boundaries"), py::arg("counts"),
             py::arg("group_means") = std::vector<double>{})
        .def_readonly("boundaries", &GroupedData::boundaries)
        .def_readonly("counts", &GroupedData::counts)
        .def_readonly("group_means", &GroupedData::group_means)
        .def_property_readonly("n_total", &GroupedData::total)
        .def_static("read_csv",
                    [](const std::string& path) { return read_grouped_csv(path); })
        .def("write_csv",
             [](const GroupedData& d, const std::string& path) { write_grouped_csv(d, path); });

    m.def(
        "simulate_grouped_mln",
        [](const MixtureParams& dgp, long long n, int k, std::uint64_t seed) {
            Rng rng(seed);
            auto sim = simulate_grouped(dgp, n, k, rng);
            return py::make_tuple(sim.grouped, sim.raw);
        },
        py::arg("dgp"), py::arg("n"), py::arg("k"), py::arg("seed"));
    m.def(
        "simulate_grouped_gb2",
        [](const Gb2Params& dgp, long long n, int k, std::uint64_t seed) {
            Rng rng(seed);
            auto sim = simulate_grouped(dgp, n, k, rng);
            return py::make_tuple(sim.grouped, sim.raw);
        },
        py::arg("dgp"), py::arg("n"), py::arg("k"), py::arg("seed"));

    m.def("log_likelihood_grouped_mln",
          py::overload_cast<const GroupedData&, const MixtureParams&>(&log_likelihood_grouped),
          py::arg("data"), py::arg("params"));
    m.def("log_likelihood_grouped_gb2",
          py::overload_cast<const GroupedData&, const Gb2Params&>(&log_likelihood_grouped),
          py::arg("data"), py::arg("params"));

    m.def("gastwirth_bounds", [](const GroupedData& d) { return gastwirth_bounds(d); },
          py::arg("data"));
    m.def("sample_gini",
          [](const std::vector<double>& values) { return sample_gini(values); },
          py::arg("values"));

    py::class_<PriorConfig>(m, "PriorConfig")
        .def(py::init<>())
        .def_readwrite("lambda0", &PriorConfig::lambda0)
        .def_readwrite("r_max", &PriorConfig::r_max)
        .def_readwrite("alpha0", &PriorConfig::alpha0)
        .def_readwrite("mu0", &PriorConfig::mu0)
        .def_readwrite("tau0_2", &PriorConfig::tau0_2)
        .def_readwrite("n0", &PriorConfig::n0)
        .def_readwrite("s0", &PriorConfig::s0)
        .def_readwrite("nu0", &PriorConfig::nu0)
        .def_readwrite("g0", &PriorConfig::g0)
        .def_readwrite("h0", &PriorConfig::h0);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("iterations", &RunConfig::iterations)
        .def_readwrite("burn_in", &RunConfig::burn_in)
        .def_readwrite("thin", &RunConfig::thin)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("initial_r", &RunConfig::initial_r);

    py::class_<DrawRecord>(m, "DrawRecord")
        .def_readonly("iteration", &DrawRecord::iteration)
        .def_readonly("r", &DrawRecord::r)
        .def_readonly("weights", &DrawRecord::weights)
        .def_readonly("mus", &DrawRecord::mus)
        .def_readonly("sigma2s", &DrawRecord::sigma2s)
        .def_readonly("mu", &DrawRecord::mu)
        .def_readonly("tau2", &DrawRecord::tau2)
        .def_readonly("beta", &DrawRecord::beta)
        .def_readonly("log_lik", &DrawRecord::log_lik);

    py::class_<Draws>(m, "Draws")
        .def_readonly("records", &Draws::records)
        .def("__len__", [](const Draws& d) { return d.records.size(); });

    m.def("run_chain", &run_chain, py::arg("data"), py::arg("prior"), py::arg("run"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_prior_chain", &run_prior_chain, py::arg("prior"), py::arg("run"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<Gb2ChainConfig>(m, "Gb2ChainConfig")
        .def(py::init<>())
        .def_readwrite("iterations", &Gb2ChainConfig::iterations)
        .def_readwrite("burn_in", &Gb2ChainConfig::burn_in)
        .def_readwrite("thin", &Gb2ChainConfig::thin)
        .def_readwrite("seed", &Gb2ChainConfig::seed)
        .def_readwrite("prior_only", &Gb2ChainConfig::prior_only);

    py::class_<Gb2DrawRecord>(m, "Gb2DrawRecord")
        .def_readonly("iteration", &Gb2DrawRecord::iteration)
        .def_readonly("params", &Gb2DrawRecord::params)
        .def_readonly("log_lik", &Gb2DrawRecord::log_lik);

    py::class_<Gb2Draws>(m, "Gb2Draws")
        .def_readonly("records", &Gb2Draws::records)
        .def_readonly("acceptance_rate", &Gb2Draws::acceptance_rate)
        .def_readonly("warnings", &Gb2Draws::warnings)
        .def("__len__", [](const Gb2Draws& d) { return d.records.size(); });

    m.def("run_gb2_chain", &run_gb2_chain, py::arg("data"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    m.def("gini_lognormal", &gini_lognormal, py::arg("params"));
    m.def("gini_mixture", &gini_mixture, py::arg("params"));
    m.def("gini_gb2", &gini_gb2, py::arg("params"));
    m.def(
        "gini_posterior",
        [](const Draws& draws, std::optional<int> condition_r) {
            return gini_posterior(draws, condition_r);
        },
        py::arg("draws"), py::arg("condition_r") = std::nullopt,
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "gini_posterior_gb2",
        [](const Gb2Draws& draws) { return gini_posterior(draws); }, py::arg("draws"),
        py::call_guard<py::gil_scoped_release>());

    m.def(
        "predictive_density",
        [](const Draws& draws, const std::vector<double>& grid, std::optional<int> condition_r) {
            return predictive_density(draws, grid, condition_r);
        },
        py::arg("draws"), py::arg("grid"), py::arg("condition_r") = std::nullopt);
    m.def(
        "predictive_density_gb2",
        [](const Gb2Draws& draws, const std::vector<double>& grid) {
            return predictive_density(draws, grid);
        },
        py::arg("draws"), py::arg("grid"));

    py::class_<LogMarginal>(m, "LogMarginal")
        .def_readonly("value", &LogMarginal::value)
        .def_readonly("se", &LogMarginal::se)
        .def_readonly("warning", &LogMarginal::warning);
    m.def(
        "log_marginal_likelihood_hm",
        [](const Draws& draws, std::optional<int> condition_r) {
            return log_marginal_likelihood_hm(draws, condition_r);
        },
        py::arg("draws"), py::arg("condition_r") = std::nullopt);
    m.def(
        "log_marginal_likelihood_hm_gb2",
        [](const Gb2Draws& draws) { return log_marginal_likelihood_hm(draws); },
        py::arg("draws"));

    m.def("half_sample_mode",
          [](const std::vector<double>& values) { return half_sample_mode(values); },
          py::arg("values"));

    py::class_<Summary>(m, "Summary")
        .def_readonly("mean", &Summary::mean)
        .def_readonly("sd", &Summary::sd)
        .def_readonly("mode", &Summary::mode)
        .def_readonly("lower", &Summary::lower)
        .def_readonly("upper", &Summary::upper);
    m.def(
        "posterior_summaries",
        [](const std::vector<double>& values, double level) {
            return posterior_summaries(values, level);
        },
        py::arg("values"), py::arg("credible_level") = 0.95);

    py::class_<RHistogram>(m, "RHistogram")
        .def_readonly("counts", &RHistogram::counts)
        .def_readonly("total", &RHistogram::total)
        .def("prob", &RHistogram::prob)
        .def("mode", &RHistogram::mode);
    m.def("posterior_of_r", &posterior_of_r, py::arg("draws"));
}
