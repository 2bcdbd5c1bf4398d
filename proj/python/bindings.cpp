// Python bindings for the pricing core. Vectors map to lists, optionals to
// None.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pricelab/config.hpp"
#include "pricelab/dqn_agent.hpp"
#include "pricelab/equilibria.hpp"
#include "pricelab/errors.hpp"
#include "pricelab/experiments.hpp"
#include "pricelab/inflation_data.hpp"
#include "pricelab/market.hpp"
#include "pricelab/metrics.hpp"
#include "pricelab/run_record.hpp"
#include "pricelab/stats.hpp"

namespace py = pybind11;
using namespace pricelab;

namespace {

MarketState make_state(const MarketParams& params, double cost, double price_index,
                       std::optional<std::vector<double>> alpha) {
  MarketState s = MarketState::initial(params, 1);
  s.cost = cost;
  s.price_index = price_index;
  if (alpha) {
    if (alpha->size() != s.alpha.size()) throw py::value_error("alpha must have n_agents entries");
    s.alpha = *alpha;
  } else {
    for (auto& a : s.alpha) a *= price_index;
  }
  return s;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["repetition"] = s.repetition;
  d["series"] = s.series;
  d["synthetic_series"] = s.synthetic_series;
  d["steps"] = s.steps;
  d["mu"] = s.mu;
  d["final_window_nabla"] = s.final_window_nabla;
  d["nabla_defined"] = s.nabla_defined;
  d["nabla_undefined"] = s.nabla_undefined;
  d["delta_undefined"] = s.delta_undefined;
  d["time_to_supra"] = s.time_to_supra;
  d["punishment"] = s.punishment ? py::object(py::str(to_string(*s.punishment))) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Algorithmic pricing under inflation: market, equilibria, metrics and experiments";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<MissingArtifact>(m, "MissingArtifact", PyExc_FileNotFoundError);

  py::class_<MarketParams>(m, "MarketParams")
      .def(py::init<>())
      .def_readwrite("n_agents", &MarketParams::n_agents)
      .def_readwrite("mu", &MarketParams::mu)
      .def_readwrite("alpha0", &MarketParams::alpha0)
      .def_readwrite("c0", &MarketParams::c0)
      .def_readwrite("alpha_init", &MarketParams::alpha_init)
      .def_readwrite("eta_min", &MarketParams::eta_min)
      .def_readwrite("eta_max", &MarketParams::eta_max)
      .def_readwrite("m_actions", &MarketParams::m_actions);

  py::class_<EquilibriumSolution>(m, "EquilibriumSolution")
      .def_readonly("prices", &EquilibriumSolution::prices)
      .def_readonly("quantities", &EquilibriumSolution::quantities)
      .def_readonly("deflated_profits", &EquilibriumSolution::deflated_profits)
      .def_readonly("foc_residual", &EquilibriumSolution::foc_residual)
      .def_readonly("iterations", &EquilibriumSolution::iterations)
      .def("mean_profit", &EquilibriumSolution::mean_profit);

  m.def(
      "logit_demand",
      [](const std::vector<double>& prices, const MarketParams& params, double cost, double price_index,
         std::optional<std::vector<double>> alpha) {
        return logit_demand(prices, make_state(params, cost, price_index, std::move(alpha)), params);
      },
      py::arg("prices"), py::arg("params") = MarketParams{}, py::arg("cost") = 1.0, py::arg("price_index") = 1.0,
      py::arg("alpha") = py::none(),
      "Per-firm logit quantities. alpha defaults to alpha_init scaled by price_index.");
  m.def("margin_grid", &margin_grid, py::arg("params") = MarketParams{});
  m.def(
      "solve_nash",
      [](const MarketParams& params, double cost, double price_index, std::optional<std::vector<double>> alpha) {
        return solve_nash(make_state(params, cost, price_index, std::move(alpha)), params);
      },
      py::arg("params") = MarketParams{}, py::arg("cost") = 1.0, py::arg("price_index") = 1.0,
      py::arg("alpha") = py::none());
  m.def(
      "solve_monopoly",
      [](const MarketParams& params, double cost, double price_index, std::optional<std::vector<double>> alpha) {
        return solve_monopoly(make_state(params, cost, price_index, std::move(alpha)), params);
      },
      py::arg("params") = MarketParams{}, py::arg("cost") = 1.0, py::arg("price_index") = 1.0,
      py::arg("alpha") = py::none());

  m.def("delta", &delta, py::arg("mean_reward"), py::arg("nash"), py::arg("monopoly"));
  m.def("nabla", &nabla, py::arg("mean_reward"), py::arg("forced_nash"), py::arg("forced_monopoly"));
  m.def(
      "decompose",
      [](double mean_reward, double static_nash, double static_monopoly, double forced_nash,
         double forced_monopoly) -> std::optional<py::dict> {
        const auto row = make_metric_row(0, mean_reward, static_nash, static_monopoly, forced_nash, forced_monopoly);
        const auto d = decompose(row);
        if (!d) return std::nullopt;
        py::dict out;
        out["delta"] = row.delta;
        out["nabla"] = row.nabla;
        out["inflation_effect"] = d->inflation_effect;
        out["xi"] = d->xi;
        return out;
      },
      py::arg("mean_reward"), py::arg("static_nash"), py::arg("static_monopoly"), py::arg("forced_nash"),
      py::arg("forced_monopoly"));
  m.def(
      "time_to_supra",
      [](const std::vector<double>& values, std::size_t window) { return time_to_supra(values, window); },
      py::arg("nabla_values"), py::arg("window") = kSupraWindow);
  m.def(
      "punishment_classify",
      [](const std::vector<int>& actions, std::size_t deviation_step) {
        return std::string(to_string(punishment_classify(actions, deviation_step)));
      },
      py::arg("responder_actions"), py::arg("deviation_step"));

  m.def(
      "cohens_d",
      [](const std::vector<double>& a, const std::vector<double>& b) -> std::optional<py::tuple> {
        const auto d = cohens_d(a, b);
        if (!d) return std::nullopt;
        return py::make_tuple(d->d, std::string(to_string(d->size)));
      },
      py::arg("a"), py::arg("b"), "Paired Cohen's d as (d, label).");
  m.def(
      "effect_label", [](double d) { return std::string(to_string(classify_effect(d))); }, py::arg("d"));
  m.def(
      "welch_t_test",
      [](const std::vector<double>& a, const std::vector<double>& b) -> std::optional<py::dict> {
        const auto w = welch_t_test(a, b);
        if (!w) return std::nullopt;
        py::dict out;
        out["t"] = w->t;
        out["df"] = w->df;
        out["p"] = w->p;
        return out;
      },
      py::arg("a"), py::arg("b"));
  m.def("epsilon", &epsilon, py::arg("t"), py::arg("beta"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def("__getitem__", [](const RunConfig& c, const std::string& key) {
        if (!is_config_key(key)) throw py::key_error(key);
        return get_config_value(c, key);
      })
      .def("__setitem__", [](RunConfig& c, const std::string& key, py::object value) {
        set_config_value(c, key, py::str(value).cast<std::string>());
      })
      .def("keys", [] {
        std::vector<std::string> keys;
        for (const auto& f : config_fields()) keys.emplace_back(f.key);
        return keys;
      })
      .def("to_text", &to_config_text)
      .def_static("from_text", [](const std::string& text) { return parse_config_text(text); })
      .def_static("load", [](const std::filesystem::path& p) { return load_config_file(p); });

  m.def(
      "run_in_sample",
      [](const RunConfig& cfg, std::size_t jobs) {
        RunOptions options;
        options.jobs = jobs;
        BatchResult batch;
        {
          py::gil_scoped_release release;
          batch = run_in_sample(cfg, options);
        }
        py::dict out;
        out["per_run_mu"] = batch.per_run_mu;
        out["mu"] = batch.mu ? py::object(py::float_(batch.mu->mu)) : py::none();
        out["sigma"] = batch.sigma;
        out["failures"] = batch.failures;
        py::list runs;
        for (const auto& r : batch.runs) runs.append(summary_dict(r.summary));
        out["runs"] = runs;
        return out;
      },
      py::arg("config"), py::arg("jobs") = 1, "Train a batch and return per-run summaries.");

  m.def(
      "load_inflation_csv",
      [](const std::filesystem::path& path) {
        py::dict out;
        for (const auto& s : load_inflation_csv(path)) out[py::str(s.country)] = s.rates;
        return out;
      },
      py::arg("path"), "Country -> list of monthly rates as fractions.");
  m.def("run_csv_header", &run_csv_header, py::arg("n_agents") = 2);
}
