#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "algoselect/core.hpp"
#include "algoselect/epm.hpp"
#include "algoselect/error.hpp"
#include "algoselect/gdtune.hpp"
#include "algoselect/greedy.hpp"
#include "algoselect/io.hpp"
#include "algoselect/online.hpp"
#include "algoselect/sorting.hpp"

namespace py = pybind11;
using namespace algoselect;
using greedy::Instance;
using greedy::ParamGreedyFamily;

namespace {

ParamGreedyFamily family_by_name(const std::string& name, double lo, double hi) {
  if (name == "mwis") return ParamGreedyFamily::mwis(false, lo, hi);
  if (name == "mwis-adaptive") return ParamGreedyFamily::mwis(true, lo, hi);
  if (name == "knapsack") return ParamGreedyFamily::knapsack(lo, hi);
  throw std::invalid_argument("unknown family '" + name + "'");
}

py::dict report_dict(const ErrorReport& r) {
  py::dict d;
  d["chosen"] = r.chosen;
  d["train_mean"] = r.train_mean;
  d["heldout_mean"] = r.heldout_mean ? py::cast(*r.heldout_mean) : py::none();
  d["estimated_error"] = r.estimated_error;
  return d;
}

std::vector<Instance> as_instances(const py::list& xs) {
  std::vector<Instance> out;
  for (const auto& x : xs) {
    if (py::isinstance<greedy::MwisInstance>(x))
      out.emplace_back(x.cast<greedy::MwisInstance>());
    else
      out.emplace_back(x.cast<greedy::KnapsackInstance>());
  }
  return out;
}

py::dict trace_dict(const online::RegretTrace& t) {
  py::dict d;
  d["chosen_rho"] = t.chosen_rho;
  d["cost"] = t.cost;
  d["average_regret"] = t.average_regret();
  d["best_rho"] = t.best_rho;
  d["best_total"] = t.best_total;
  return d;
}

py::dict stats_dict(const sorting::SortStats& s) {
  py::dict d;
  d["comparisons"] = s.comparisons();
  d["route_comparisons"] = s.route_comparisons;
  d["insertion_comparisons"] = s.insertion_comparisons;
  d["merge_comparisons"] = s.merge_comparisons;
  d["fallback"] = s.fallback;
  d["occupancy"] = s.occupancy;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Learning parameterized algorithms from instance data";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);

  // ---------------------------------------------------------------- greedy
  py::class_<greedy::MwisInstance>(m, "MwisInstance")
      .def(py::init([](std::size_t n, const std::vector<greedy::Edge>& edges, std::vector<double> weights) {
             return greedy::make_mwis(n, edges, std::move(weights));
           }),
           py::arg("n"), py::arg("edges"), py::arg("weights"))
      .def_property_readonly("n", &greedy::MwisInstance::size)
      .def_property_readonly("edges", [](const greedy::MwisInstance& x) { return x.graph->edges(); })
      .def_readonly("weights", &greedy::MwisInstance::weights)
      .def("to_json", [](const greedy::MwisInstance& x) { return io::mwis_to_json(x); })
      .def_static("from_json", [](const std::string& text) { return io::parse_mwis_json(text); });

  py::class_<greedy::KnapsackInstance>(m, "KnapsackInstance")
      .def(py::init([](std::vector<double> values, std::vector<double> sizes, double capacity) {
             greedy::KnapsackInstance k;
             k.values = std::move(values);
             k.sizes = std::move(sizes);
             k.capacity = capacity;
             k.validate();
             return k;
           }),
           py::arg("values"), py::arg("sizes"), py::arg("capacity"))
      .def_readonly("values", &greedy::KnapsackInstance::values)
      .def_readonly("sizes", &greedy::KnapsackInstance::sizes)
      .def_readonly("capacity", &greedy::KnapsackInstance::capacity);

  m.def(
      "run_greedy",
      [](const py::object& x, double rho, const std::string& family) {
        const auto xs = as_instances(py::list(py::make_tuple(x)));
        const auto r = greedy::run_greedy(family_by_name(family, 0.0, std::max(1.0, rho)), rho, xs.front());
        return py::make_tuple(r.selected(), r.cost);
      },
      py::arg("instance"), py::arg("rho"), py::arg("family") = "mwis",
      "Runs the greedy heuristic; returns (sorted selected ids, cost).");

  m.def(
      "breakpoints",
      [](const py::list& xs, const std::string& family, double lo, double hi) {
        return greedy::breakpoints(family_by_name(family, lo, hi), as_instances(xs)).points;
      },
      py::arg("instances"), py::arg("family") = "mwis", py::arg("lo") = 0.0, py::arg("hi") = 1.0);

  m.def(
      "erm_breakpoint",
      [](const py::list& train, const std::string& family, double lo, double hi, const py::list& heldout) {
        const auto r = greedy::erm_breakpoint(family_by_name(family, lo, hi), as_instances(train), as_instances(heldout));
        py::dict d = report_dict(r.report);
        d["rho"] = r.rho;
        d["breakpoints"] = r.cells.points;
        d["representatives"] = r.cells.representatives;
        return d;
      },
      py::arg("train"), py::arg("family") = "mwis", py::arg("lo") = 0.0, py::arg("hi") = 1.0,
      py::arg("heldout") = py::list());

  m.def(
      "shatter_probe",
      [](const std::vector<std::vector<double>>& costs) {
        const std::size_t rows = costs.size(), cols = rows ? costs[0].size() : 0;
        CostMatrix c(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
          if (costs[r].size() != cols) throw std::invalid_argument("shatter_probe: ragged cost matrix");
          for (std::size_t j = 0; j < cols; ++j) c(r, j) = costs[r][j];
        }
        const auto rep = shatter_probe(c);
        py::dict d;
        d["shattered"] = rep.shattered;
        d["labelings"] = rep.labelings;
        d["witnesses"] = rep.witnesses;
        return d;
      },
      py::arg("costs"), "Rows are candidates, columns instances.");

  // ---------------------------------------------------------------- online
  m.def(
      "hard_instance", [](std::size_t m_, double r, double s) { return online::build_hard_instance({m_, r, s}); },
      py::arg("m"), py::arg("r") = 0.25, py::arg("s") = 0.75);

  m.def(
      "adversary_sequence",
      [](std::size_t n_budget, std::size_t horizon, std::uint64_t seed) {
        online::AdversaryConfig c;
        c.n_budget = n_budget;
        c.horizon = horizon;
        c.seed = seed;
        const auto seq = online::adversary_sequence(c);
        py::list intervals;
        for (const auto& iv : seq.intervals) intervals.append(py::make_tuple(iv.r, iv.s));
        py::dict d;
        d["m"] = seq.m;
        d["instances"] = seq.instances;
        d["intervals"] = intervals;
        d["final_rho"] = seq.final_rho();
        return d;
      },
      py::arg("n_budget"), py::arg("horizon"), py::arg("seed") = 0);

  m.def(
      "run_smoothed_online",
      [](double sigma, std::size_t n, std::size_t horizon, std::size_t net_size, std::uint64_t seed, double edge_p) {
        online::SmoothedConfig c;
        c.spec.sigma = sigma;
        c.n = n;
        c.horizon = horizon;
        c.net_size = net_size;
        c.seed = seed;
        c.edge_probability = edge_p;
        const auto r = online::run_smoothed_online(c);
        py::dict d = trace_dict(r.trace);
        d["net_comparator"] = r.net_comparator;
        d["transition_comparator"] = r.transition_comparator;
        d["q_collision"] = r.q_collision;
        return d;
      },
      py::arg("sigma") = 0.25, py::arg("n") = 8, py::arg("horizon") = 1000, py::arg("net_size") = 1000,
      py::arg("seed") = 0, py::arg("edge_p") = 0.3);

  m.def(
      "run_adversary_online",
      [](std::size_t n_budget, std::size_t horizon, std::uint64_t seed) {
        online::AdversaryRunConfig c;
        c.adversary.n_budget = n_budget;
        c.adversary.horizon = horizon;
        c.adversary.seed = seed;
        const auto r = online::run_adversary_online(c);
        py::dict d = trace_dict(r.trace);
        d["m"] = r.m;
        d["final_rho"] = r.final_rho;
        return d;
      },
      py::arg("n_budget"), py::arg("horizon") = 200, py::arg("seed") = 0);

  // ---------------------------------------------------------------- gd
  py::class_<gd::GdFamily>(m, "GdFamily")
      .def(py::init([](double rho_l, double rho_u, double L, double m_sc, double c, double Z, double nu) {
             gd::GdParams p;
             p.rho_l = rho_l;
             p.rho_u = rho_u;
             p.L = L;
             p.m_sc = m_sc;
             p.c = c;
             p.Z = Z;
             p.nu = nu;
             return gd::GdFamily(p);
           }),
           py::arg("rho_l") = 0.1, py::arg("rho_u") = 0.4, py::arg("L") = 4.0, py::arg("m_sc") = 1.0,
           py::arg("c") = 0.1, py::arg("Z") = 1.0, py::arg("nu") = 0.01)
      .def_property_readonly("H", &gd::GdFamily::H)
      .def_property_readonly("K", &gd::GdFamily::K)
      .def("knet", [](const gd::GdFamily& f) { return gd::knet(f); })
      .def(
          "run",
          [](const gd::GdFamily& f, double rho, std::vector<double> lambdas, std::vector<double> z0) {
            return gd::run_gd(f, rho, gd::GdInstance{std::move(lambdas), std::move(z0)});
          },
          py::arg("rho"), py::arg("lambdas"), py::arg("z0"))
      .def(
          "erm",
          [](const gd::GdFamily& f, const std::vector<std::pair<std::vector<double>, std::vector<double>>>& samples) {
            std::vector<gd::GdInstance> xs;
            for (const auto& [l, z] : samples) xs.push_back({l, z});
            const auto r = gd::erm_stepsize(f, xs);
            py::dict d = report_dict(r.report);
            d["rho"] = r.rho;
            d["net_size"] = r.net.size();
            return d;
          },
          py::arg("samples"), "samples: list of (lambdas, z0) pairs")
      .def(
          "verify_lemmas",
          [](const gd::GdFamily& f, std::size_t trials, std::uint64_t seed) {
            const auto r = gd::verify_lemmas(f, trials, seed);
            py::dict d;
            d["trials"] = r.trials;
            d["violations"] = r.violations;
            d["max_lipschitz_ratio"] = r.max_lipschitz_ratio;
            d["max_drift_ratio"] = r.max_drift_ratio;
            d["max_cost_gap"] = r.max_cost_gap;
            return d;
          },
          py::arg("trials"), py::arg("seed") = 0);

  // ---------------------------------------------------------------- epm
  py::class_<epm::LinearEpm>(m, "LinearEpm")
      .def_readonly("algorithm", &epm::LinearEpm::algorithm)
      .def_readonly("coefficients", &epm::LinearEpm::coefficients)
      .def_readonly("training_loss", &epm::LinearEpm::training_loss)
      .def_readonly("rank", &epm::LinearEpm::rank)
      .def("predict", [](const epm::LinearEpm& e, const std::vector<double>& f) { return e.predict(f); })
      .def("to_json", [](const epm::LinearEpm& e) { return epm::to_json(e); });

  m.def(
      "fit_linear_epm",
      [](const std::vector<std::vector<double>>& features, const std::vector<double>& costs, std::size_t algorithm) {
        epm::FeatureMatrix X;
        for (const auto& row : features) X.append(row);
        return epm::fit_linear_epm(algorithm, X, costs);
      },
      py::arg("features"), py::arg("costs"), py::arg("algorithm") = 0);

  m.def(
      "select_per_instance",
      [](const std::vector<epm::LinearEpm>& models, const std::vector<double>& features, bool minimize) {
        return epm::select_per_instance(models, features, minimize ? Orientation::minimize : Orientation::maximize);
      },
      py::arg("models"), py::arg("features"), py::arg("minimize") = true);

  m.def("mwis_features", &epm::mwis_features, py::arg("instance"));

  // ---------------------------------------------------------------- sorting
  py::class_<sorting::BucketSorter>(m, "BucketSorter")
      .def_static(
          "train",
          [](const std::vector<std::vector<double>>& samples, double tree_exponent, double fallback_factor) {
            return sorting::train_sorter(samples, {tree_exponent, fallback_factor});
          },
          py::arg("samples"), py::arg("tree_exponent") = 0.5, py::arg("fallback_factor") = 4.0)
      .def_static("from_json", [](const std::string& text) { return sorting::sorter_from_json(text); })
      .def_property_readonly("boundaries", &sorting::BucketSorter::boundaries)
      .def_property_readonly("threshold", &sorting::BucketSorter::threshold)
      .def(
          "sort",
          [](const sorting::BucketSorter& s, const std::vector<double>& a) {
            const auto r = s.sort(a);
            return py::make_tuple(r.sorted, stats_dict(r.stats));
          },
          py::arg("array"))
      .def("to_json", [](const sorting::BucketSorter& s) { return sorting::to_json(s); });
}
