#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "algoselect/core.hpp"
#include "algoselect/epm.hpp"
#include "algoselect/error.hpp"
#include "algoselect/gdtune.hpp"
#include "algoselect/greedy.hpp"
#include "algoselect/io.hpp"
#include "algoselect/online.hpp"
#include "algoselect/random.hpp"
#include "algoselect/sorting.hpp"

namespace algoselect::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using greedy::Instance;
using greedy::ParamGreedyFamily;
using io::format_double;

struct Common {
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Root seed; every random stream is derived from it");
  app->add_option("--out", c.out, "Output file (written atomically); stdout when omitted");
}

void emit(const Common& c, const std::string& content, std::ostream& out) {
  if (c.out.empty())
    out << content;
  else
    io::write_file_atomic(c.out, content);
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  try {
    return io::parse_number_csv(text, flag);
  } catch (const ParseError& e) {
    throw std::invalid_argument(std::string(flag) + ": expected a comma-separated list of numbers");
  }
}

// ------------------------------------------------------------ instances

struct InstanceSource {
  std::string path;
  std::size_t random = 0;
  std::size_t vertices = 8;
  double edge_p = 0.4;
  std::string problem = "mwis";
};

void add_instance_options(CLI::App* app, InstanceSource& s) {
  app->add_option("--instances", s.path, "Instance file or directory (.json, .jsonl, .csv)");
  app->add_option("--random", s.random, "Generate this many random instances instead of reading files");
  app->add_option("--vertices", s.vertices, "Objects per generated instance")->check(CLI::PositiveNumber);
  app->add_option("--edge-p", s.edge_p, "Edge probability of generated MWIS graphs")->check(CLI::Range(0.0, 1.0));
  app->add_option("--problem", s.problem, "Problem of generated instances")->check(CLI::IsMember({"mwis", "knapsack"}));
}

Instance random_instance(Rng& rng, const InstanceSource& s) {
  if (s.problem == "knapsack") {
    greedy::KnapsackInstance k;
    double total = 0.0;
    for (std::size_t i = 0; i < s.vertices; ++i) {
      k.values.push_back(rng.uniform_open());
      k.sizes.push_back(rng.uniform_open());
      total += k.sizes.back();
    }
    k.capacity = total / 2.0;
    return k;
  }
  std::vector<greedy::Edge> edges;
  for (std::uint32_t u = 0; u < s.vertices; ++u)
    for (std::uint32_t v = u + 1; v < s.vertices; ++v)
      if (rng.bernoulli(s.edge_p)) edges.emplace_back(u, v);
  std::vector<double> w(s.vertices);
  for (auto& x : w) x = rng.uniform_open();
  return greedy::make_mwis(s.vertices, edges, std::move(w));
}

std::vector<Instance> load(const InstanceSource& s, std::uint64_t seed, const char* label) {
  if (!s.path.empty() && s.random > 0) throw std::invalid_argument("--instances and --random are exclusive");
  std::vector<Instance> out;
  if (s.random > 0) {
    Rng rng(derive_seed(seed, label));
    for (std::size_t i = 0; i < s.random; ++i) out.push_back(random_instance(rng, s));
  } else if (!s.path.empty()) {
    out = io::load_instances(s.path);
  } else {
    throw std::invalid_argument("one of --instances or --random is required");
  }
  if (out.empty()) throw IoError("no instances found in " + s.path);
  return out;
}

ParamGreedyFamily make_family(const std::string& name, const std::vector<Instance>& xs, double lo, double hi) {
  const bool knapsack_input = std::holds_alternative<greedy::KnapsackInstance>(xs.front());
  for (const auto& x : xs)
    if (std::holds_alternative<greedy::KnapsackInstance>(x) != knapsack_input)
      throw std::invalid_argument("instances mix MWIS and knapsack");
  std::string f = name;
  if (f == "auto" || f == "constant") f = knapsack_input ? "knapsack" : "mwis";
  if ((f == "knapsack") != knapsack_input)
    throw std::invalid_argument("family '" + f + "' does not match the instance type");
  if (f == "knapsack") return ParamGreedyFamily::knapsack(lo, hi);
  return ParamGreedyFamily::mwis(f == "mwis-adaptive", lo, hi);
}

const std::vector<std::string> kFamilies{"auto", "mwis", "mwis-adaptive", "knapsack"};

// ------------------------------------------------------------ erm-greedy

struct ErmGreedyArgs {
  Common common;
  InstanceSource source;
  std::string heldout;
  std::string family = "auto";
  double lo = 0.0;
  double hi = 1.0;
  std::size_t best_of = 1;
};

int erm_greedy(const ErmGreedyArgs& a, std::ostream& out) {
  const auto train = load(a.source, a.common.seed, "cli.erm-greedy");
  std::vector<Instance> heldout;
  if (!a.heldout.empty()) {
    heldout = io::load_instances(a.heldout);
    if (heldout.empty()) throw IoError("no instances found in " + a.heldout);
  }
  const auto family = make_family(a.family, train, a.lo, a.hi);

  std::string rho;
  ErrorReport report;
  std::size_t points = 0, cells = 0;
  const auto bp = greedy::breakpoints(family, train);
  points = bp.points.size();
  cells = bp.cell_count();
  if (a.best_of <= 1) {
    const auto r = greedy::erm_breakpoint(family, train, heldout);
    rho = format_double(r.rho);
    report = r.report;
  } else {
    const auto r = greedy::erm_best_of_q(family, train, a.best_of, heldout);
    for (std::size_t i = 0; i < r.rhos.size(); ++i) rho += (i ? ";" : "") + format_double(r.rhos[i]);
    report = r.report;
  }
  std::string csv = "rho,breakpoints,cells,train_mean,heldout_mean,estimated_error\n";
  csv += rho + "," + std::to_string(points) + "," + std::to_string(cells) + "," + format_double(report.train_mean) + "," +
         (report.heldout_mean ? format_double(*report.heldout_mean) : "") + "," + format_double(report.estimated_error) +
         "\n";
  emit(a.common, csv, out);
  return exit_ok;
}

// ------------------------------------------------------------ gd-tune

struct GdTuneArgs {
  Common common;
  gd::GdParams params;
  std::string stop = "iterate";
  std::string instances;
  std::size_t random = 0;
  std::size_t dim = 1;
  std::string net;
  std::size_t lemmas = 0;
  std::string lemma_out;
};

std::vector<gd::GdInstance> load_gd(const fs::path& path) {
  std::vector<gd::GdInstance> out;
  const auto load_file = [&](const fs::path& p) {
    const std::string text = io::read_file(p);
    if (p.extension() == ".jsonl") {
      std::istringstream lines(text);
      std::string line;
      std::size_t no = 0;
      while (std::getline(lines, line)) {
        ++no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#') continue;
        try {
          out.push_back(gd::parse_gd_json(line, p.string()));
        } catch (const ParseError& e) {
          throw ParseError(p.string(), no, e.what());
        }
      }
    } else {
      out.push_back(gd::parse_gd_json(text, p.string()));
    }
  };
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file() && (e.path().extension() == ".json" || e.path().extension() == ".jsonl"))
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load_file(f);
  } else {
    if (!fs::exists(path, ec)) throw IoError("no such file or directory: " + path.string());
    load_file(path);
  }
  return out;
}

int gd_tune(GdTuneArgs a, std::ostream& out) {
  a.params.stop = a.stop == "gradient" ? gd::StopRule::gradient_norm : gd::StopRule::iterate_norm;
  const gd::GdFamily family(a.params);
  std::vector<gd::GdInstance> samples;
  if (!a.instances.empty() && a.random > 0) throw std::invalid_argument("--instances and --random are exclusive");
  if (a.random > 0) {
    Rng rng(derive_seed(a.common.seed, "cli.gd-tune"));
    for (std::size_t i = 0; i < a.random; ++i) samples.push_back(gd::random_instance(family, a.dim, rng));
  } else if (!a.instances.empty()) {
    samples = load_gd(a.instances);
  } else {
    throw std::invalid_argument("one of --instances or --random is required");
  }
  if (samples.empty()) throw IoError("no instances found in " + a.instances);
  for (const auto& x : samples) gd::validate(family, x);

  const auto r = a.net.empty() ? gd::erm_stepsize(family, samples)
                               : gd::erm_stepsize(family, parse_list(a.net, "--net"), samples);
  std::string csv = "rho,mean_iterations,net_size,tie_first,tie_last\n";
  csv += format_double(r.rho) + "," + format_double(r.report.train_mean) + "," + std::to_string(r.net.size()) + "," +
         format_double(r.net[r.tie_first]) + "," + format_double(r.net[r.tie_last]) + "\n";

  if (a.lemmas > 0) {
    const auto rep = gd::verify_lemmas(family, a.lemmas, derive_seed(a.common.seed, "cli.gd-lemmas"));
    json j{{"trials", rep.trials},
           {"violations", rep.violations},
           {"max_lipschitz_ratio", rep.max_lipschitz_ratio},
           {"max_drift_ratio", rep.max_drift_ratio},
           {"max_cost_gap", rep.max_cost_gap}};
    if (!rep.counterexample.empty()) j["counterexample"] = json::parse(rep.counterexample);
    if (a.lemma_out.empty()) throw std::invalid_argument("--lemmas needs --lemma-out");
    io::write_file_atomic(a.lemma_out, j.dump() + "\n");
  }
  emit(a.common, csv, out);
  return exit_ok;
}

// ------------------------------------------------------------ online

struct OnlineArgs {
  Common common;
  online::SmoothedConfig config;
  std::string summary;
};

int online_cmd(OnlineArgs a, std::ostream& out) {
  a.config.seed = a.common.seed;
  const auto r = online::run_smoothed_online(a.config);
  if (!a.summary.empty()) {
    const json j{{"horizon", r.trace.horizon()},
                 {"average_regret", r.trace.average_regret()},
                 {"best_rho", r.trace.best_rho},
                 {"net_q", r.net_q},
                 {"net_comparator", r.net_comparator},
                 {"transition_comparator", r.transition_comparator},
                 {"transition_rho", r.transition_rho},
                 {"q_collision", r.q_collision},
                 {"best_cell_covered", r.best_cell_covered},
                 {"theory", {{"m", r.theory.m}, {"q", r.theory.q}, {"collision_bound", r.theory.collision_bound}}}};
    io::write_file_atomic(a.summary, j.dump() + "\n");
  }
  emit(a.common, r.trace.to_csv(), out);
  return exit_ok;
}

// ------------------------------------------------------------ adversary

struct AdversaryArgs {
  Common common;
  std::size_t n_budget = 200;
  std::size_t horizon = 10;
  double eta = 0.0;
  std::string trace;
};

int adversary_cmd(const AdversaryArgs& a, std::ostream& out) {
  online::AdversaryConfig config;
  config.n_budget = a.n_budget;
  config.horizon = a.horizon;
  config.seed = a.common.seed;
  const auto seq = online::adversary_sequence(config);
  std::string lines;
  for (std::size_t t = 0; t < seq.instances.size(); ++t) {
    json j = json::parse(io::mwis_to_json(seq.instances[t]));
    j["step"] = t;
    j["m"] = seq.m;
    j["r"] = seq.intervals[t].r;
    j["s"] = seq.intervals[t].s;
    lines += j.dump() + "\n";
  }
  if (!a.trace.empty()) {
    online::AdversaryRunConfig run;
    run.adversary = config;
    run.eta = a.eta;
    io::write_file_atomic(a.trace, online::run_adversary_online(run).trace.to_csv());
  }
  emit(a.common, lines, out);
  return exit_ok;
}

// ------------------------------------------------------------ pdim-probe

struct PdimArgs {
  Common common;
  InstanceSource source;
  std::string family = "auto";
  double lo = 0.0;
  double hi = 1.0;
  std::size_t max_set_size = 4;
};

int pdim_probe(const PdimArgs& a, std::ostream& out) {
  const auto xs = load(a.source, a.common.seed, "cli.pdim-probe");
  const auto family = make_family(a.family, xs, a.lo, a.hi);
  const auto cells = greedy::breakpoints(family, xs);
  CostMatrix costs(cells.cell_count(), xs.size());
  if (a.family == "constant") {
    for (std::size_t r = 0; r < costs.candidates(); ++r)
      for (std::size_t c = 0; c < costs.instances(); ++c) costs(r, c) = 1.0;
  } else {
    costs = evaluate_costs<Instance>(greedy::RhoListFamily(family, cells.representatives), xs);
  }
  ShatterOptions options;
  options.max_set_size = a.max_set_size;
  json results = json::array();
  const std::size_t top = std::min(a.max_set_size, xs.size());
  for (std::size_t s = 1; s <= top; ++s) {
    std::vector<std::size_t> cols(s);
    for (std::size_t i = 0; i < s; ++i) cols[i] = i;
    const auto rep = shatter_probe(costs.select_instances(cols), options);
    results.push_back({{"set_size", s},
                       {"shattered", rep.shattered},
                       {"labelings", rep.labelings},
                       {"witnesses", rep.witnesses}});
  }
  const json j{{"family", a.family == "constant" ? "constant" : family.name()},
               {"instances", xs.size()},
               {"candidates", cells.representatives},
               {"results", std::move(results)}};
  emit(a.common, j.dump() + "\n", out);
  return exit_ok;
}

// ------------------------------------------------------------ epm

struct EpmArgs {
  Common common;
  InstanceSource source;
  std::string family = "mwis";
  std::string rhos = "0,0.25,0.5,0.75,1";
};

int epm_run(const EpmArgs& a, std::ostream& out) {
  const auto xs = load(a.source, a.common.seed, "cli.epm");
  const auto family = make_family(a.family, xs, 0.0, 1.0);
  if (!family.is_mwis()) throw std::invalid_argument("epm supports MWIS instances only");
  const auto rhos = parse_list(a.rhos, "--rhos");
  if (rhos.empty()) throw std::invalid_argument("--rhos: at least one value required");

  std::vector<greedy::MwisInstance> mwis;
  for (const auto& x : xs) mwis.push_back(std::get<greedy::MwisInstance>(x));
  const auto map = epm::mwis_feature_map();
  const auto features = epm::feature_matrix(map, std::span<const greedy::MwisInstance>(mwis));
  const auto costs = evaluate_costs<Instance>(greedy::RhoListFamily(family, rhos), xs);

  std::vector<epm::LinearEpm> models;
  json jm = json::array();
  for (std::size_t k = 0; k < rhos.size(); ++k) {
    models.push_back(epm::fit_linear_epm(k, features, costs.row(k), map.schema));
    jm.push_back(json::parse(epm::to_json(models.back())));
  }
  double selected = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j)
    selected += costs(epm::select_per_instance(models, features.row(j), family.orientation()), j);
  const auto constant = erm(costs, family.orientation());
  const json j{{"schema", map.schema},
               {"family", family.name()},
               {"rhos", rhos},
               {"models", std::move(jm)},
               {"selection_mean", selected / static_cast<double>(xs.size())},
               {"erm_rho", rhos[constant.chosen]},
               {"erm_mean", constant.train_mean}};
  emit(a.common, j.dump() + "\n", out);
  return exit_ok;
}

// ------------------------------------------------------------ sort-bench

struct SortArgs {
  Common common;
  std::size_t n = 256;
  std::size_t train = 1000;
  std::size_t tests = 1000;
  std::string dist = "skewed";
  double spread = 0.5;
  std::string samples;
  std::string arrays;
  sorting::SorterConfig config;
  std::string sorter_out;
};

int sort_bench(const SortArgs& a, std::ostream& out) {
  const auto draw = [&](const char* label, std::size_t count) {
    Rng rng(derive_seed(a.common.seed, label));
    std::vector<std::vector<double>> v;
    for (std::size_t i = 0; i < count; ++i)
      v.push_back(a.dist == "uniform" ? sorting::uniform_array(rng, a.n) : sorting::skewed_array(rng, a.n, a.spread));
    return v;
  };
  const auto train = a.samples.empty() ? draw("cli.sort.train", a.train)
                                       : io::parse_array_csv(io::read_file(a.samples), a.samples);
  const auto tests = a.arrays.empty() ? draw("cli.sort.test", a.tests)
                                      : io::parse_array_csv(io::read_file(a.arrays), a.arrays);
  const auto sorter = sorting::train_sorter(train, a.config);
  if (!a.sorter_out.empty()) io::write_file_atomic(a.sorter_out, sorting::to_json(sorter) + "\n");

  std::string csv = "array,comparisons,route,insertion,merge,fallback,mergesort,correct\n";
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const auto r = sorter.sort(tests[i]);
    auto ref = tests[i];
    const std::size_t merge = sorting::merge_sort(ref);
    csv += std::to_string(i) + "," + std::to_string(r.stats.comparisons()) + "," +
           std::to_string(r.stats.route_comparisons) + "," + std::to_string(r.stats.insertion_comparisons) + "," +
           std::to_string(r.stats.merge_comparisons) + "," + (r.stats.fallback ? "1" : "0") + "," +
           std::to_string(merge) + "," + (r.sorted == ref ? "1" : "0") + "\n";
  }
  emit(a.common, csv, out);
  return exit_ok;
}

// ------------------------------------------------------------ errors

void report(std::ostream& err, const char* kind, const std::string& message, const ParseError* pe = nullptr) {
  json j{{"error", kind}, {"message", message}};
  if (pe) {
    j["source"] = pe->source();
    if (pe->line()) j["line"] = pe->line();
  }
  err << j.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn parameterized algorithms from instance data"};
  app.name("algoselect");
  app.require_subcommand(1);

  ErmGreedyArgs erm_args;
  auto* erm_cmd = app.add_subcommand("erm-greedy", "ERM over a greedy heuristic family via breakpoint enumeration");
  add_common(erm_cmd, erm_args.common);
  add_instance_options(erm_cmd, erm_args.source);
  erm_cmd->add_option("--heldout", erm_args.heldout, "Held-out instance file or directory");
  erm_cmd->add_option("--family", erm_args.family, "Greedy family")->check(CLI::IsMember(kFamilies));
  erm_cmd->add_option("--lo", erm_args.lo, "Lower end of the parameter interval");
  erm_cmd->add_option("--hi", erm_args.hi, "Upper end of the parameter interval");
  erm_cmd->add_option("--best-of", erm_args.best_of, "Learn a best-of-q portfolio of this size")
      ->check(CLI::Range(1, 3));

  GdTuneArgs gd_args;
  auto* gd_cmd = app.add_subcommand("gd-tune", "Step-size ERM for gradient descent on quadratics");
  add_common(gd_cmd, gd_args.common);
  gd_cmd->add_option("--instances", gd_args.instances, "GD instance file (.json or .jsonl) or directory");
  gd_cmd->add_option("--random", gd_args.random, "Generate this many random instances");
  gd_cmd->add_option("--dim", gd_args.dim, "Dimension of generated instances")->check(CLI::PositiveNumber);
  gd_cmd->add_option("--rho-l", gd_args.params.rho_l, "Smallest step size");
  gd_cmd->add_option("--rho-u", gd_args.params.rho_u, "Largest step size");
  gd_cmd->add_option("--L", gd_args.params.L, "Smoothness bound");
  gd_cmd->add_option("--m-sc", gd_args.params.m_sc, "Strong convexity bound");
  gd_cmd->add_option("--c", gd_args.params.c, "Guaranteed progress factor");
  gd_cmd->add_option("--Z", gd_args.params.Z, "Bound on the initial point norm");
  gd_cmd->add_option("--nu", gd_args.params.nu, "Stopping tolerance");
  gd_cmd->add_option("--stop", gd_args.stop, "Stopping rule")->check(CLI::IsMember({"iterate", "gradient"}));
  gd_cmd->add_option("--max-net", gd_args.params.max_net, "Refuse nets larger than this");
  gd_cmd->add_option("--net", gd_args.net, "Explicit comma-separated step sizes instead of the K-net");
  gd_cmd->add_option("--lemmas", gd_args.lemmas, "Also run this many random lemma trials");
  gd_cmd->add_option("--lemma-out", gd_args.lemma_out, "JSON report of the lemma trials");

  OnlineArgs on_args;
  auto* on_cmd = app.add_subcommand("online", "Hedge over a parameter net on smoothed MWIS sequences");
  add_common(on_cmd, on_args.common);
  on_cmd->add_option("--horizon", on_args.config.horizon, "Number of rounds")->check(CLI::PositiveNumber);
  on_cmd->add_option("--n", on_args.config.n, "Vertices per instance")->check(CLI::Range(2, 64));
  on_cmd->add_option("--sigma", on_args.config.spec.sigma, "Smoothness: weight densities are at most 1/sigma");
  on_cmd->add_option("--edge-p", on_args.config.edge_probability, "Erdos-Renyi edge probability")
      ->check(CLI::Range(0.0, 1.0));
  on_cmd->add_option("--net-size", on_args.config.net_size, "Points in the practical net");
  on_cmd->add_flag("--theoretical-net", on_args.config.theoretical_net, "Use the q-spaced net from the analysis");
  on_cmd->add_option("--max-net", on_args.config.max_net_size, "Refuse nets larger than this");
  on_cmd->add_option("--d-exp", on_args.config.d_exp, "Exponent d in m = n^d ln(1/sigma)");
  on_cmd->add_option("--eta", on_args.config.eta, "Hedge learning rate; 0 picks sqrt(8 ln N / T)");
  on_cmd->add_flag("--adaptive", on_args.config.adaptive, "Adaptive degree updates");
  on_cmd->add_option("--summary", on_args.summary, "JSON summary of the run");

  AdversaryArgs adv_args;
  auto* adv_cmd = app.add_subcommand("adversary", "Emit the adversarial MWIS sequence as JSON lines");
  add_common(adv_cmd, adv_args.common);
  adv_cmd->add_option("--n-budget", adv_args.n_budget, "Vertex budget per instance")->check(CLI::Range(48, 1 << 24));
  adv_cmd->add_option("--horizon", adv_args.horizon, "Number of instances")->check(CLI::PositiveNumber);
  adv_cmd->add_option("--trace", adv_args.trace, "Also run Hedge on the sequence and write the regret trace CSV");
  adv_cmd->add_option("--eta", adv_args.eta, "Hedge learning rate; 0 picks sqrt(8 ln N / T)");

  PdimArgs pd_args;
  auto* pd_cmd = app.add_subcommand("pdim-probe", "Brute-force pseudo-shattering probe on prefixes of an instance set");
  add_common(pd_cmd, pd_args.common);
  add_instance_options(pd_cmd, pd_args.source);
  pd_cmd->add_option("--family", pd_args.family, "Greedy family, or 'constant' for a constant-cost control")
      ->check(CLI::IsMember({"auto", "mwis", "mwis-adaptive", "knapsack", "constant"}));
  pd_cmd->add_option("--lo", pd_args.lo, "Lower end of the parameter interval");
  pd_cmd->add_option("--hi", pd_args.hi, "Upper end of the parameter interval");
  pd_cmd->add_option("--max-set-size", pd_args.max_set_size, "Largest prefix probed")->check(CLI::Range(1, 30));

  EpmArgs epm_args;
  auto* epm_cmd = app.add_subcommand("epm", "Fit linear performance models on MWIS features");
  add_common(epm_cmd, epm_args.common);
  add_instance_options(epm_cmd, epm_args.source);
  epm_cmd->add_option("--family", epm_args.family, "Greedy family")->check(CLI::IsMember({"mwis", "mwis-adaptive"}));
  epm_cmd->add_option("--rhos", epm_args.rhos, "Comma-separated parameters, one algorithm each");

  SortArgs sort_args;
  auto* sort_cmd = app.add_subcommand("sort-bench", "Train the bucket sorter and report per-array comparison counts");
  add_common(sort_cmd, sort_args.common);
  sort_cmd->add_option("--n", sort_args.n, "Array length")->check(CLI::PositiveNumber);
  sort_cmd->add_option("--train", sort_args.train, "Generated training arrays")->check(CLI::PositiveNumber);
  sort_cmd->add_option("--tests", sort_args.tests, "Generated test arrays");
  sort_cmd->add_option("--dist", sort_args.dist, "Generator")->check(CLI::IsMember({"skewed", "uniform"}));
  sort_cmd->add_option("--spread", sort_args.spread, "Per-position spread of the skewed generator");
  sort_cmd->add_option("--samples", sort_args.samples, "CSV of training arrays, one per row");
  sort_cmd->add_option("--arrays", sort_args.arrays, "CSV of test arrays, one per row");
  sort_cmd->add_option("--tree-exponent", sort_args.config.tree_exponent, "Node cap exponent c in n^c");
  sort_cmd->add_option("--fallback-factor", sort_args.config.fallback_factor, "Mergesort fallback after C n log2 n");
  sort_cmd->add_option("--sorter-out", sort_args.sorter_out, "Write the trained sorter as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report(err, "usage", e.what());
    return exit_usage;
  }

  try {
    if (*erm_cmd) return erm_greedy(erm_args, out);
    if (*gd_cmd) return gd_tune(gd_args, out);
    if (*on_cmd) return online_cmd(on_args, out);
    if (*adv_cmd) return adversary_cmd(adv_args, out);
    if (*pd_cmd) return pdim_probe(pd_args, out);
    if (*epm_cmd) return epm_run(epm_args, out);
    if (*sort_cmd) return sort_bench(sort_args, out);
  } catch (const ParseError& e) {
    report(err, "parse", e.what(), &e);
    return exit_parse;
  } catch (const IoError& e) {
    report(err, "io", e.what());
    return exit_io;
  } catch (const CapacityError& e) {
    report(err, "capacity", e.what());
    return exit_capacity;
  } catch (const std::invalid_argument& e) {
    report(err, "usage", e.what());
    return exit_usage;
  } catch (const std::out_of_range& e) {
    report(err, "usage", e.what());
    return exit_usage;
  } catch (const std::exception& e) {
    report(err, "failure", e.what());
    return exit_failure;
  }
  return exit_usage;
}

}  // namespace algoselect::cli
