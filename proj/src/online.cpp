#include "algoselect/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "algoselect/error.hpp"
#include "algoselect/io.hpp"

namespace algoselect::online {

using greedy::CostProfile;
using greedy::Edge;
using greedy::Instance;
using greedy::ParamGreedyFamily;

// ------------------------------------------------------------ hard instance

HardLayout hard_layout(std::size_t m) {
  if (m < 3) throw std::invalid_argument("hard instance: m must be at least 3");
  return {m * m - 2, m * m * m - 1, m * m + m + 1};
}

std::shared_ptr<const Graph> hard_graph(std::size_t m) {
  const HardLayout L = hard_layout(m);
  std::vector<Edge> edges;
  edges.reserve(L.a * L.b + L.b);
  const auto b0 = static_cast<std::uint32_t>(L.a);
  const auto c0 = static_cast<std::uint32_t>(L.a + L.b);
  for (std::uint32_t a = 0; a < L.a; ++a)
    for (std::uint32_t b = 0; b < L.b; ++b) edges.emplace_back(a, b0 + b);
  for (std::uint32_t b = 0; b < L.b; ++b) edges.emplace_back(b0 + b, c0 + static_cast<std::uint32_t>(b / (m - 1)));
  return std::make_shared<const Graph>(L.total(), edges);
}

namespace {

void check_params(const HardInstanceParams& p) {
  if (p.m < 3) throw std::invalid_argument("hard instance: m must be at least 3");
  if (!(p.r > 0.0 && p.r < p.s && p.s < 1.0)) throw std::invalid_argument("hard instance: need 0 < r < s < 1");
}

}  // namespace

MwisInstance build_hard_instance(const HardInstanceParams& params, std::shared_ptr<const Graph> graph) {
  check_params(params);
  const HardLayout L = hard_layout(params.m);
  if (!graph) graph = hard_graph(params.m);
  if (graph->vertex_count() != L.total()) throw std::invalid_argument("hard instance: graph does not match m");
  const double m = static_cast<double>(params.m);
  const double t = 1.0 / static_cast<double>(L.b);
  std::vector<double> w;
  w.reserve(L.total());
  w.insert(w.end(), L.a, t * std::pow(m, params.r));
  w.insert(w.end(), L.b, t);
  w.insert(w.end(), L.c, t * std::pow(m, -params.s));
  return greedy::make_mwis(std::move(graph), std::move(w));
}

double hard_outside_bound(const HardInstanceParams& params) {
  check_params(params);
  const HardLayout L = hard_layout(params.m);
  const double m = static_cast<double>(params.m);
  const double t = 1.0 / static_cast<double>(L.b);
  return static_cast<double>(L.a) * t * std::pow(m, params.r) + static_cast<double>(L.c) * t * std::pow(m, -params.s) +
         (m - 2.0) * t;
}

std::size_t adversary_m(std::size_t n_budget) {
  auto size = [](std::size_t m) { return m * m * m + 2 * m * m + m; };
  if (size(3) > n_budget)
    throw std::invalid_argument("adversary: n_budget " + std::to_string(n_budget) + " is below the smallest instance (48)");
  std::size_t m = 3;
  while (size(m + 1) <= n_budget) ++m;
  if (2 * size(m) < n_budget)
    throw std::invalid_argument("adversary: instance for n_budget " + std::to_string(n_budget) +
                                " would have fewer than n_budget / 2 vertices");
  return m;
}

// --------------------------------------------------------------- adversary

double AdversarySequence::final_rho() const {
  if (intervals.empty()) throw std::logic_error("adversary: empty sequence");
  const auto& last = intervals.back();
  return last.r + 0.5 * (last.s - last.r);
}

AdversarySequence adversary_sequence(const AdversaryConfig& config) {
  if (config.horizon == 0) throw std::invalid_argument("adversary: horizon must be positive");
  if (!(config.width_floor > 0.0)) throw std::invalid_argument("adversary: width floor must be positive");
  AdversarySequence seq;
  seq.n_budget = config.n_budget;
  seq.m = adversary_m(config.n_budget);
  const auto graph = hard_graph(seq.m);
  Rng rng(derive_seed(config.seed, "adversary.intervals"));
  const double n = static_cast<double>(config.n_budget);

  NestedInterval prev{0.0, 1.0};
  double prev_width = 1.0;
  for (std::size_t j = 1; j <= config.horizon; ++j) {
    const double width = std::pow(n, -static_cast<double>(j));
    NestedInterval cur = prev;
    if (width >= config.width_floor) {
      cur.r = prev.r + rng.uniform_open() * (prev_width - width);
      cur.s = cur.r + width;
      // Keep strict nesting despite rounding.
      cur.r = std::max(cur.r, prev.r);
      cur.s = std::min(cur.s, prev.s);
      if (!(cur.r > 0.0)) cur.r = std::nextafter(0.0, 1.0);
      if (!(cur.s < 1.0)) cur.s = std::nextafter(1.0, 0.0);
      prev_width = width;
      seq.nesting_depth = j;
    }
    seq.intervals.push_back(cur);
    seq.instances.push_back(build_hard_instance({seq.m, cur.r, cur.s}, graph));
    prev = cur;
  }
  return seq;
}

// --------------------------------------------------------- smoothed model

WeightDistribution::WeightDistribution(std::vector<Interval> pieces, double sigma) : pieces_(std::move(pieces)) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw std::invalid_argument("weight distribution: sigma must lie in (0, 1]");
  if (pieces_.empty()) throw std::invalid_argument("weight distribution: empty support");
  std::sort(pieces_.begin(), pieces_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.lo >= 0.0 && p.hi <= 1.0 && p.lo < p.hi))
      throw std::invalid_argument("weight distribution: pieces must be non-empty subintervals of [0, 1]");
    if (i > 0 && p.lo < pieces_[i - 1].hi) throw std::invalid_argument("weight distribution: pieces overlap");
    length_ += p.hi - p.lo;
    cumulative_.push_back(length_);
  }
  if (length_ < sigma * (1.0 - 1e-12))
    throw std::invalid_argument("weight distribution: density " + std::to_string(1.0 / length_) + " exceeds 1/sigma = " +
                                std::to_string(1.0 / sigma));
}

double WeightDistribution::sample(Rng& rng) const {
  const double u = rng.uniform_open() * length_;
  const std::size_t i = std::min<std::size_t>(
      static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin()),
      pieces_.size() - 1);
  const double before = i == 0 ? 0.0 : cumulative_[i - 1];
  const double w = pieces_[i].lo + (u - before);
  return std::clamp(w, std::nextafter(pieces_[i].lo, 1.0), pieces_[i].hi);
}

void SmoothSpec::validate() const {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw std::invalid_argument("smooth spec: sigma must lie in (0, 1]");
  if (!support.empty()) WeightDistribution(support, sigma);
}

GraphGenerator erdos_renyi(std::size_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("erdos_renyi: p must lie in [0, 1]");
  return [n, p](std::size_t, Rng& rng) {
    std::vector<Edge> edges;
    for (std::uint32_t u = 0; u < n; ++u)
      for (std::uint32_t v = u + 1; v < n; ++v)
        if (rng.bernoulli(p)) edges.emplace_back(u, v);
    return std::make_shared<const Graph>(n, edges);
  };
}

GraphGenerator fixed_graph(std::shared_ptr<const Graph> graph) {
  return [graph = std::move(graph)](std::size_t, Rng&) { return graph; };
}

std::vector<MwisInstance> smooth_sequence(const SmoothSpec& spec, const GraphGenerator& graphs, std::size_t horizon,
                                          std::uint64_t seed) {
  spec.validate();
  Rng graph_rng(derive_seed(seed, "smooth.graph"));
  Rng weight_rng(derive_seed(seed, "smooth.weights"));
  Rng window_rng(derive_seed(seed, "smooth.windows"));
  std::optional<WeightDistribution> shared;
  if (!spec.support.empty()) shared.emplace(spec.support, spec.sigma);

  std::vector<MwisInstance> out;
  out.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    auto g = graphs(t, graph_rng);
    std::vector<double> w(g->vertex_count());
    for (auto& x : w) {
      if (shared) {
        x = shared->sample(weight_rng);
      } else {
        const double offset = window_rng.uniform() * (1.0 - spec.sigma);
        x = std::min(1.0, offset + spec.sigma * weight_rng.uniform_open());
      }
    }
    out.push_back(greedy::make_mwis(std::move(g), std::move(w)));
  }
  return out;
}

// ------------------------------------------------------- transition points

std::vector<double> transition_points(const MwisInstance& instance) {
  instance.validate();
  const std::size_t n = instance.size();
  {
    std::vector<double> sorted = instance.weights;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("transition_points: vertex weights must be distinct");
  }
  // ln(k1) - ln(k2) from the reduced fraction k1 / k2, so equal ratios give identical values.
  std::vector<double> denominators;
  {
    std::vector<std::pair<std::size_t, std::size_t>> ratios;
    for (std::size_t k1 = 2; k1 <= n; ++k1)
      for (std::size_t k2 = 2; k2 <= n; ++k2) {
        if (k1 == k2) continue;
        const std::size_t g = std::gcd(k1, k2);
        ratios.emplace_back(k1 / g, k2 / g);
      }
    std::sort(ratios.begin(), ratios.end());
    ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());
    for (auto [a, b] : ratios) denominators.push_back(std::log(static_cast<double>(a)) - std::log(static_cast<double>(b)));
  }
  std::vector<double> lw(n);
  for (std::size_t v = 0; v < n; ++v) lw[v] = std::log(instance.weights[v]);

  std::vector<double> out;
  for (std::size_t v1 = 0; v1 < n; ++v1)
    for (std::size_t v2 = v1 + 1; v2 < n; ++v2) {
      const double num = lw[v1] - lw[v2];
      for (double d : denominators) {
        const double rho = num / d;
        if (rho >= 0.0 && rho <= 1.0) out.push_back(rho);
      }
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GapReport gap_event(std::span<const MwisInstance> instances, double q) {
  std::vector<double> all;
  for (const auto& x : instances) {
    const auto tp = transition_points(x);
    all.insert(all.end(), tp.begin(), tp.end());
  }
  std::sort(all.begin(), all.end());
  GapReport report;
  report.points = all.size();
  report.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < all.size(); ++i) report.min_gap = std::min(report.min_gap, all[i] - all[i - 1]);
  report.collision = report.min_gap < q;
  return report;
}

SmoothTheory smooth_theory(std::size_t n, double sigma, int d_exp) {
  if (n < 2) throw std::invalid_argument("smooth_theory: n must be at least 2");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw std::invalid_argument("smooth_theory: sigma must lie in (0, 1]");
  if (d_exp < 1) throw std::invalid_argument("smooth_theory: d_exp must be at least 1");
  const double nd = std::pow(static_cast<double>(n), d_exp);
  const double ln_n = std::log(static_cast<double>(n));
  SmoothTheory th;
  th.m = static_cast<std::size_t>(std::max(1.0, std::ceil(nd * std::log(1.0 / sigma))));
  const double m = static_cast<double>(th.m);
  const double spread = 4.0 / sigma * m * m * std::pow(static_cast<double>(n), 8) * ln_n;
  th.q = 1.0 / (nd * spread);
  th.collision_bound = th.q * spread;
  return th;
}

// ------------------------------------------------------------------ Hedge

HedgeLearner::HedgeLearner(std::size_t arms, std::size_t horizon, double eta, std::uint64_t seed)
    : log_weights_(arms, 0.0), cumulative_(arms, 0.0), eta_(eta), rng_(seed) {
  if (arms == 0) throw std::invalid_argument("hedge: empty net");
  if (horizon == 0) throw std::invalid_argument("hedge: horizon must be positive");
  if (!(eta_ > 0.0)) eta_ = std::sqrt(8.0 * std::log(static_cast<double>(arms)) / static_cast<double>(horizon));
  // A single arm has ln 1 = 0; any positive rate is equivalent.
  if (!(eta_ > 0.0)) eta_ = 1.0;
}

std::size_t HedgeLearner::sample() {
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  double total = 0.0;
  for (std::size_t i = 0; i < log_weights_.size(); ++i) {
    total += std::exp(log_weights_[i] - top);
    cumulative_[i] = total;
  }
  const double u = rng_.uniform() * total;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), log_weights_.size() - 1);
}

std::vector<double> HedgeLearner::probabilities() const {
  const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
  std::vector<double> p(log_weights_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += p[i] = std::exp(log_weights_[i] - top);
  for (auto& x : p) x /= total;
  return p;
}

void HedgeLearner::update(std::span<const double> gains) {
  if (gains.size() != log_weights_.size()) throw std::invalid_argument("hedge: gain vector has the wrong length");
  for (std::size_t i = 0; i < gains.size(); ++i) log_weights_[i] += eta_ * gains[i];
}

std::vector<double> uniform_net(std::size_t points) {
  if (points == 0) throw std::invalid_argument("net: size must be positive");
  if (points == 1) return {0.5};
  std::vector<double> net(points);
  const double den = static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) net[k] = static_cast<double>(k) / den;
  return net;
}

std::vector<double> spaced_net(double q) {
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("net: spacing must lie in (0, 1]");
  std::vector<double> net;
  for (std::size_t k = 0;; ++k) {
    const double x = static_cast<double>(k) * q;
    if (x >= 1.0) break;
    net.push_back(x);
  }
  net.push_back(1.0);
  return net;
}

double RegretTrace::average_regret() const {
  if (cost.empty()) return 0.0;
  return (best_total - cum_cost.back()) / static_cast<double>(cost.size());
}

std::string RegretTrace::to_csv() const {
  std::string out = "step,chosen_rho,cost,cum_cost,cum_best,avg_regret\n";
  for (std::size_t t = 0; t < cost.size(); ++t) {
    const double regret = (cum_best[t] - cum_cost[t]) / static_cast<double>(t + 1);
    out += std::to_string(t + 1) + "," + io::format_double(chosen_rho[t]) + "," + io::format_double(cost[t]) + "," +
           io::format_double(cum_cost[t]) + "," + io::format_double(cum_best[t]) + "," + io::format_double(regret) + "\n";
  }
  return out;
}

RegretTrace run_online(std::span<const double> net, std::span<const double> extra, std::size_t horizon, double eta,
                       std::uint64_t seed, const std::function<void(std::size_t, std::vector<double>&)>& gains) {
  HedgeLearner learner(net.size(), horizon, eta, seed);
  const std::size_t total = net.size() + extra.size();
  std::vector<double> g(total), cum(total, 0.0);
  RegretTrace trace;
  double spent = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const std::size_t k = learner.sample();
    g.assign(total, 0.0);
    gains(t, g);
    if (g.size() != total) throw std::logic_error("run_online: gain callback changed the vector size");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < total; ++i) {
      if (!(g[i] >= 0.0 && g[i] <= 1.0 + 1e-12))
        throw std::domain_error("run_online: gain " + std::to_string(g[i]) + " outside [0, 1]");
      cum[i] += g[i];
      best = std::max(best, cum[i]);
    }
    spent += g[k];
    trace.chosen_rho.push_back(net[k]);
    trace.cost.push_back(g[k]);
    trace.cum_cost.push_back(spent);
    trace.cum_best.push_back(best);
    learner.update(std::span<const double>(g.data(), net.size()));
  }
  const std::size_t best = static_cast<std::size_t>(std::max_element(cum.begin(), cum.end()) - cum.begin());
  trace.best_rho = best < net.size() ? net[best] : extra[best - net.size()];
  trace.best_total = cum[best];
  return trace;
}

// ----------------------------------------------------------- experiments

namespace {

struct CellChoice {
  double total = -std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 0.0;
};

// Best total gain over open cells of the union partition, with gains summed in
// step order exactly as the net comparator sums them.
CellChoice best_cell(const std::vector<CostProfile>& profiles, double scale) {
  struct Event {
    double at;
    double delta;
  };
  std::vector<Event> events;
  double base = 0.0;
  for (const auto& p : profiles) {
    const auto& costs = p.cell_costs();
    base += costs[0] / scale;
    const auto& pts = p.cells().points;
    for (std::size_t i = 0; i < pts.size(); ++i) events.push_back({pts[i], (costs[i + 1] - costs[i]) / scale});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.at < b.at; });
  const double lo = profiles.front().cells().lo;
  const double hi = profiles.front().cells().hi;

  // Approximate totals per cell from the running sum.
  std::vector<std::pair<double, double>> bounds{{lo, events.empty() ? hi : events.front().at}};
  std::vector<double> approx{base};
  double running = base;
  for (std::size_t i = 0; i < events.size();) {
    const double at = events[i].at;
    while (i < events.size() && events[i].at == at) running += events[i++].delta;
    bounds.emplace_back(at, i < events.size() ? events[i].at : hi);
    approx.push_back(running);
  }
  const double top = *std::max_element(approx.begin(), approx.end());
  const double slack = 1e-9 * std::max(1.0, std::abs(top));

  CellChoice best;
  for (std::size_t c = 0; c < approx.size(); ++c) {
    if (approx[c] < top - slack) continue;
    const auto [a, b] = bounds[c];
    const double mid = a + 0.5 * (b - a);
    double exact = 0.0;
    for (const auto& p : profiles) exact += p.at(mid) / scale;
    if (exact > best.total) best = {exact, a, b};
  }
  return best;
}

bool pigeonhole_or_gap(std::span<const MwisInstance> instances, double q) {
  std::vector<double> all;
  const double cap = std::floor(1.0 / q) + 1.0;
  for (const auto& x : instances) {
    const auto tp = transition_points(x);
    all.insert(all.end(), tp.begin(), tp.end());
    if (static_cast<double>(all.size()) > cap) return true;  // more points than q-separated slots in [0, 1]
  }
  std::sort(all.begin(), all.end());
  for (std::size_t i = 1; i < all.size(); ++i)
    if (all[i] - all[i - 1] < q) return true;
  return false;
}

}  // namespace

SmoothedResult run_smoothed_online(const SmoothedConfig& config) {
  config.spec.validate();
  if (config.n < 2) throw std::invalid_argument("smoothed online: n must be at least 2");
  SmoothedResult result;
  result.theory = smooth_theory(config.n, config.spec.sigma, config.d_exp);

  std::vector<double> net;
  if (config.theoretical_net) {
    const double size = std::floor(1.0 / result.theory.q) + 2.0;
    if (size > static_cast<double>(config.max_net_size))
      throw CapacityError("smoothed online: the theoretical net needs " + io::format_double(size) +
                          " points, above the cap of " + std::to_string(config.max_net_size));
    net = spaced_net(result.theory.q);
    result.net_q = result.theory.q;
  } else {
    if (config.net_size > config.max_net_size)
      throw CapacityError("smoothed online: net size " + std::to_string(config.net_size) + " above the cap of " +
                          std::to_string(config.max_net_size));
    net = uniform_net(config.net_size);
    result.net_q = config.net_size > 1 ? 1.0 / static_cast<double>(config.net_size - 1) : 1.0;
  }

  const auto instances =
      smooth_sequence(config.spec, erdos_renyi(config.n, config.edge_probability), config.horizon, config.seed);
  const auto family = ParamGreedyFamily::mwis(config.adaptive);
  const double scale = static_cast<double>(config.n);
  std::vector<CostProfile> profiles;
  profiles.reserve(instances.size());

  result.trace = run_online(net, {}, config.horizon, config.eta, derive_seed(config.seed, "smooth.learner"),
                            [&](std::size_t t, std::vector<double>& g) {
                              profiles.emplace_back(family, Instance{instances[t]});
                              const auto costs = profiles.back().at_sorted(net);
                              for (std::size_t i = 0; i < costs.size(); ++i) g[i] = costs[i] / scale;
                            });
  result.net_comparator = result.trace.best_total;

  const CellChoice cell = best_cell(profiles, scale);
  result.transition_comparator = cell.total;
  result.transition_rho = cell.lo + 0.5 * (cell.hi - cell.lo);
  result.best_cell_covered = std::any_of(net.begin(), net.end(), [&](double x) {
    return (x > cell.lo && x < cell.hi) || (x == 0.0 && cell.lo == 0.0) || (x == 1.0 && cell.hi == 1.0);
  });
  result.q_collision = pigeonhole_or_gap(instances, result.net_q);
  return result;
}

AdversaryResult run_adversary_online(const AdversaryRunConfig& config) {
  const AdversarySequence seq = adversary_sequence(config.adversary);
  const auto family = ParamGreedyFamily::mwis(false);
  const auto grid = uniform_net(config.adversary.n_budget + 1);
  const double target = seq.final_rho();
  const std::vector<double> extra{target};

  AdversaryResult result;
  result.m = seq.m;
  result.nesting_depth = seq.nesting_depth;
  result.final_rho = target;

  std::optional<CostProfile> profile;
  std::optional<NestedInterval> cached;
  double target_total = 0.0;
  result.trace = run_online(grid, extra, config.adversary.horizon, config.eta,
                            derive_seed(config.adversary.seed, "adversary.learner"), [&](std::size_t t, std::vector<double>& g) {
                              const auto& iv = seq.intervals[t];
                              if (!cached || cached->r != iv.r || cached->s != iv.s) {
                                profile.emplace(family, Instance{seq.instances[t]});
                                cached = iv;
                              }
                              const auto costs = profile->at_sorted(grid);
                              std::copy(costs.begin(), costs.end(), g.begin());
                              g.back() = profile->at(target);
                              target_total += g.back();
                            });
  result.final_total = target_total;
  return result;
}

}  // namespace algoselect::online
