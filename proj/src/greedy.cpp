#include "algoselect/greedy.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace algoselect::greedy {

// ---------------------------------------------------------------- instances

Graph::Graph(std::size_t vertices, std::span<const Edge> edges) {
  if (vertices >= std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("graph: too many vertices");
  std::vector<std::uint32_t> count(vertices + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u >= vertices || v >= vertices)
      throw std::invalid_argument("graph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") has an endpoint out of range");
    if (u == v) throw std::invalid_argument("graph: self-loop at vertex " + std::to_string(u));
    ++count[u + 1];
    ++count[v + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::uint32_t> raw(count.back());
  std::vector<std::uint32_t> fill(count.begin(), count.end() - 1);
  for (const auto& [u, v] : edges) {
    raw[fill[u]++] = v;
    raw[fill[v]++] = u;
  }

  offsets_.assign(vertices + 1, 0);
  adjacency_.reserve(raw.size());
  for (std::size_t v = 0; v < vertices; ++v) {
    auto first = raw.begin() + count[v];
    auto last = raw.begin() + count[v + 1];
    std::sort(first, last);
    last = std::unique(first, last);
    adjacency_.insert(adjacency_.end(), first, last);
    offsets_[v + 1] = static_cast<std::uint32_t>(adjacency_.size());
    max_degree_ = std::max(max_degree_, offsets_[v + 1] - offsets_[v]);
  }
  adjacency_.shrink_to_fit();
}

bool Graph::adjacent(std::uint32_t u, std::uint32_t v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (std::uint32_t u = 0; u < vertex_count(); ++u)
    for (std::uint32_t v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

double MwisInstance::total_weight() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

void MwisInstance::validate() const {
  if (!graph) throw std::invalid_argument("mwis instance: missing graph");
  if (graph->vertex_count() != weights.size())
    throw std::invalid_argument("mwis instance: " + std::to_string(weights.size()) + " weights for " +
                                std::to_string(graph->vertex_count()) + " vertices");
  for (std::size_t v = 0; v < weights.size(); ++v) {
    const double w = weights[v];
    if (!(w > 0.0 && w <= 1.0))
      throw std::invalid_argument("mwis instance: weight of vertex " + std::to_string(v) + " outside (0, 1]");
  }
}

MwisInstance make_mwis(std::size_t vertices, std::span<const Edge> edges, std::vector<double> weights) {
  return make_mwis(std::make_shared<const Graph>(vertices, edges), std::move(weights));
}

MwisInstance make_mwis(std::shared_ptr<const Graph> graph, std::vector<double> weights) {
  MwisInstance instance{std::move(graph), std::move(weights)};
  instance.validate();
  return instance;
}

double KnapsackInstance::total_value() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

void KnapsackInstance::validate() const {
  if (values.size() != sizes.size())
    throw std::invalid_argument("knapsack instance: " + std::to_string(values.size()) + " values but " +
                                std::to_string(sizes.size()) + " sizes");
  if (!(capacity > 0.0 && std::isfinite(capacity))) throw std::invalid_argument("knapsack instance: capacity must be positive");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0 && std::isfinite(values[i])))
      throw std::invalid_argument("knapsack instance: value of item " + std::to_string(i) + " must be positive");
    if (!(sizes[i] > 0.0 && std::isfinite(sizes[i])))
      throw std::invalid_argument("knapsack instance: size of item " + std::to_string(i) + " must be positive");
  }
}

std::size_t object_count(const Instance& instance) {
  return std::visit([](const auto& x) { return x.size(); }, instance);
}

// ----------------------------------------------------------------- family

ParamGreedyFamily::ParamGreedyFamily(ScoringRule scoring, AssignmentRule assignment, double rho_lo, double rho_hi,
                                     std::size_t max_objects)
    : scoring_(scoring), assignment_(assignment), rho_lo_(rho_lo), rho_hi_(rho_hi), max_objects_(max_objects) {
  if (!(std::isfinite(rho_lo) && std::isfinite(rho_hi)))
    throw std::invalid_argument("greedy family: parameter interval must be finite");
  if (rho_lo < 0.0) throw std::invalid_argument("greedy family: rho_lo must be non-negative");
  if (rho_lo > rho_hi) throw std::invalid_argument("greedy family: rho_lo exceeds rho_hi");
  const bool knapsack = assignment.kind == AssignmentKind::knapsack_pack;
  if (knapsack && scoring.kind == ScoringKind::mwis_density)
    throw std::invalid_argument("greedy family: MWIS scoring with a Knapsack assignment rule");
  if (!knapsack && scoring.kind == ScoringKind::knapsack_density)
    throw std::invalid_argument("greedy family: Knapsack scoring with an MWIS assignment rule");
}

ParamGreedyFamily ParamGreedyFamily::knapsack(double rho_lo, double rho_hi, std::size_t max_objects) {
  return {{ScoringKind::knapsack_density}, {AssignmentKind::knapsack_pack}, rho_lo, rho_hi, max_objects};
}

ParamGreedyFamily ParamGreedyFamily::mwis(bool adaptive, double rho_lo, double rho_hi, std::size_t max_objects) {
  return {{ScoringKind::mwis_density},
          {adaptive ? AssignmentKind::mwis_adaptive : AssignmentKind::mwis_nonadaptive},
          rho_lo,
          rho_hi,
          max_objects};
}

const char* ParamGreedyFamily::name() const noexcept {
  switch (assignment_.kind) {
    case AssignmentKind::knapsack_pack:
      return scoring_.kind == ScoringKind::value_only ? "knapsack-value" : "knapsack-density";
    case AssignmentKind::mwis_nonadaptive:
      return scoring_.kind == ScoringKind::value_only ? "mwis-weight" : "mwis-nonadaptive";
    case AssignmentKind::mwis_adaptive:
      return scoring_.kind == ScoringKind::value_only ? "mwis-weight" : "mwis-adaptive";
  }
  return "unknown";
}

std::vector<std::uint32_t> GreedyResult::selected() const {
  std::vector<std::uint32_t> out = order;
  std::sort(out.begin(), out.end());
  return out;
}

// ------------------------------------------------------------------ greedy

namespace {

void check_rho(const ParamGreedyFamily& family, double rho) {
  if (!family.contains(rho))
    throw std::invalid_argument("run_greedy: rho = " + std::to_string(rho) + " outside [" +
                                std::to_string(family.rho_lo()) + ", " + std::to_string(family.rho_hi()) + "]");
}

void check_size(const ParamGreedyFamily& family, std::size_t n) {
  if (family.max_objects() != 0 && n > family.max_objects())
    throw std::invalid_argument("run_greedy: instance has " + std::to_string(n) + " objects, family allows " +
                                std::to_string(family.max_objects()));
}

double log_base(std::size_t degree) { return std::log(1.0 + static_cast<double>(degree)); }

// Higher score first; equal scores resolve to the smaller id.
bool ahead(double score_a, std::uint32_t a, double score_b, std::uint32_t b) {
  return score_a > score_b || (score_a == score_b && a < b);
}

std::vector<std::uint32_t> rank(const std::vector<double>& score) {
  std::vector<std::uint32_t> order(score.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return ahead(score[a], a, score[b], b); });
  return order;
}

bool uses_rho(const ParamGreedyFamily& family) { return family.scoring().kind != ScoringKind::value_only; }

GreedyResult mwis_nonadaptive(const ParamGreedyFamily& family, double rho, const MwisInstance& x) {
  const Graph& g = *x.graph;
  const std::size_t n = x.size();
  std::vector<double> score(n);
  for (std::uint32_t v = 0; v < n; ++v)
    score[v] = std::log(x.weights[v]) - (uses_rho(family) ? rho * log_base(g.degree(v)) : 0.0);

  GreedyResult result;
  std::vector<char> blocked(n, 0);
  for (std::uint32_t v : rank(score)) {
    if (blocked[v]) continue;
    result.order.push_back(v);
    result.cost += x.weights[v];
    blocked[v] = 1;
    for (std::uint32_t u : g.neighbors(v)) blocked[u] = 1;
  }
  return result;
}

GreedyResult mwis_adaptive(const ParamGreedyFamily& family, double rho, const MwisInstance& x) {
  const Graph& g = *x.graph;
  const std::size_t n = x.size();
  const bool scaled = uses_rho(family);
  std::vector<double> lw(n);
  std::vector<std::uint32_t> degree(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    lw[v] = std::log(x.weights[v]);
    degree[v] = g.degree(v);
  }
  std::vector<double> penalty(g.max_degree() + 1);
  for (std::size_t k = 0; k < penalty.size(); ++k) penalty[k] = scaled ? rho * log_base(k) : 0.0;

  std::vector<std::uint32_t> alive(n);
  std::iota(alive.begin(), alive.end(), 0u);
  std::vector<std::uint32_t> slot(n);
  std::iota(slot.begin(), slot.end(), 0u);
  std::vector<char> removed(n, 0);
  std::vector<std::uint32_t> dropped;

  auto erase = [&](std::uint32_t v) {
    removed[v] = 1;
    const std::uint32_t last = alive.back();
    alive[slot[v]] = last;
    slot[last] = slot[v];
    alive.pop_back();
  };

  GreedyResult result;
  while (!alive.empty()) {
    std::uint32_t best = alive.front();
    double best_score = lw[best] - penalty[degree[best]];
    for (std::size_t i = 1; i < alive.size(); ++i) {
      const std::uint32_t v = alive[i];
      const double s = lw[v] - penalty[degree[v]];
      if (ahead(s, v, best_score, best)) {
        best = v;
        best_score = s;
      }
    }
    result.order.push_back(best);
    result.cost += x.weights[best];

    dropped.clear();
    dropped.push_back(best);
    erase(best);
    for (std::uint32_t u : g.neighbors(best)) {
      if (removed[u]) continue;
      dropped.push_back(u);
      erase(u);
    }
    for (std::uint32_t y : dropped)
      for (std::uint32_t z : g.neighbors(y))
        if (!removed[z]) --degree[z];
  }
  return result;
}

}  // namespace

GreedyResult run_greedy(const ParamGreedyFamily& family, double rho, const MwisInstance& instance) {
  if (!family.is_mwis()) throw std::invalid_argument("run_greedy: MWIS instance given to a Knapsack family");
  check_rho(family, rho);
  instance.validate();
  check_size(family, instance.size());
  if (family.assignment().kind == AssignmentKind::mwis_adaptive) return mwis_adaptive(family, rho, instance);
  return mwis_nonadaptive(family, rho, instance);
}

GreedyResult run_greedy(const ParamGreedyFamily& family, double rho, const KnapsackInstance& instance) {
  if (family.is_mwis()) throw std::invalid_argument("run_greedy: Knapsack instance given to an MWIS family");
  check_rho(family, rho);
  instance.validate();
  check_size(family, instance.size());
  const std::size_t n = instance.size();
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i)
    score[i] = std::log(instance.values[i]) - (uses_rho(family) ? rho * std::log(instance.sizes[i]) : 0.0);

  GreedyResult result;
  double room = instance.capacity;
  for (std::uint32_t i : rank(score)) {
    if (instance.sizes[i] > room) continue;
    room -= instance.sizes[i];
    result.order.push_back(i);
    result.cost += instance.values[i];
  }
  return result;
}

GreedyResult run_greedy(const ParamGreedyFamily& family, double rho, const Instance& instance) {
  return std::visit([&](const auto& x) { return run_greedy(family, rho, x); }, instance);
}

// ------------------------------------------------------------- breakpoints

std::size_t BreakpointSet::cell_of(double rho) const {
  return static_cast<std::size_t>(std::upper_bound(points.begin(), points.end(), rho) - points.begin());
}

double BreakpointSet::min_gap() const {
  if (points.empty()) return std::numeric_limits<double>::infinity();
  double gap = points.front() - lo;
  for (std::size_t i = 1; i < points.size(); ++i) gap = std::min(gap, points[i] - points[i - 1]);
  return std::min(gap, hi - points.back());
}

namespace {

struct Attribute {
  double lp;  // ln primary
  double ld;  // ln denominator base
  auto operator<=>(const Attribute&) const = default;
};

std::vector<Attribute> attributes(const ParamGreedyFamily& family, const Instance& instance) {
  std::vector<Attribute> out;
  if (const auto* k = std::get_if<KnapsackInstance>(&instance)) {
    k->validate();
    for (std::size_t i = 0; i < k->size(); ++i) out.push_back({std::log(k->values[i]), std::log(k->sizes[i])});
  } else {
    const auto& m = std::get<MwisInstance>(instance);
    m.validate();
    const Graph& g = *m.graph;
    const bool adaptive = family.assignment().kind == AssignmentKind::mwis_adaptive;
    for (std::uint32_t v = 0; v < m.size(); ++v) {
      const double lp = std::log(m.weights[v]);
      if (adaptive) {
        for (std::uint32_t d = 0; d <= g.degree(v); ++d) out.push_back({lp, log_base(d)});
      } else {
        out.push_back({lp, log_base(g.degree(v))});
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void check_kind(const ParamGreedyFamily& family, const Instance& instance) {
  if (family.is_mwis() != std::holds_alternative<MwisInstance>(instance))
    throw std::invalid_argument("breakpoints: instance kind does not match the family");
  check_size(family, object_count(instance));
}

void append_roots(const ParamGreedyFamily& family, const Instance& instance, std::vector<double>& roots) {
  check_kind(family, instance);
  if (!uses_rho(family)) return;
  const auto attrs = attributes(family, instance);
  const double lo = family.rho_lo();
  const double hi = family.rho_hi();
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    for (std::size_t j = i + 1; j < attrs.size(); ++j) {
      const double dd = attrs[i].ld - attrs[j].ld;
      if (dd == 0.0) continue;
      const double root = (attrs[i].lp - attrs[j].lp) / dd;
      if (root > lo && root < hi) roots.push_back(root);
    }
  }
}

BreakpointSet finish(const ParamGreedyFamily& family, std::vector<double> roots) {
  BreakpointSet set;
  set.lo = family.rho_lo();
  set.hi = family.rho_hi();
  std::sort(roots.begin(), roots.end());
  for (double r : roots) {
    if (!set.points.empty()) {
      const double last = set.points.back();
      if (r - last <= kBreakpointMergeTolerance * std::max(std::abs(r), std::abs(last))) continue;
    }
    set.points.push_back(r);
  }
  set.representatives.reserve(set.points.size() + 1);
  for (std::size_t c = 0; c <= set.points.size(); ++c) {
    const double a = set.cell_lo(c);
    const double b = set.cell_hi(c);
    set.representatives.push_back(a + 0.5 * (b - a));
  }
  return set;
}

}  // namespace

BreakpointSet breakpoints(const ParamGreedyFamily& family, std::span<const Instance> samples) {
  if (samples.empty()) throw std::invalid_argument("breakpoints: empty sample list");
  std::vector<double> roots;
  for (const auto& x : samples) append_roots(family, x, roots);
  return finish(family, std::move(roots));
}

BreakpointSet breakpoints(const ParamGreedyFamily& family, const Instance& sample) {
  return breakpoints(family, std::span<const Instance>(&sample, 1));
}

double breakpoint_count_bound(const ParamGreedyFamily& family, std::span<const Instance> samples) {
  std::size_t n = 0;
  for (const auto& x : samples) n = std::max(n, object_count(x));
  const double s = static_cast<double>(samples.size());
  const double beta = static_cast<double>(family.assignment().beta(n));
  const double t = s * static_cast<double>(n) * beta;
  return t * t * family.scoring().kappa();
}

// --------------------------------------------------------------------- ERM

RhoListFamily::RhoListFamily(const ParamGreedyFamily& family, std::vector<double> rhos)
    : family_(family), rhos_(std::move(rhos)) {
  for (double r : rhos_) check_rho(family_, r);
}

BreakpointErm erm_breakpoint(const ParamGreedyFamily& family, std::span<const Instance> samples,
                             std::span<const Instance> heldout) {
  if (samples.empty()) throw std::invalid_argument("erm_breakpoint: empty sample list");
  BreakpointErm out;
  out.cells = breakpoints(family, samples);
  const RhoListFamily candidates(family, out.cells.representatives);
  out.report = erm_finite<Instance>(candidates, samples, heldout);
  out.rho = out.cells.representatives[out.report.chosen];
  return out;
}

double best_of_q(const ParamGreedyFamily& family, std::span<const double> rhos, const Instance& instance) {
  if (rhos.empty()) throw std::invalid_argument("best_of_q: empty parameter list");
  double best = -std::numeric_limits<double>::infinity();
  for (double r : rhos) best = std::max(best, run_greedy(family, r, instance).cost);
  return best;
}

namespace {

struct Combo {
  std::vector<std::size_t> rows;
  std::size_t rank = 0;
  double mean = 0.0;
};

double combo_mean(const CostMatrix& costs, std::span<const std::size_t> rows) {
  double sum = 0.0;
  for (std::size_t c = 0; c < costs.instances(); ++c) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t r : rows) best = std::max(best, costs(r, c));
    sum += best;
  }
  return sum / static_cast<double>(costs.instances());
}

// Lexicographic enumeration of q-subsets; the first strictly best one wins.
Combo best_combo(const CostMatrix& costs, std::size_t q) {
  const std::size_t n = costs.candidates();
  std::vector<std::size_t> idx(q);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Combo best;
  best.mean = -std::numeric_limits<double>::infinity();
  for (std::size_t rank = 0;; ++rank) {
    const double m = combo_mean(costs, idx);
    if (m > best.mean) best = {idx, rank, m};
    std::size_t k = q;
    while (k > 0 && idx[k - 1] == n - q + (k - 1)) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < q; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

}  // namespace

BestOfQErm erm_best_of_q(const ParamGreedyFamily& family, std::span<const Instance> samples, std::size_t q,
                         std::span<const Instance> heldout, std::size_t max_q) {
  if (q == 0) throw std::invalid_argument("erm_best_of_q: q must be at least 1");
  if (q > max_q)
    throw std::invalid_argument("erm_best_of_q: q = " + std::to_string(q) + " exceeds the cap " + std::to_string(max_q));
  if (samples.empty()) throw std::invalid_argument("erm_best_of_q: empty sample list");

  const BreakpointSet cells = breakpoints(family, samples);
  const RhoListFamily candidates(family, cells.representatives);
  const std::size_t k = std::min(q, candidates.size());
  const CostMatrix train = evaluate_costs<Instance>(candidates, samples);
  const Combo best = best_combo(train, k);

  BestOfQErm out;
  for (std::size_t r : best.rows) out.rhos.push_back(cells.representatives[r]);
  out.report.chosen = best.rank;
  out.report.train_mean = best.mean;
  if (!heldout.empty()) {
    const CostMatrix test = evaluate_costs<Instance>(candidates, heldout);
    const Combo test_best = best_combo(test, k);
    out.report.heldout_mean = combo_mean(test, best.rows);
    out.report.heldout_best = test_best.rank;
    out.report.heldout_best_mean = test_best.mean;
    out.report.estimated_error = std::abs(*out.report.heldout_mean - test_best.mean);
  }
  return out;
}

// ------------------------------------------------------------ cost profile

namespace {
constexpr double kNearBreakpoint = 1e-11;

bool near(double rho, double point) { return std::abs(rho - point) <= kNearBreakpoint * std::max(1.0, std::abs(point)); }
}  // namespace

CostProfile::CostProfile(const ParamGreedyFamily& family, Instance instance)
    : family_(family), instance_(std::move(instance)), cells_(breakpoints(family_, instance_)) {
  cell_costs_.reserve(cells_.cell_count());
  for (double r : cells_.representatives) cell_costs_.push_back(run_greedy(family_, r, instance_).cost);
}

double CostProfile::at(double rho) const {
  check_rho(family_, rho);
  const std::size_t c = cells_.cell_of(rho);
  if ((c > 0 && near(rho, cells_.points[c - 1])) || (c < cells_.points.size() && near(rho, cells_.points[c])))
    return run_greedy(family_, rho, instance_).cost;
  return cell_costs_[c];
}

std::vector<double> CostProfile::at_sorted(std::span<const double> rhos) const {
  std::vector<double> out;
  out.reserve(rhos.size());
  std::size_t c = 0;
  const auto& pts = cells_.points;
  for (double rho : rhos) {
    check_rho(family_, rho);
    if (!out.empty() && rho < rhos[out.size() - 1]) throw std::invalid_argument("at_sorted: parameters not ascending");
    while (c < pts.size() && pts[c] <= rho) ++c;
    if ((c > 0 && near(rho, pts[c - 1])) || (c < pts.size() && near(rho, pts[c])))
      out.push_back(run_greedy(family_, rho, instance_).cost);
    else
      out.push_back(cell_costs_[c]);
  }
  return out;
}

}  // namespace algoselect::greedy
