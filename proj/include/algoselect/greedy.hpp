#pragma once

// Single-parameter greedy heuristics for object assignment problems
// (Knapsack, maximum-weight independent set) and the exact ERM that follows
// from enumerating every parameter value at which two relevant scores tie.
//
// Scores are compared in log space: score(rho) = ln(primary) - rho * ln(base),
// where (primary, base) is (value, size) for Knapsack items and
// (weight, 1 + degree) for MWIS vertices. Ties resolve to the smaller object id.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "algoselect/core.hpp"

namespace algoselect::greedy {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

// Undirected simple graph in compressed adjacency form.
class Graph {
 public:
  Graph() = default;
  // Rejects self-loops and out-of-range endpoints; duplicate edges are merged.
  Graph(std::size_t vertices, std::span<const Edge> edges);

  std::size_t vertex_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }

  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(std::uint32_t v) const { return offsets_[v + 1] - offsets_[v]; }
  std::uint32_t max_degree() const noexcept { return max_degree_; }
  bool adjacent(std::uint32_t u, std::uint32_t v) const;

  // Each edge once as (u, v) with u < v, sorted.
  std::vector<Edge> edges() const;

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> adjacency_;  // sorted within each vertex
  std::uint32_t max_degree_ = 0;
};

// The graph is shared and immutable, so instances that differ only in their
// weights (smoothed and adversarial sequences) do not copy adjacency.
struct MwisInstance {
  std::shared_ptr<const Graph> graph;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  double total_weight() const;
  // Weights must lie in (0, 1] and match the vertex count.
  void validate() const;
};

MwisInstance make_mwis(std::size_t vertices, std::span<const Edge> edges, std::vector<double> weights);
MwisInstance make_mwis(std::shared_ptr<const Graph> graph, std::vector<double> weights);

struct KnapsackInstance {
  std::vector<double> values;
  std::vector<double> sizes;
  double capacity = 0.0;

  std::size_t size() const noexcept { return values.size(); }
  double total_value() const;
  void validate() const;
};

using Instance = std::variant<MwisInstance, KnapsackInstance>;

std::size_t object_count(const Instance& instance);

enum class ScoringKind {
  value_only,        // primary attribute only; independent of rho
  knapsack_density,  // v / s^rho
  mwis_density,      // w / (1 + deg)^rho
};

enum class AssignmentKind {
  knapsack_pack,     // pack if it still fits
  mwis_nonadaptive,  // take unless a neighbor was taken; scores use original degrees
  mwis_adaptive,     // scores use degrees in the graph of still-available vertices
};

struct ScoringRule {
  ScoringKind kind = ScoringKind::mwis_density;
  // Maximum number of rho values at which two distinct attribute curves cross.
  int kappa() const noexcept { return 1; }
};

struct AssignmentRule {
  AssignmentKind kind = AssignmentKind::mwis_nonadaptive;
  // Distinct attribute values an object can take during a run with n objects.
  std::size_t beta(std::size_t n) const noexcept {
    return kind == AssignmentKind::mwis_adaptive ? std::max<std::size_t>(n, 1) : 1;
  }
};

class ParamGreedyFamily {
 public:
  ParamGreedyFamily(ScoringRule scoring, AssignmentRule assignment, double rho_lo, double rho_hi,
                    std::size_t max_objects = 0);

  static ParamGreedyFamily knapsack(double rho_lo = 0.0, double rho_hi = 1.0, std::size_t max_objects = 0);
  static ParamGreedyFamily mwis(bool adaptive, double rho_lo = 0.0, double rho_hi = 1.0, std::size_t max_objects = 0);

  const ScoringRule& scoring() const noexcept { return scoring_; }
  const AssignmentRule& assignment() const noexcept { return assignment_; }
  double rho_lo() const noexcept { return rho_lo_; }
  double rho_hi() const noexcept { return rho_hi_; }
  // 0 means unbounded.
  std::size_t max_objects() const noexcept { return max_objects_; }
  bool is_mwis() const noexcept { return assignment_.kind != AssignmentKind::knapsack_pack; }
  bool contains(double rho) const noexcept { return rho >= rho_lo_ && rho <= rho_hi_; }
  Orientation orientation() const noexcept { return Orientation::maximize; }
  const char* name() const noexcept;

 private:
  ScoringRule scoring_;
  AssignmentRule assignment_;
  double rho_lo_;
  double rho_hi_;
  std::size_t max_objects_;
};

struct GreedyResult {
  std::vector<std::uint32_t> order;  // objects assigned "1", in the order they were taken
  double cost = 0.0;                 // total value / weight of the solution, summed in `order`

  std::vector<std::uint32_t> selected() const;  // sorted ids
  friend bool operator==(const GreedyResult&, const GreedyResult&) = default;
};

GreedyResult run_greedy(const ParamGreedyFamily& family, double rho, const MwisInstance& instance);
GreedyResult run_greedy(const ParamGreedyFamily& family, double rho, const KnapsackInstance& instance);
GreedyResult run_greedy(const ParamGreedyFamily& family, double rho, const Instance& instance);

// Sorted distinct parameter values inside (rho_lo, rho_hi) where some relevant
// comparison ties, and one representative per open cell of the partition.
struct BreakpointSet {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> points;           // strictly increasing, inside (lo, hi)
  std::vector<double> representatives;  // points.size() + 1 cell midpoints

  std::size_t cell_count() const noexcept { return representatives.size(); }
  // Cell bounds [cell_lo, cell_hi]; interior values lie in the open interval.
  double cell_lo(std::size_t cell) const { return cell == 0 ? lo : points[cell - 1]; }
  double cell_hi(std::size_t cell) const { return cell == points.size() ? hi : points[cell]; }
  // Cell whose closure holds rho (breakpoints themselves map to the cell on their right).
  std::size_t cell_of(double rho) const;
  double min_gap() const;  // smallest distance between consecutive points (incl. lo/hi); +inf when none
};

// Relative tolerance within which two roots are treated as the same breakpoint.
inline constexpr double kBreakpointMergeTolerance = 1e-12;

BreakpointSet breakpoints(const ParamGreedyFamily& family, std::span<const Instance> samples);
BreakpointSet breakpoints(const ParamGreedyFamily& family, const Instance& sample);

// (s * n * beta)^2 * kappa for s samples with at most n objects each.
double breakpoint_count_bound(const ParamGreedyFamily& family, std::span<const Instance> samples);

// The rho of a list as a finite family over instances.
class RhoListFamily {
 public:
  RhoListFamily(const ParamGreedyFamily& family, std::vector<double> rhos);
  std::size_t size() const noexcept { return rhos_.size(); }
  double cost(std::size_t index, const Instance& x) const { return run_greedy(family_, rhos_[index], x).cost; }
  Orientation orientation() const noexcept { return family_.orientation(); }
  const std::vector<double>& rhos() const noexcept { return rhos_; }

 private:
  ParamGreedyFamily family_;
  std::vector<double> rhos_;
};

struct BreakpointErm {
  double rho = 0.0;
  ErrorReport report;
  BreakpointSet cells;
};

// Evaluates every cell representative on all samples and returns the best
// mean (ties -> smaller rho).
BreakpointErm erm_breakpoint(const ParamGreedyFamily& family, std::span<const Instance> samples,
                             std::span<const Instance> heldout = {});

double best_of_q(const ParamGreedyFamily& family, std::span<const double> rhos, const Instance& instance);

struct BestOfQErm {
  std::vector<double> rhos;  // ascending
  ErrorReport report;
};

inline constexpr std::size_t kDefaultMaxQ = 3;

// Exhaustive search over q-subsets of the cell representatives.
BestOfQErm erm_best_of_q(const ParamGreedyFamily& family, std::span<const Instance> samples, std::size_t q,
                         std::span<const Instance> heldout = {}, std::size_t max_q = kDefaultMaxQ);

// Cost of one instance as a step function of rho over the family interval.
class CostProfile {
 public:
  CostProfile(const ParamGreedyFamily& family, Instance instance);

  const BreakpointSet& cells() const noexcept { return cells_; }
  const std::vector<double>& cell_costs() const noexcept { return cell_costs_; }
  const Instance& instance() const noexcept { return instance_; }

  // Cost at rho. Values within a small distance of a breakpoint, or exactly
  // on it, are evaluated by running the heuristic directly.
  double at(double rho) const;
  // Same as at() for an ascending list of parameters, in one merged pass.
  std::vector<double> at_sorted(std::span<const double> rhos) const;

 private:
  ParamGreedyFamily family_;
  Instance instance_;
  BreakpointSet cells_;
  std::vector<double> cell_costs_;
};

}  // namespace algoselect::greedy
