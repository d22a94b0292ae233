#pragma once

// Online selection of the MWIS greedy parameter: a Hedge learner over a finite
// grid of parameters, regret accounting, smoothed instance sequences with their
// transition points, and the nested-interval adversary.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "algoselect/greedy.hpp"
#include "algoselect/random.hpp"

namespace algoselect::online {

using greedy::Graph;
using greedy::MwisInstance;

// ------------------------------------------------------------ hard instance

struct HardInstanceParams {
  std::size_t m = 3;
  double r = 0.25;
  double s = 0.75;
};

struct HardLayout {
  std::size_t a, b, c;  // block sizes: m^2 - 2, m^3 - 1, m^2 + m + 1
  std::size_t total() const { return a + b + c; }
};

HardLayout hard_layout(std::size_t m);

// A block complete to B; B vertex i is attached to C vertex i / (m - 1).
// Vertices are numbered A, then B, then C.
std::shared_ptr<const Graph> hard_graph(std::size_t m);

// Weights t*m^r on A, t on B, t*m^-s on C with t = 1 / (m^3 - 1). When `graph`
// is given it must come from hard_graph(params.m).
MwisInstance build_hard_instance(const HardInstanceParams& params, std::shared_ptr<const Graph> graph = nullptr);

// Weight of A plus weight of C plus (m - 2) * t: an upper bound on the greedy
// cost outside (r, s).
double hard_outside_bound(const HardInstanceParams& params);

// Largest m >= 3 with m^3 + 2m^2 + m <= n_budget; throws if the resulting
// instance would have fewer than n_budget / 2 vertices.
std::size_t adversary_m(std::size_t n_budget);

// --------------------------------------------------------------- adversary

struct AdversaryConfig {
  std::size_t n_budget = 200;
  std::size_t horizon = 10;
  std::uint64_t seed = 0;
  // Nesting stops once the next width n^-j would fall below this; later
  // intervals repeat the last one.
  double width_floor = 1e-9;
};

struct NestedInterval {
  double r = 0.0;
  double s = 1.0;
};

struct AdversarySequence {
  std::size_t m = 0;
  std::size_t n_budget = 0;
  std::size_t nesting_depth = 0;  // steps whose interval is strictly narrower than the previous one
  std::vector<NestedInterval> intervals;
  std::vector<MwisInstance> instances;  // all share one graph

  // Midpoint of the last interval: scores 1 on every instance.
  double final_rho() const;
};

AdversarySequence adversary_sequence(const AdversaryConfig& config);

// --------------------------------------------------------- smoothed model

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Uniform distribution on a union of disjoint subintervals of [0, 1].
class WeightDistribution {
 public:
  // Rejects overlapping or out-of-range pieces and a density above 1 / sigma.
  WeightDistribution(std::vector<Interval> pieces, double sigma);

  double sample(Rng& rng) const;
  double length() const noexcept { return length_; }
  double density() const noexcept { return 1.0 / length_; }
  const std::vector<Interval>& pieces() const noexcept { return pieces_; }

 private:
  std::vector<Interval> pieces_;  // sorted
  std::vector<double> cumulative_;
  double length_ = 0.0;
};

struct SmoothSpec {
  double sigma = 0.25;
  // Shared support for every vertex. When empty, every vertex at every step
  // gets its own window of length sigma placed at an arbitrary offset.
  std::vector<Interval> support;

  void validate() const;
};

// Graph for step `step`; may use the provided stream.
using GraphGenerator = std::function<std::shared_ptr<const Graph>(std::size_t step, Rng& rng)>;

GraphGenerator erdos_renyi(std::size_t n, double p);
GraphGenerator fixed_graph(std::shared_ptr<const Graph> graph);

std::vector<MwisInstance> smooth_sequence(const SmoothSpec& spec, const GraphGenerator& graphs, std::size_t horizon,
                                          std::uint64_t seed);

// ------------------------------------------------------- transition points

// Every (ln w1 - ln w2) / (ln k1 - ln k2) in [0, 1] over unordered vertex pairs
// and ordered degree-plus-one pairs k1 != k2 in {2, ..., n}; sorted, distinct.
std::vector<double> transition_points(const MwisInstance& instance);

struct GapReport {
  bool collision = false;  // two points of the union closer than q
  double min_gap = 0.0;    // +inf for fewer than two points
  std::size_t points = 0;
};

GapReport gap_event(std::span<const MwisInstance> instances, double q);

struct SmoothTheory {
  std::size_t m = 0;  // ceil(n^d * ln(1 / sigma))
  double q = 0.0;     // 1 / (n^d * 4 / sigma * m^2 * n^8 * ln n)
  double collision_bound = 0.0;  // 4 q / sigma * m^2 * n^8 * ln n
};

SmoothTheory smooth_theory(std::size_t n, double sigma, int d_exp);

// ------------------------------------------------------------------ Hedge

class HedgeLearner {
 public:
  // eta <= 0 selects sqrt(8 ln(arms) / horizon).
  HedgeLearner(std::size_t arms, std::size_t horizon, double eta, std::uint64_t seed);

  std::size_t arms() const noexcept { return log_weights_.size(); }
  double eta() const noexcept { return eta_; }
  std::size_t sample();
  std::vector<double> probabilities() const;
  // Full-information update with gains in [0, 1].
  void update(std::span<const double> gains);

 private:
  std::vector<double> log_weights_;
  std::vector<double> cumulative_;
  double eta_;
  Rng rng_;
};

std::vector<double> uniform_net(std::size_t points);  // k / (points - 1), k = 0..points-1
std::vector<double> spaced_net(double q);             // 0, q, 2q, ..., and 1

struct RegretTrace {
  std::vector<double> chosen_rho;
  std::vector<double> cost;
  std::vector<double> cum_cost;
  std::vector<double> cum_best;
  double best_rho = 0.0;
  double best_total = 0.0;

  std::size_t horizon() const noexcept { return cost.size(); }
  double average_regret() const;
  std::string to_csv() const;
};

// Plays the learner over `net`; `gains(step, out)` fills out with the gain of
// every comparator: the net points followed by optional extra comparator
// parameters (given in `extra`), which the learner cannot play.
RegretTrace run_online(std::span<const double> net, std::span<const double> extra, std::size_t horizon, double eta,
                       std::uint64_t seed, const std::function<void(std::size_t, std::vector<double>&)>& gains);

// ----------------------------------------------------------- experiments

struct SmoothedConfig {
  SmoothSpec spec;
  std::size_t n = 8;
  double edge_probability = 0.3;
  std::size_t horizon = 10000;
  int d_exp = 1;
  std::uint64_t seed = 0;
  std::size_t net_size = 10000;      // practical net
  bool theoretical_net = false;      // use the q-net from smooth_theory instead
  std::size_t max_net_size = 1000000;
  double eta = 0.0;
  bool adaptive = false;
};

struct SmoothedResult {
  RegretTrace trace;
  SmoothTheory theory;
  double net_q = 0.0;
  double net_comparator = 0.0;        // best total gain over the net
  double transition_comparator = 0.0;  // best total gain over all parameters
  double transition_rho = 0.0;
  bool q_collision = false;            // transition points of the sequence closer than the net spacing
  bool best_cell_covered = false;      // the best parameter cell contains a net point
};

SmoothedResult run_smoothed_online(const SmoothedConfig& config);

struct AdversaryRunConfig {
  AdversaryConfig adversary;
  double eta = 0.0;
};

struct AdversaryResult {
  RegretTrace trace;  // comparators: the 1/n grid plus the final-interval parameter
  std::size_t m = 0;
  std::size_t nesting_depth = 0;
  double final_rho = 0.0;
  double final_total = 0.0;
};

AdversaryResult run_adversary_online(const AdversaryRunConfig& config);

}  // namespace algoselect::online
