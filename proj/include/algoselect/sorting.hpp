#pragma once

// Self-improving bucket sort: boundaries and per-position search trees are
// learned from sample arrays; buckets are insertion-sorted, and a counting
// mergesort takes over when the comparison budget runs out.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "algoselect/random.hpp"

namespace algoselect::sorting {

struct SorterConfig {
  double tree_exponent = 0.5;  // at most ceil(n^tree_exponent) internal nodes per tree
  double fallback_factor = 4.0;
};

// Internal nodes test `key < boundaries[split]`; leaves cover the bucket range
// [lo, hi] and finish with a binary search when lo < hi.
struct TreeNode {
  std::int32_t split = -1;  // -1 for a leaf
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;

  bool leaf() const noexcept { return split < 0; }
};

struct SearchTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t internal_nodes() const;
};

inline constexpr std::size_t kAborted = static_cast<std::size_t>(-1);

struct Route {
  std::size_t bucket = 0;  // kAborted when the comparison limit was reached first
  std::size_t comparisons = 0;
};

struct SortStats {
  std::size_t route_comparisons = 0;
  std::size_t insertion_comparisons = 0;
  std::size_t merge_comparisons = 0;
  bool fallback = false;
  std::vector<std::size_t> occupancy;  // keys per bucket (empty after a fallback abort during routing)

  std::size_t comparisons() const noexcept { return route_comparisons + insertion_comparisons + merge_comparisons; }
};

struct SortResult {
  std::vector<double> sorted;
  SortStats stats;
};

class BucketSorter {
 public:
  BucketSorter(std::size_t n, std::vector<double> boundaries, std::vector<SearchTree> trees, SorterConfig config);

  std::size_t length() const noexcept { return n_; }
  // Strictly increasing. Bucket k holds keys in [boundaries[k], boundaries[k+1]),
  // with boundaries[0] read as -inf and boundaries[size] as +inf.
  const std::vector<double>& boundaries() const noexcept { return boundaries_; }
  std::size_t bucket_count() const noexcept { return boundaries_.size(); }
  const std::vector<SearchTree>& trees() const noexcept { return trees_; }
  const SorterConfig& config() const noexcept { return config_; }
  std::size_t node_cap() const noexcept { return node_cap_; }
  std::size_t threshold() const noexcept { return threshold_; }

  // Bucket by direct scan of the boundaries, no comparisons counted.
  std::size_t bucket_of(double key) const;
  Route route(std::size_t position, double key, std::size_t limit = static_cast<std::size_t>(-1)) const;

  SortResult sort(std::span<const double> input) const;

 private:
  std::size_t n_;
  std::vector<double> boundaries_;
  std::vector<SearchTree> trees_;
  SorterConfig config_;
  std::size_t node_cap_;
  std::size_t threshold_;
};

std::size_t node_cap(std::size_t n, double exponent);
// floor(fallback_factor * n * log2 n)
std::size_t fallback_threshold(std::size_t n, double fallback_factor);

// Every s-th order statistic of the s pooled samples (deduplicated), and a
// weight-balanced tree per position over bucket counts plus one.
BucketSorter train_sorter(std::span<const std::vector<double>> samples, SorterConfig config = {});

// Weight-balanced tree over buckets 0..weights.size()-1 with at most `cap`
// internal nodes; heavier ranges are split first.
SearchTree build_tree(std::span<const double> weights, std::size_t cap);

// Top-down mergesort; returns the number of key comparisons.
std::size_t merge_sort(std::vector<double>& keys);

// Expected routing comparisons at `position` under the given bucket weights.
double expected_depth(const BucketSorter& sorter, std::size_t position, std::span<const double> weights);

// Array generators for benchmarks. Skewed: entry i is (i + spread * N(0,1)) / n,
// so each position occupies a few buckets. Uniform: i.i.d. on [0, 1).
std::vector<double> skewed_array(Rng& rng, std::size_t n, double spread = 0.5);
std::vector<double> uniform_array(Rng& rng, std::size_t n);

std::string to_json(const BucketSorter& sorter);
BucketSorter sorter_from_json(std::string_view text, const std::string& source = "<sorter>");

}  // namespace algoselect::sorting
