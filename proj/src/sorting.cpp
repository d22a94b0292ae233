#include "algoselect/sorting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "algoselect/error.hpp"

namespace algoselect::sorting {

using json = nlohmann::json;

std::size_t SearchTree::internal_nodes() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& t) { return !t.leaf(); }));
}

std::size_t node_cap(std::size_t n, double exponent) {
  if (n == 0) return 0;
  return static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), exponent) - 1e-9));
}

std::size_t fallback_threshold(std::size_t n, double fallback_factor) {
  if (n < 2) return 0;
  return static_cast<std::size_t>(std::floor(fallback_factor * static_cast<double>(n) * std::log2(static_cast<double>(n))));
}

BucketSorter::BucketSorter(std::size_t n, std::vector<double> boundaries, std::vector<SearchTree> trees,
                           SorterConfig config)
    : n_(n), boundaries_(std::move(boundaries)), trees_(std::move(trees)), config_(config) {
  if (n_ == 0) throw std::invalid_argument("sorter: array length must be positive");
  if (boundaries_.empty()) throw std::invalid_argument("sorter: no boundaries");
  for (std::size_t i = 0; i < boundaries_.size(); ++i) {
    if (!std::isfinite(boundaries_[i])) throw std::invalid_argument("sorter: non-finite boundary");
    if (i && !(boundaries_[i - 1] < boundaries_[i])) throw std::invalid_argument("sorter: boundaries not strictly increasing");
  }
  if (trees_.size() != n_) throw std::invalid_argument("sorter: need one search tree per position");
  if (!(config_.fallback_factor > 0.0)) throw std::invalid_argument("sorter: fallback factor must be positive");
  node_cap_ = sorting::node_cap(n_, config_.tree_exponent);
  threshold_ = fallback_threshold(n_, config_.fallback_factor);
  const auto buckets = static_cast<std::uint32_t>(boundaries_.size());
  for (const auto& t : trees_) {
    if (t.nodes.empty()) throw std::invalid_argument("sorter: empty search tree");
    if (t.nodes[0].lo != 0 || t.nodes[0].hi != buckets - 1) throw std::invalid_argument("sorter: tree root must span all buckets");
    for (const auto& node : t.nodes) {
      if (node.lo > node.hi || node.hi >= buckets) throw std::invalid_argument("sorter: tree node range out of bounds");
      if (node.leaf()) continue;
      const auto size = static_cast<std::int32_t>(t.nodes.size());
      if (node.left < 0 || node.left >= size || node.right < 0 || node.right >= size ||
          static_cast<std::uint32_t>(node.split) <= node.lo || static_cast<std::uint32_t>(node.split) > node.hi ||
          t.nodes[node.left].lo != node.lo || t.nodes[node.left].hi + 1 != static_cast<std::uint32_t>(node.split) ||
          t.nodes[node.right].lo != static_cast<std::uint32_t>(node.split) || t.nodes[node.right].hi != node.hi)
        throw std::invalid_argument("sorter: malformed search tree");
    }
  }
}

std::size_t BucketSorter::bucket_of(double key) const {
  const auto it = std::upper_bound(boundaries_.begin() + 1, boundaries_.end(), key);
  return static_cast<std::size_t>(it - boundaries_.begin()) - 1;
}

Route BucketSorter::route(std::size_t position, double key, std::size_t limit) const {
  const auto& nodes = trees_.at(position).nodes;
  Route r;
  std::size_t at = 0;
  while (!nodes[at].leaf()) {
    if (r.comparisons == limit) return {kAborted, r.comparisons};
    ++r.comparisons;
    at = static_cast<std::size_t>(key < boundaries_[static_cast<std::size_t>(nodes[at].split)] ? nodes[at].left
                                                                                               : nodes[at].right);
  }
  // Largest k in [lo, hi] with boundaries[k] <= key; boundaries[lo] is known to hold.
  std::size_t l = nodes[at].lo, h = nodes[at].hi;
  while (l < h) {
    if (r.comparisons == limit) return {kAborted, r.comparisons};
    const std::size_t mid = l + (h - l + 1) / 2;
    ++r.comparisons;
    if (key < boundaries_[mid])
      h = mid - 1;
    else
      l = mid;
  }
  r.bucket = l;
  return r;
}

namespace {

std::size_t merge_rec(std::vector<double>& a, std::vector<double>& tmp, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::size_t count = merge_rec(a, tmp, lo, mid) + merge_rec(a, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    ++count;
    tmp[k++] = a[j] < a[i] ? a[j++] : a[i++];
  }
  while (i < mid) tmp[k++] = a[i++];
  while (j < hi) tmp[k++] = a[j++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo), tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            a.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

}  // namespace

std::size_t merge_sort(std::vector<double>& keys) {
  std::vector<double> tmp(keys.size());
  return merge_rec(keys, tmp, 0, keys.size());
}

SortResult BucketSorter::sort(std::span<const double> input) const {
  if (input.size() != n_)
    throw std::invalid_argument("sort: array of length " + std::to_string(input.size()) + ", sorter trained for " +
                                std::to_string(n_));
  for (double x : input)
    if (std::isnan(x)) throw std::invalid_argument("sort: NaN key");

  SortResult out;
  auto& st = out.stats;
  const auto fall_back = [&] {
    st.fallback = true;
    out.sorted.assign(input.begin(), input.end());
    st.merge_comparisons = merge_sort(out.sorted);
    return out;
  };

  std::vector<std::vector<double>> buckets(boundaries_.size());
  for (std::size_t i = 0; i < n_; ++i) {
    const Route r = route(i, input[i], threshold_ - st.route_comparisons);
    st.route_comparisons += r.comparisons;
    if (r.bucket == kAborted) return fall_back();
    buckets[r.bucket].push_back(input[i]);
  }

  std::size_t budget = threshold_ - st.route_comparisons;
  for (auto& b : buckets) {
    for (std::size_t i = 1; i < b.size(); ++i) {
      const double key = b[i];
      std::size_t j = i;
      while (j > 0) {
        if (budget == 0) return fall_back();
        --budget;
        ++st.insertion_comparisons;
        if (!(key < b[j - 1])) break;
        b[j] = b[j - 1];
        --j;
      }
      b[j] = key;
    }
  }

  st.occupancy.reserve(buckets.size());
  out.sorted.reserve(n_);
  for (const auto& b : buckets) {
    st.occupancy.push_back(b.size());
    out.sorted.insert(out.sorted.end(), b.begin(), b.end());
  }
  return out;
}

SearchTree build_tree(std::span<const double> weights, std::size_t cap) {
  if (weights.empty()) throw std::invalid_argument("build_tree: no buckets");
  std::vector<double> prefix(weights.size() + 1, 0.0);
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] >= 0.0)) throw std::invalid_argument("build_tree: negative weight");
    prefix[k + 1] = prefix[k] + weights[k];
  }
  const auto mass = [&](std::size_t lo, std::size_t hi) { return prefix[hi + 1] - prefix[lo]; };

  SearchTree tree;
  tree.nodes.push_back({-1, -1, -1, 0, static_cast<std::uint32_t>(weights.size() - 1)});
  // Max-heap on range mass; ties go to the leftmost range.
  std::priority_queue<std::tuple<double, std::int64_t, std::size_t>> open;
  if (weights.size() > 1) open.emplace(mass(0, weights.size() - 1), 0, 0);
  std::size_t internal = 0;
  while (!open.empty() && internal < cap) {
    const auto [w, neg_lo, index] = open.top();
    open.pop();
    const std::size_t lo = tree.nodes[index].lo, hi = tree.nodes[index].hi;
    // Split point j in (lo, hi] balancing mass(lo, j-1) against mass(j, hi).
    std::size_t best = lo + 1;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = lo + 1; j <= hi; ++j) {
      const double gap = std::fabs(mass(lo, j - 1) - mass(j, hi));
      if (gap < best_gap) {
        best_gap = gap;
        best = j;
      }
    }
    const auto left = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.push_back({-1, -1, -1, static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(best - 1)});
    tree.nodes.push_back({-1, -1, -1, static_cast<std::uint32_t>(best), static_cast<std::uint32_t>(hi)});
    tree.nodes[index].split = static_cast<std::int32_t>(best);
    tree.nodes[index].left = left;
    tree.nodes[index].right = left + 1;
    ++internal;
    if (best - 1 > lo) open.emplace(mass(lo, best - 1), -static_cast<std::int64_t>(lo), static_cast<std::size_t>(left));
    if (hi > best) open.emplace(mass(best, hi), -static_cast<std::int64_t>(best), static_cast<std::size_t>(left + 1));
  }
  return tree;
}

BucketSorter train_sorter(std::span<const std::vector<double>> samples, SorterConfig config) {
  if (samples.empty()) throw std::invalid_argument("train_sorter: no samples");
  const std::size_t n = samples[0].size();
  if (n == 0) throw std::invalid_argument("train_sorter: empty arrays");
  std::vector<double> pooled;
  pooled.reserve(samples.size() * n);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if (samples[s].size() != n)
      throw std::invalid_argument("train_sorter: sample " + std::to_string(s) + " has length " +
                                  std::to_string(samples[s].size()) + ", expected " + std::to_string(n));
    for (double x : samples[s]) {
      if (!std::isfinite(x)) throw std::invalid_argument("train_sorter: non-finite value in sample " + std::to_string(s));
      pooled.push_back(x);
    }
  }
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> boundaries;
  for (std::size_t k = 0; k < n; ++k) {
    const double b = pooled[k * samples.size()];
    if (boundaries.empty() || boundaries.back() < b) boundaries.push_back(b);
  }

  BucketSorter probe(n, boundaries, std::vector<SearchTree>(n, SearchTree{{{-1, -1, -1, 0,
                                                                           static_cast<std::uint32_t>(boundaries.size() - 1)}}}),
                     config);
  std::vector<SearchTree> trees;
  trees.reserve(n);
  std::vector<double> weights(boundaries.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(weights.begin(), weights.end(), 1.0);
    for (const auto& s : samples) weights[probe.bucket_of(s[i])] += 1.0;
    trees.push_back(build_tree(weights, probe.node_cap()));
  }
  return BucketSorter(n, std::move(boundaries), std::move(trees), config);
}

double expected_depth(const BucketSorter& sorter, std::size_t position, std::span<const double> weights) {
  if (weights.size() != sorter.bucket_count()) throw std::invalid_argument("expected_depth: one weight per bucket");
  double total = 0.0, acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    // Routing cost depends only on the bucket, so any key inside it will do.
    const double key = k == 0 ? -std::numeric_limits<double>::infinity() : sorter.boundaries()[k];
    acc += weights[k] * static_cast<double>(sorter.route(position, key).comparisons);
    total += weights[k];
  }
  return total > 0.0 ? acc / total : 0.0;
}

std::vector<double> skewed_array(Rng& rng, std::size_t n, double spread) {
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = (static_cast<double>(i) + spread * rng.normal()) / static_cast<double>(n);
  return a;
}

std::vector<double> uniform_array(Rng& rng, std::size_t n) {
  std::vector<double> a(n);
  for (auto& x : a) x = rng.uniform();
  return a;
}

std::string to_json(const BucketSorter& sorter) {
  json trees = json::array();
  for (const auto& t : sorter.trees()) {
    json nodes = json::array();
    for (const auto& node : t.nodes) nodes.push_back({node.split, node.left, node.right, node.lo, node.hi});
    trees.push_back(std::move(nodes));
  }
  return json{{"n", sorter.length()},
              {"boundaries", sorter.boundaries()},
              {"tree_exponent", sorter.config().tree_exponent},
              {"node_cap", sorter.node_cap()},
              {"fallback_factor", sorter.config().fallback_factor},
              {"threshold", sorter.threshold()},
              {"trees", std::move(trees)}}
      .dump();
}

BucketSorter sorter_from_json(std::string_view text, const std::string& source) {
  try {
    const json j = json::parse(text);
    SorterConfig config;
    config.tree_exponent = j.at("tree_exponent").get<double>();
    config.fallback_factor = j.at("fallback_factor").get<double>();
    std::vector<SearchTree> trees;
    for (const auto& t : j.at("trees")) {
      SearchTree tree;
      for (const auto& node : t) {
        tree.nodes.push_back({node.at(0).get<std::int32_t>(), node.at(1).get<std::int32_t>(), node.at(2).get<std::int32_t>(),
                              node.at(3).get<std::uint32_t>(), node.at(4).get<std::uint32_t>()});
      }
      trees.push_back(std::move(tree));
    }
    return BucketSorter(j.at("n").get<std::size_t>(), j.at("boundaries").get<std::vector<double>>(), std::move(trees),
                        config);
  } catch (const json::exception& e) {
    throw ParseError(source, 0, e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, 0, e.what());
  }
}

}  // namespace algoselect::sorting
