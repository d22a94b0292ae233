#include "algoselect/gdtune.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "algoselect/error.hpp"
#include "algoselect/io.hpp"

namespace algoselect::gd {

using json = nlohmann::json;

GdFamily::GdFamily(const GdParams& params) : p_(params) {
  if (!(p_.rho_l > 0.0 && p_.rho_l <= p_.rho_u && std::isfinite(p_.rho_u)))
    throw std::invalid_argument("gd family: need 0 < rho_l <= rho_u");
  if (!(p_.m_sc > 0.0 && p_.m_sc <= p_.L && std::isfinite(p_.L)))
    throw std::invalid_argument("gd family: need 0 < m_sc <= L");
  if (!(p_.c > 0.0 && p_.c < 1.0)) throw std::invalid_argument("gd family: c must lie in (0, 1)");
  if (!(p_.nu > 0.0 && p_.Z > p_.nu && std::isfinite(p_.Z))) throw std::invalid_argument("gd family: need Z > nu > 0");
  if (p_.c > p_.rho_l * p_.m_sc)
    throw std::invalid_argument("gd family: c = " + io::format_double(p_.c) + " exceeds rho_l * m_sc = " +
                                io::format_double(p_.rho_l * p_.m_sc) + "; guaranteed progress would fail");
  H_ = std::log(p_.nu / p_.Z) / std::log1p(-p_.c);
  double bound = H_;
  if (p_.stop == StopRule::gradient_norm)
    bound = std::max(H_, std::log(p_.nu / (p_.L * p_.Z)) / std::log1p(-p_.c));
  // Tolerant ceiling: H computed as an exact integer ratio may land a hair above it.
  cap_ = static_cast<std::size_t>(std::ceil(bound * (1.0 - 1e-12)));
}

double GdFamily::D(double rho) const { return std::max(1.0, p_.L * rho - 1.0); }

double GdFamily::K() const { return p_.nu * p_.c * p_.c / (p_.L * p_.Z) * std::pow(D(p_.rho_u), -H_); }

double GdFamily::max_eigenvalue() const { return std::min(p_.L, (2.0 - p_.c) / p_.rho_u); }

double norm(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return std::sqrt(s);
}

void validate(const GdFamily& family, const GdInstance& x) {
  const auto& p = family.params();
  if (x.lambdas.empty()) throw std::invalid_argument("gd instance: empty dimension");
  if (x.lambdas.size() != x.z0.size())
    throw std::invalid_argument("gd instance: " + std::to_string(x.lambdas.size()) + " eigenvalues but z0 has " +
                                std::to_string(x.z0.size()) + " coordinates");
  const double top = family.max_eigenvalue();
  for (double l : x.lambdas) {
    if (!(l >= p.m_sc && l <= p.L))
      throw std::invalid_argument("gd instance: eigenvalue " + io::format_double(l) + " outside [m_sc, L]");
    if (l > top * (1.0 + 1e-12))
      throw std::invalid_argument("gd instance: eigenvalue " + io::format_double(l) +
                                  " breaks guaranteed progress at rho_u (needs lambda * rho_u <= 2 - c)");
  }
  for (double v : x.z0)
    if (!std::isfinite(v)) throw std::invalid_argument("gd instance: non-finite z0");
  if (norm(x.z0) > p.Z * (1.0 + 1e-12)) throw std::invalid_argument("gd instance: ||z0|| exceeds Z");
}

std::vector<double> step_map(double rho, std::span<const double> z, const GdInstance& x) {
  if (z.size() != x.lambdas.size()) throw std::invalid_argument("step_map: dimension mismatch");
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - rho * x.lambdas[i] * z[i];
  return out;
}

namespace {

double stop_measure(const GdFamily& family, std::span<const double> z, const GdInstance& x) {
  if (family.params().stop == StopRule::iterate_norm) return norm(z);
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += (x.lambdas[i] * z[i]) * (x.lambdas[i] * z[i]);
  return std::sqrt(s);
}

// run_gd without validation; the caller has already checked the instance.
std::size_t iterate(const GdFamily& family, double rho, const GdInstance& x) {
  const auto& p = family.params();
  std::vector<double> z = x.z0;
  std::size_t k = 0;
  double zn = norm(z);
  while (stop_measure(family, z, x) > p.nu) {
    if (k >= family.cap())
      throw std::logic_error("run_gd: iteration cap " + std::to_string(family.cap()) + " exceeded");
    z = step_map(rho, z, x);
    const double next = norm(z);
    if (next > (1.0 - p.c) * zn * (1.0 + 1e-12) + 1e-300)
      throw std::logic_error("run_gd: step at rho = " + io::format_double(rho) + " did not contract by 1 - c");
    zn = next;
    ++k;
  }
  return k;
}

}  // namespace

std::size_t run_gd(const GdFamily& family, double rho, const GdInstance& instance) {
  if (!family.contains(rho)) throw std::invalid_argument("run_gd: rho = " + io::format_double(rho) + " outside the interval");
  validate(family, instance);
  return iterate(family, rho, instance);
}

double drift_bound(const GdFamily& family, double rho, double eta, std::size_t j) {
  const auto& p = family.params();
  return (eta - rho) * std::pow(family.D(rho), static_cast<double>(j)) * p.L * p.Z / p.c;
}

std::vector<double> knet(const GdFamily& family) {
  const auto& p = family.params();
  const double K = family.K();
  if (!(K > 0.0)) throw CapacityError("knet: spacing K underflows; rescale nu, c, L or Z");
  const double span = (p.rho_u - p.rho_l) / K;
  if (span + 3.0 > static_cast<double>(p.max_net))
    throw CapacityError("knet: about " + io::format_double(std::floor(span) + 2.0) + " points needed, above the cap of " +
                        std::to_string(p.max_net) + "; rescale nu, c, L or Z");
  const auto first = static_cast<long long>(std::ceil(p.rho_l / K - 1e-9));
  const auto last = static_cast<long long>(std::floor(p.rho_u / K + 1e-9));
  std::vector<double> net{p.rho_l};
  for (long long k = first; k <= last; ++k) {
    const double x = std::clamp(static_cast<double>(k) * K, p.rho_l, p.rho_u);
    net.push_back(x);
  }
  net.push_back(p.rho_u);
  std::sort(net.begin(), net.end());
  // Merge points that coincide up to rounding, keeping endpoints exact.
  std::vector<double> out;
  for (double x : net) {
    if (!out.empty() && x - out.back() <= 1e-9 * K) {
      if (x == p.rho_u) out.back() = x;
      continue;
    }
    out.push_back(x);
  }
  return out;
}

GdInstance random_instance(const GdFamily& family, std::size_t dimension, Rng& rng) {
  const auto& p = family.params();
  if (dimension == 0) throw std::invalid_argument("random_instance: dimension must be positive");
  const double top = family.max_eigenvalue();
  if (top < p.m_sc)
    throw std::invalid_argument("random_instance: no eigenvalue in [m_sc, L] contracts at every step size");
  GdInstance x;
  for (std::size_t i = 0; i < dimension; ++i) x.lambdas.push_back(rng.uniform(p.m_sc, top));
  for (std::size_t i = 0; i < dimension; ++i) x.z0.push_back(rng.normal());
  const double r = p.Z * rng.uniform_open();
  const double n0 = norm(x.z0);
  for (auto& v : x.z0) v = v / n0 * r;
  return x;
}

StepsizeErm erm_stepsize(const GdFamily& family, std::span<const GdInstance> samples, std::span<const GdInstance> heldout) {
  return erm_stepsize(family, knet(family), samples, heldout);
}

StepsizeErm erm_stepsize(const GdFamily& family, std::vector<double> net, std::span<const GdInstance> samples,
                         std::span<const GdInstance> heldout) {
  if (samples.empty()) throw std::invalid_argument("erm_stepsize: empty sample list");
  if (net.empty()) throw std::invalid_argument("erm_stepsize: empty net");
  for (double r : net)
    if (!family.contains(r)) throw std::invalid_argument("erm_stepsize: net point outside the interval");
  for (const auto& x : samples) validate(family, x);
  for (const auto& x : heldout) validate(family, x);

  const NetFamily candidates(family, net);
  const CostMatrix train = evaluate_costs<GdInstance>(candidates, samples);
  const ErrorReport first = erm(train, Orientation::minimize);

  // Iteration counts are integers, so mean ties are exact.
  const double best = first.train_mean;
  std::size_t run_first = 0, run_len = 0;
  for (std::size_t i = 0; i < net.size();) {
    if (train.row_mean(i) != best) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < net.size() && train.row_mean(j + 1) == best) ++j;
    if (j - i + 1 > run_len) {
      run_first = i;
      run_len = j - i + 1;
    }
    i = j + 1;
  }
  const std::size_t chosen = run_first + (run_len - 1) / 2;

  StepsizeErm out;
  out.net = std::move(net);
  out.rho = out.net[chosen];
  out.tie_first = run_first;
  out.tie_last = run_first + run_len - 1;
  out.report.chosen = chosen;
  out.report.train_mean = best;
  if (!heldout.empty()) {
    const CostMatrix test = evaluate_costs<GdInstance>(candidates, heldout);
    const std::size_t hb = best_row(test, Orientation::minimize);
    out.report.heldout_mean = test.row_mean(chosen);
    out.report.heldout_best = hb;
    out.report.heldout_best_mean = test.row_mean(hb);
    out.report.estimated_error = std::abs(*out.report.heldout_mean - *out.report.heldout_best_mean);
  }
  return out;
}

namespace {

json vec(std::span<const double> v) { return json(std::vector<double>(v.begin(), v.end())); }

}  // namespace

LemmaReport verify_lemmas(const GdFamily& family, std::size_t trials, std::uint64_t seed, std::size_t max_dimension) {
  if (trials == 0) throw std::invalid_argument("verify_lemmas: trials must be at least 1");
  if (max_dimension == 0) throw std::invalid_argument("verify_lemmas: max_dimension must be at least 1");
  const auto& p = family.params();
  const double K = family.K();
  const std::size_t depth = family.cap();
  Rng rng(derive_seed(seed, "gd.lemmas"));
  LemmaReport report;
  report.trials = trials;

  auto fail = [&](const char* lemma, const GdInstance& x, double rho, double eta, json extra) {
    ++report.violations;
    if (!report.counterexample.empty()) return;
    json j{{"lemma", lemma}, {"lambdas", x.lambdas}, {"z0", x.z0}, {"rho", rho}, {"eta", eta}};
    j.update(extra);
    report.counterexample = j.dump();
  };
  constexpr double tol = 1e-9;

  for (std::size_t t = 0; t < trials; ++t) {
    const GdInstance x = random_instance(family, 1 + rng.below(max_dimension), rng);
    const double rho = rng.uniform(p.rho_l, p.rho_u);
    const double eta = std::min(p.rho_u, rho + K * rng.uniform());

    // (a) one step is D(rho)-Lipschitz
    std::vector<double> w(x.dimension()), y(x.dimension());
    for (auto& v : w) v = rng.normal() * p.Z;
    for (auto& v : y) v = rng.normal() * p.Z;
    if (t % 17 == 0) y = w;
    std::vector<double> diff(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) diff[i] = w[i] - y[i];
    const auto gw = step_map(rho, w, x);
    const auto gy = step_map(rho, y, x);
    std::vector<double> gdiff(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) gdiff[i] = gw[i] - gy[i];
    const double lhs = norm(gdiff);
    const double rhs = family.D(rho) * norm(diff);
    if (rhs > 0.0) report.max_lipschitz_ratio = std::max(report.max_lipschitz_ratio, lhs / rhs);
    if (lhs > rhs * (1.0 + tol)) fail("lipschitz", x, rho, rho, {{"w", vec(w)}, {"y", vec(y)}, {"lhs", lhs}, {"rhs", rhs}});

    // (b) j-step drift between the two step sizes, j <= ceil(H)
    std::vector<double> a = x.z0, b = x.z0;
    for (std::size_t j = 1; j <= depth; ++j) {
      a = step_map(rho, a, x);
      b = step_map(eta, b, x);
      std::vector<double> d(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
      const double drift = norm(d);
      const double bound = drift_bound(family, rho, eta, j);
      if (bound > 0.0) report.max_drift_ratio = std::max(report.max_drift_ratio, drift / bound);
      if (drift > bound * (1.0 + tol) + 1e-300) {
        fail("drift", x, rho, eta, {{"j", j}, {"lhs", drift}, {"rhs", bound}});
        break;
      }
    }

    // (c) nearby step sizes differ by at most one iteration
    const auto kr = iterate(family, rho, x);
    const auto ke = iterate(family, eta, x);
    const std::size_t gap = kr > ke ? kr - ke : ke - kr;
    report.max_cost_gap = std::max(report.max_cost_gap, gap);
    if (gap > 1) fail("cost", x, rho, eta, {{"cost_rho", kr}, {"cost_eta", ke}});
  }
  return report;
}

GdInstance parse_gd_json(std::string_view text, const std::string& source) {
  try {
    const json j = json::parse(text);
    GdInstance x;
    x.lambdas = j.at("lambdas").get<std::vector<double>>();
    x.z0 = j.at("z0").get<std::vector<double>>();
    if (x.lambdas.size() != x.z0.size()) throw ParseError(source, 0, "lambdas and z0 differ in length");
    if (x.lambdas.empty()) throw ParseError(source, 0, "empty instance");
    return x;
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) line += text[i] == '\n';
    throw ParseError(source, line, e.what());
  } catch (const json::exception& e) {
    throw ParseError(source, 0, e.what());
  }
}

std::string gd_to_json(const GdInstance& instance) {
  return json{{"lambdas", instance.lambdas}, {"z0", instance.z0}}.dump() + "\n";
}

}  // namespace algoselect::gd
