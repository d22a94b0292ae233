#pragma once

// Step-size selection for gradient descent on diagonal quadratics
// f(z) = 1/2 sum_i lambda_i z_i^2, with the net-based ERM and numeric checks
// of the one-step, drift and iteration-count Lipschitz properties.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "algoselect/core.hpp"
#include "algoselect/random.hpp"

namespace algoselect::gd {

enum class StopRule {
  iterate_norm,   // continue while ||z|| > nu (the analysed rule)
  gradient_norm,  // continue while ||grad f(z)|| > nu; no guarantees
};

struct GdParams {
  double rho_l = 0.1;
  double rho_u = 0.4;
  double L = 4.0;
  double m_sc = 1.0;
  double c = 0.1;
  double Z = 1.0;
  double nu = 0.01;
  StopRule stop = StopRule::iterate_norm;
  std::size_t max_net = 10'000'000;
};

class GdFamily {
 public:
  // Validates 0 < rho_l <= rho_u, 0 < m_sc <= L, 0 < c < 1, c <= rho_l * m_sc, Z > nu > 0.
  explicit GdFamily(const GdParams& params);

  const GdParams& params() const noexcept { return p_; }
  double H() const noexcept { return H_; }            // ln(nu / Z) / ln(1 - c)
  std::size_t cap() const noexcept { return cap_; }   // iteration cap, ceil(H) for the iterate rule
  double D(double rho) const;                         // max(1, L rho - 1)
  double K() const;                                   // nu c^2 / (L Z) * D(rho_u)^-H
  bool contains(double rho) const noexcept { return rho >= p_.rho_l && rho <= p_.rho_u; }
  // Largest eigenvalue an instance may have so every step size in the
  // interval contracts by (1 - c): min(L, (2 - c) / rho_u).
  double max_eigenvalue() const;

 private:
  GdParams p_;
  double H_;
  std::size_t cap_;
};

struct GdInstance {
  std::vector<double> lambdas;
  std::vector<double> z0;

  std::size_t dimension() const noexcept { return lambdas.size(); }
};

// Eigenvalues in [m_sc, max_eigenvalue()], ||z0|| <= Z.
void validate(const GdFamily& family, const GdInstance& instance);

std::vector<double> step_map(double rho, std::span<const double> z, const GdInstance& instance);
double norm(std::span<const double> z);

// Iterations until the stopping rule holds. Throws std::logic_error if a step
// fails to contract by (1 - c) or the cap is exceeded.
std::size_t run_gd(const GdFamily& family, double rho, const GdInstance& instance);

// (eta - rho) * D(rho)^j * L * Z / c
double drift_bound(const GdFamily& family, double rho, double eta, std::size_t j);

// Multiples of K inside [rho_l, rho_u] together with both endpoints.
std::vector<double> knet(const GdFamily& family);

GdInstance random_instance(const GdFamily& family, std::size_t dimension, Rng& rng);

class NetFamily {
 public:
  NetFamily(const GdFamily& family, std::vector<double> net) : family_(family), net_(std::move(net)) {}
  std::size_t size() const noexcept { return net_.size(); }
  double cost(std::size_t i, const GdInstance& x) const { return static_cast<double>(run_gd(family_, net_[i], x)); }
  Orientation orientation() const noexcept { return Orientation::minimize; }
  const std::vector<double>& net() const noexcept { return net_; }

 private:
  GdFamily family_;
  std::vector<double> net_;
};

struct StepsizeErm {
  double rho = 0.0;
  ErrorReport report;
  std::vector<double> net;
  // Contiguous run of net indices tied at the optimum that contains the choice.
  std::size_t tie_first = 0;
  std::size_t tie_last = 0;
};

// Exhaustive ERM over the net (cost = iteration count). Among net points tied
// at the optimal mean, picks the middle of the longest contiguous tied run.
StepsizeErm erm_stepsize(const GdFamily& family, std::span<const GdInstance> samples,
                         std::span<const GdInstance> heldout = {});
StepsizeErm erm_stepsize(const GdFamily& family, std::vector<double> net, std::span<const GdInstance> samples,
                         std::span<const GdInstance> heldout = {});

struct LemmaReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_lipschitz_ratio = 0.0;  // ||g(w) - g(y)|| / (D(rho) ||w - y||)
  double max_drift_ratio = 0.0;      // observed drift / drift_bound
  std::size_t max_cost_gap = 0;      // |run_gd(rho) - run_gd(eta)|
  std::string counterexample;        // JSON of the first violation, empty if none

  bool ok() const noexcept { return violations == 0; }
};

LemmaReport verify_lemmas(const GdFamily& family, std::size_t trials, std::uint64_t seed, std::size_t max_dimension = 5);

GdInstance parse_gd_json(std::string_view text, const std::string& source = "<gd>");
std::string gd_to_json(const GdInstance& instance);

}  // namespace algoselect::gd
