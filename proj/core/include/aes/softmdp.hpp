#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aes/simplex.hpp"

namespace aes {

using QTable = Eigen::MatrixXd;  // S x A
using Policy = std::vector<SimplexVec>;

struct TabularMdp {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  Eigen::MatrixXd rewards;          // S x A
  std::vector<double> transitions;  // index (s * A + a) * S + s'
  double gamma = 0.9;
  double mu = 0.2;
  double r_max = 1.0;
  SimplexVec rho;

  std::span<const double> row(std::size_t s, std::size_t a) const {
    return {transitions.data() + (s * n_actions + a) * n_states, n_states};
  }
  // Throws InvalidMdp.
  void validate() const;
};

TabularMdp random_mdp(std::size_t n_states, std::size_t n_actions, double gamma, double mu,
                      double r_max, std::mt19937_64& rng);

double q_max_bound(const TabularMdp& mdp);  // (R_max + gamma mu log A) / (1 - gamma)
double v_max_bound(const TabularMdp& mdp);  // (R_max + mu log A) / (1 - gamma)

// LSE of every row at temperature mu.
Eigen::VectorXd soft_state_values(const QTable& q, double mu);

QTable soft_bellman_apply(const TabularMdp& mdp, const QTable& q);
// Value iteration from zero (or from warm) until successive differences <= tol (1 - gamma).
QTable solve_soft_q(const TabularMdp& mdp, double tol, const QTable* warm = nullptr);
Policy soft_policy(const QTable& q, double mu);

struct PolicyValues {
  QTable q;
  Eigen::VectorXd v;
};
PolicyValues policy_eval(const TabularMdp& mdp, const Policy& pi, double tol);
SimplexVec occupancy(const TabularMdp& mdp, const Policy& pi);
double soft_return(const TabularMdp& mdp, const Policy& pi);

enum class DriftPattern { Steady, Abrupt, Linear, Periodic, Mixed };

const char* pattern_name(DriftPattern p);
std::optional<DriftPattern> parse_pattern(const std::string& name);

struct DriftSpec {
  std::vector<std::size_t> change_times;  // interaction steps in [1, T]
  double magnitude = 1.0;  // weight reached by abrupt / linear drift
  double period = 200.0;
  double amplitude = 0.5;  // peak weight of the periodic component
  bool reward_drift = true;
  bool transition_drift = false;
};

struct SoftMdpSequence {
  TabularMdp base;
  DriftPattern pattern = DriftPattern::Steady;
  std::size_t horizon = 1;
  DriftSpec drift;
  std::uint64_t seed = 0;
};

// Throws InvalidSpec.
void validate_sequence(const SoftMdpSequence& spec);

// Mixing weight toward the alternate configuration at step t in [1, T].
double drift_weight(const SoftMdpSequence& spec, std::size_t t);

struct AlternateConfig {
  Eigen::MatrixXd rewards;
  std::vector<double> transitions;
};
AlternateConfig alternate_config(const SoftMdpSequence& spec);

TabularMdp mix_instance(const SoftMdpSequence& spec, const AlternateConfig& alt, double weight);
TabularMdp instance_at(const SoftMdpSequence& spec, std::size_t t);
std::vector<TabularMdp> generate_sequence(const SoftMdpSequence& spec);

struct VariationBudget {
  std::vector<double> reward_delta;      // entry t-1 holds the change into step t
  std::vector<double> transition_delta;
  double budget = 0.0;
};
VariationBudget variation_budget(std::span<const TabularMdp> seq);

std::string sequence_to_json(const SoftMdpSequence& spec);
SoftMdpSequence sequence_from_json(const std::string& text);

}  // namespace aes
