#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "maze/env.hpp"
#include "maze/rng.hpp"

namespace maze {

// Fully-connected policy+value network over flattened grid observations:
// a shared tanh trunk with a 6-way softmax policy head and a scalar value
// head. Parameters live in one flat vector so checkpoints, Adam and the
// finite-difference checks all see the same layout:
//   [W0 b0 W1 b1 ... Wp bp Wv bv], W row-major (out x in).
struct ArchSpec {
  int input_dim = 0;
  std::vector<int> hidden = {64, 64, 64};

  int param_count() const;
  bool operator==(const ArchSpec&) const = default;
};

struct ActionDistribution {
  std::array<double, kNumActions> probs{};
  double value = 0.0;
};

struct PolicyParams {
  ArchSpec arch;
  Role role = Role::Agent;
  std::string lineage;
  long train_steps = 0;
  std::vector<double> w;
};

// Reproducible init: Gaussian weights scaled by 1/sqrt(fan_in), policy head
// additionally scaled down so the initial policy is near uniform; biases zero.
PolicyParams init_policy(const ArchSpec& arch, Role role, std::string lineage,
                         std::uint64_t seed);
PolicyParams init_policy_zero(const ArchSpec& arch, Role role,
                              std::string lineage);

struct ForwardCache {
  std::vector<std::vector<double>> activations;  // tanh outputs per layer
  std::array<double, kNumActions> logits{};
  ActionDistribution dist;
};

ActionDistribution forward(const PolicyParams& params,
                           std::span<const double> obs);
ActionDistribution forward(const PolicyParams& params,
                           std::span<const double> obs, ForwardCache& cache);

// Accumulates d(loss)/d(params) into `grad` given upstream seeds
// d(loss)/d(logits) and d(loss)/d(value) for the observation that produced
// `cache`.
void backward(const PolicyParams& params, const ForwardCache& cache,
              std::span<const double> obs,
              const std::array<double, kNumActions>& dlogits, double dvalue,
              std::span<double> grad);

// Analytic gradients used by the finite-difference checks.
std::vector<double> grad_logprob(const PolicyParams& params,
                                 std::span<const double> obs, int action);
std::vector<double> grad_value(const PolicyParams& params,
                               std::span<const double> obs);

double log_prob(const ActionDistribution& dist, int action);
std::pair<int, double> sample_action(const ActionDistribution& dist, Rng& rng);
int greedy_action(const ActionDistribution& dist);

// Offsets into the flat parameter vector, for tests and structured access.
struct ParamLayout {
  struct Block {
    int w_off, b_off, in, out;
  };
  std::vector<Block> trunk;
  Block policy_head;
  Block value_head;
  int total;

  static ParamLayout of(const ArchSpec& arch);
};

}  // namespace maze
