#include "maze/deploy.hpp"

#include <limits>
#include <stdexcept>

namespace maze {

int ensemble_action(std::span<const PolicyParams> agents,
                    std::span<const double> obs) {
  if (agents.empty()) throw std::invalid_argument("ensemble_action: no agents");
  int votes[kNumActions] = {};
  double mass[kNumActions] = {};
  for (const auto& agent : agents) {
    const ActionDistribution dist = forward(agent, obs);
    const int a = greedy_action(dist);
    votes[a]++;
    for (int j = 0; j < kNumActions; ++j) mass[j] += dist.probs[j];
  }
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (votes[a] > votes[best] ||
        (votes[a] == votes[best] && mass[a] > mass[best])) {
      best = a;
    }
  }
  return best;
}

int select_best_response_offline(std::span<const PolicyParams> agents,
                                 const Archive& archive, const Layout& layout,
                                 const EnvConfig& env_cfg, int episodes) {
  if (agents.empty() || archive.entries.empty())
    throw std::invalid_argument("select_best_response_offline: empty input");
  int best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < agents.size(); ++i) {
    double sum = 0.0;
    for (const auto& entry : archive.entries) {
      sum += evaluate_pair(agents[i], entry.partner, layout, env_cfg, episodes,
                           EvalMode::Greedy, nullptr)
                 .mean;
    }
    const double mean = sum / static_cast<double>(archive.entries.size());
    if (mean > best_mean) {
      best_mean = mean;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace maze
