// Independent reference implementations used only by tests. These stay
// deliberately naive so they cannot share bugs with the library code.
#pragma once

#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <vector>

#include "maze/env.hpp"

namespace oracle {

// Naive double-loop Jensen-Shannon divergence (log-ratio form).
inline double jsd(const std::vector<std::vector<double>>& dists) {
  const size_t n = dists.size();
  const size_t m = dists[0].size();
  std::vector<double> mean(m, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t a = 0; a < m; ++a) mean[a] += dists[i][a] / n;
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t a = 0; a < m; ++a) {
      if (dists[i][a] > 0.0)
        total += dists[i][a] * std::log(dists[i][a] / mean[a]);
    }
  }
  return total / n;
}

// Brute-force GAE: A_t = sum_{k>=t} (gamma*lambda)^{k-t} * delta_k within the
// episode containing t.
inline std::vector<double> gae(const std::vector<double>& rewards,
                               const std::vector<double>& values,
                               const std::vector<std::uint8_t>& dones,
                               double gamma, double lambda) {
  const size_t n = rewards.size();
  std::vector<double> delta(n);
  for (size_t t = 0; t < n; ++t) {
    const double next_v = (t + 1 < n && !dones[t]) ? values[t + 1] : 0.0;
    delta[t] = rewards[t] + gamma * next_v - values[t];
  }
  std::vector<double> adv(n, 0.0);
  for (size_t t = 0; t < n; ++t) {
    double w = 1.0;
    for (size_t k = t; k < n; ++k) {
      adv[t] += w * delta[k];
      if (dones[k]) break;
      w *= gamma * lambda;
    }
  }
  return adv;
}

// Central finite differences of a scalar function of the parameter vector.
inline std::vector<double> finite_diff(
    std::vector<double> w, const std::function<double(const std::vector<double>&)>& f,
    double h = 1e-5) {
  std::vector<double> grad(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    const double orig = w[i];
    w[i] = orig + h;
    const double fp = f(w);
    w[i] = orig - h;
    const double fm = f(w);
    w[i] = orig;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

// Floor cells reachable by one player walking alone from (r0, c0).
inline std::set<std::pair<int, int>> flood_fill(const maze::Layout& layout,
                                                int r0, int c0) {
  std::set<std::pair<int, int>> seen;
  std::queue<std::pair<int, int>> frontier;
  frontier.push({r0, c0});
  seen.insert({r0, c0});
  while (!frontier.empty()) {
    auto [r, c] = frontier.front();
    frontier.pop();
    for (maze::Dir d : {maze::Dir::North, maze::Dir::South, maze::Dir::East,
                        maze::Dir::West}) {
      auto [dr, dc] = maze::dir_delta(d);
      const int nr = r + dr, nc = c + dc;
      if (layout.is_floor(nr, nc) && !seen.count({nr, nc})) {
        seen.insert({nr, nc});
        frontier.push({nr, nc});
      }
    }
  }
  return seen;
}

// True if any cell of `kind` is adjacent to a cell in `region`.
inline bool region_touches(const maze::Layout& layout,
                           const std::set<std::pair<int, int>>& region,
                           maze::Cell kind) {
  for (auto [r, c] : region) {
    for (maze::Dir d : {maze::Dir::North, maze::Dir::South, maze::Dir::East,
                        maze::Dir::West}) {
      auto [dr, dc] = maze::dir_delta(d);
      if (layout.in_bounds(r + dr, c + dc) && layout.at(r + dr, c + dc) == kind)
        return true;
    }
  }
  return false;
}

}  // namespace oracle
