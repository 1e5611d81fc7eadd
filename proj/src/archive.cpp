#include "maze/archive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maze {

namespace {
double sq_dist(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("behavior dimension mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}
}  // namespace

std::vector<double> behavior_vector(const PolicyParams& partner,
                                    std::span<const PolicyParams> agents,
                                    const Layout& layout,
                                    const EnvConfig& env_cfg, int episodes) {
  if (episodes < 1) throw std::invalid_argument("behavior_vector: episodes < 1");
  std::vector<double> behavior;
  behavior.reserve(agents.size());
  for (const auto& agent : agents) {
    behavior.push_back(evaluate_pair(agent, partner, layout, env_cfg, episodes,
                                     EvalMode::Greedy, nullptr)
                           .mean);
  }
  return behavior;
}

InsertOutcome archive_insert(Archive& archive, ArchiveEntry entry, Rng& rng) {
  int nearest = -1;
  double nearest_d2 = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < archive.entries.size(); ++i) {
    const double d2 = sq_dist(archive.entries[i].behavior, entry.behavior);
    if (d2 < nearest_d2) {
      nearest_d2 = d2;
      nearest = static_cast<int>(i);
    }
  }

  const double thr = archive.distance_threshold;
  if (nearest < 0 || std::sqrt(nearest_d2) > thr) {
    entry.inserted_at = archive.next_insert_id++;
    archive.entries.push_back(std::move(entry));
    if (static_cast<int>(archive.entries.size()) > archive.capacity) {
      auto oldest = std::min_element(
          archive.entries.begin(), archive.entries.end(),
          [](const ArchiveEntry& a, const ArchiveEntry& b) {
            return a.inserted_at < b.inserted_at;
          });
      archive.entries.erase(oldest);
    }
    return InsertOutcome::Added;
  }
  if (rng.uniform() < 0.5) {
    entry.inserted_at = archive.next_insert_id++;
    archive.entries[nearest] = std::move(entry);
    return InsertOutcome::ReplacedOld;
  }
  return InsertOutcome::RejectedKeptOld;
}

double adaptive_threshold(const Archive& archive, double coef) {
  const size_t n = archive.entries.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  size_t count = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      sum += std::sqrt(
          sq_dist(archive.entries[i].behavior, archive.entries[j].behavior));
      count++;
    }
  }
  return coef * sum / static_cast<double>(count);
}

std::vector<int> kmeans_cluster(std::span<const std::vector<double>> points,
                                int k, Rng& rng, int max_iters) {
  const int n = static_cast<int>(points.size());
  if (k < 1) throw std::invalid_argument("kmeans: k < 1");
  if (n < k) throw std::invalid_argument("kmeans: fewer points than clusters");
  const size_t dim = points[0].size();
  for (const auto& p : points) {
    if (p.size() != dim)
      throw std::invalid_argument("kmeans: dimension mismatch");
  }

  // Greedy farthest-point seeding.
  std::vector<std::vector<double>> centers;
  centers.reserve(k);
  centers.push_back(points[rng.uniform_int(n)]);
  std::vector<double> min_d2(n);
  while (static_cast<int>(centers.size()) < k) {
    int far = 0;
    double far_d2 = -1.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq_dist(points[i], c));
      min_d2[i] = best;
      if (best > far_d2) {
        far_d2 = best;
        far = i;
      }
    }
    centers.push_back(points[far]);
  }

  std::vector<int> assign(n, 0);
  std::vector<int> cluster_size(k, 0);
  for (int iter = 0; iter < max_iters; ++iter) {
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d2 = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d2 = sq_dist(points[i], centers[c]);
        if (d2 < best_d2) {
          best_d2 = d2;
          best = c;
        }
      }
      assign[i] = best;
    }

    std::fill(cluster_size.begin(), cluster_size.end(), 0);
    for (int i = 0; i < n; ++i) cluster_size[assign[i]]++;

    // Empty-cluster repair: move the point farthest from its center out of a
    // multi-member cluster.
    for (int c = 0; c < k; ++c) {
      if (cluster_size[c] > 0) continue;
      int far = -1;
      double far_d2 = -1.0;
      for (int i = 0; i < n; ++i) {
        if (cluster_size[assign[i]] < 2) continue;
        const double d2 = sq_dist(points[i], centers[assign[i]]);
        if (d2 > far_d2) {
          far_d2 = d2;
          far = i;
        }
      }
      if (far < 0) break;
      cluster_size[assign[far]]--;
      assign[far] = c;
      cluster_size[c] = 1;
      centers[c] = points[far];
    }

    double movement = 0.0;
    for (int c = 0; c < k; ++c) {
      if (cluster_size[c] == 0) continue;
      std::vector<double> mean(dim, 0.0);
      for (int i = 0; i < n; ++i) {
        if (assign[i] != c) continue;
        for (size_t d = 0; d < dim; ++d) mean[d] += points[i][d];
      }
      for (double& m : mean) m /= cluster_size[c];
      movement += std::sqrt(sq_dist(mean, centers[c]));
      centers[c] = std::move(mean);
    }
    if (movement < 1e-9) break;
  }
  return assign;
}

std::vector<PolicyParams> select_partner_population(const Archive& archive,
                                                    int n_q, Rng& rng) {
  const int n = static_cast<int>(archive.entries.size());
  if (n < n_q)
    throw std::invalid_argument("select_partner_population: archive too small");
  std::vector<std::vector<double>> points;
  points.reserve(n);
  for (const auto& e : archive.entries) points.push_back(e.behavior);
  const std::vector<int> assign = kmeans_cluster(points, n_q, rng);

  std::vector<PolicyParams> selected;
  selected.reserve(n_q);
  for (int c = 0; c < n_q; ++c) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (assign[i] == c) members.push_back(i);
    const int pick = members[rng.uniform_int(static_cast<int>(members.size()))];
    selected.push_back(archive.entries[pick].partner);
  }
  return selected;
}

}  // namespace maze
