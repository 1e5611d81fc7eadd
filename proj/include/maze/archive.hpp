#pragma once

#include <span>
#include <vector>

#include "maze/evaluate.hpp"
#include "maze/policy.hpp"
#include "maze/rng.hpp"

namespace maze {

// Behavior-descriptor archive of partner policies. A partner's behavior is
// the vector of mean sparse rewards it achieves with each current agent;
// insertion is gated by Euclidean distance to the nearest stored behavior,
// capacity eviction drops the oldest entry, and the next partner population
// is drawn one-per-cluster from a K-means split of the archive.
struct ArchiveEntry {
  PolicyParams partner;
  std::vector<double> behavior;  // empty until first refresh
  long inserted_at = 0;
};

struct Archive {
  std::vector<ArchiveEntry> entries;
  int capacity = 20;
  double distance_threshold = 0.0;
  long next_insert_id = 0;
};

enum class InsertOutcome { Added, ReplacedOld, RejectedKeptOld };

// Component i = mean total sparse episode reward of (agents[i], partner)
// over `episodes` greedy episodes.
std::vector<double> behavior_vector(const PolicyParams& partner,
                                    std::span<const PolicyParams> agents,
                                    const Layout& layout,
                                    const EnvConfig& env_cfg, int episodes);

// Nearest-behavior gate: farther than the archive's threshold -> append
// (evicting the oldest entry if over capacity); otherwise a fair coin decides
// between replacing the nearest entry and dropping the newcomer.
InsertOutcome archive_insert(Archive& archive, ArchiveEntry entry, Rng& rng);

// Mean pairwise behavior distance times `coef`; 0 for fewer than 2 entries.
double adaptive_threshold(const Archive& archive, double coef);

// Lloyd's algorithm with greedy farthest-point seeding; guarantees k
// non-empty clusters by reseeding empty ones at the farthest point.
std::vector<int> kmeans_cluster(std::span<const std::vector<double>> points,
                                int k, Rng& rng, int max_iters = 50);

// K-means split into n_q clusters, one uniformly drawn member per cluster.
std::vector<PolicyParams> select_partner_population(const Archive& archive,
                                                    int n_q, Rng& rng);

}  // namespace maze
