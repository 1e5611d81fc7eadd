#pragma once

#include <filesystem>
#include <string>

#include "maze/coevo.hpp"

namespace maze {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary records with a magic header, version and a trailing checksum;
// parameters round-trip bit-exactly. Truncated or edited files fail to load.
void save_policy(const PolicyParams& params, const std::string& path);
PolicyParams load_policy(const std::string& path);

void save_train_state(const TrainState& state, const std::string& path);
TrainState load_train_state(const std::string& path);

// Writes one run directory: config snapshot lives next to
//   metrics.csv           one row per generation, append-friendly
//   checkpoint.bin        latest full train state (resume point)
//   gen_<t>/              population checkpoints + archive manifest
class DirectorySink : public GenerationSink {
 public:
  DirectorySink(std::filesystem::path dir, bool per_generation_checkpoints);

  void on_generation(const TrainState& state,
                     const GenerationMetrics& metrics) override;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  bool per_generation_checkpoints_;
};

void append_metrics_row(const std::filesystem::path& csv,
                        const GenerationMetrics& metrics);

}  // namespace maze
