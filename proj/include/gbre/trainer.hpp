#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gbre/corpus.hpp"
#include "gbre/model.hpp"

namespace gbre {

// Optimization loop settings; the architecture (dims, toggles, dropout
// rates) lives in ModelConfig.
struct TrainConfig {
  double learning_rate = 0.05;
  int batch_size = 30;
  int epochs = 20;
  int patience = 5;  // epochs without a validation AUC improvement
  std::uint64_t seed = 42;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;       // mean bag cross-entropy over the epoch
  double valid_auc = -1.0;  // -1 when no validation set
};

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_valid_auc = -1.0;
};

// Mini-batch SGD on the bag cross-entropy. Shuffling, dropout and therefore
// the whole run are deterministic in `config.seed`. The best-validation-AUC
// parameters are restored into `params` before returning; training without a
// validation set keeps the final epoch and never stops early.
TrainResult train(const TrainConfig& config, ModelParams& params,
                  const std::vector<EncodedBag>& train_bags,
                  const std::vector<EncodedBag>& valid_bags, int na_id);

void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

void write_history_jsonl(const std::string& path, const std::vector<EpochStats>& history);

}  // namespace gbre
