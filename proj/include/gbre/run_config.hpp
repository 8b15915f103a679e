#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gbre/model.hpp"
#include "gbre/trainer.hpp"

namespace gbre {

// Everything a run needs: architecture, optimization, paths, toggles.
// Resolution order is preset defaults, then config file, then explicit
// command-line flags; the resolved view is echoed into every output
// directory.
struct RunConfig {
  std::string preset = "synthetic";

  // architecture
  int word_dim = 16;
  int hidden = 32;
  int window = 3;
  int pos_dim = 4;
  int max_len = 40;
  int max_bag_size = 32;
  bool qs_att = true;
  bool bag_att = true;
  std::string aggregation = "att";
  double bag_dropout = 0.3;
  double cls_dropout = 0.5;
  bool freeze_embeddings = false;

  // optimization
  double learning_rate = 0.2;
  int batch_size = 16;
  int epochs = 20;
  int patience = 5;
  std::uint64_t seed = 42;

  // evaluation
  std::vector<int> p_at = {50, 100, 200};
  bool dump_attention = false;

  // files
  std::string train_path, valid_path, test_path;
  std::string embeddings_path, relations_path;
  std::string checkpoint_path;
  std::string out_dir = "out";

  int qs_output_width() const { return 3 * word_dim; }
  int encoder_output_width() const { return 3 * hidden; }

  ModelConfig model_config(int num_relations) const;
  TrainConfig train_config() const;
};

// Table of per-dataset defaults; names: biorel, tbga, nyt, synthetic.
RunConfig preset_config(const std::string& name);

// Flat JSON object of overrides, same keys as the snapshot.
void apply_config_file(RunConfig& config, const std::string& path);

std::string config_snapshot_json(const RunConfig& config);
void write_config_snapshot(const RunConfig& config, const std::string& path);

}  // namespace gbre
