#include "gbre/run_config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "gbre/errors.hpp"

namespace gbre {

using nlohmann::json;

ModelConfig RunConfig::model_config(int num_relations) const {
  ModelConfig m;
  m.word_dim = word_dim;
  m.pos_dim = pos_dim;
  m.hidden = hidden;
  m.window = window;
  m.max_len = max_len;
  m.num_relations = num_relations;
  m.qs_att = qs_att;
  m.bag_att = bag_att;
  m.aggregation = agg::mode_from_string(aggregation);
  m.bag_dropout = bag_dropout;
  m.cls_dropout = cls_dropout;
  m.freeze_embeddings = freeze_embeddings;
  return m;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.learning_rate = learning_rate;
  t.batch_size = batch_size;
  t.epochs = epochs;
  t.patience = patience;
  t.seed = seed;
  return t;
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "synthetic") return c;

  // shared full-scale defaults
  c.word_dim = 200;
  c.hidden = 230;
  c.window = 3;
  c.pos_dim = 5;
  c.max_len = 120;
  c.cls_dropout = 0.5;
  c.epochs = 30;
  if (name == "biorel") {
    c.bag_dropout = 0.3;
    c.learning_rate = 0.05;
    c.batch_size = 30;
    c.p_at = {4000, 8000, 12000, 16000};
  } else if (name == "tbga") {
    c.bag_dropout = 0.25;
    c.learning_rate = 0.1;
    c.batch_size = 128;
    c.p_at = {50, 100, 250, 500, 1000};
  } else if (name == "nyt") {
    c.bag_dropout = 0.3;
    c.learning_rate = 0.05;
    c.batch_size = 30;
    c.p_at = {100, 200, 300};
  } else {
    throw UsageError("unknown preset: " + name + " (expected biorel, tbga, nyt or synthetic)");
  }
  return c;
}

namespace {

json to_json(const RunConfig& c) {
  return json{{"preset", c.preset},
              {"word_size", c.word_dim},
              {"hidden_size", c.hidden},
              {"window_size", c.window},
              {"position_size", c.pos_dim},
              {"qs_output_size", c.qs_output_width()},
              {"encoder_output_size", c.encoder_output_width()},
              {"classifier_input_size", c.encoder_output_width()},
              {"max_len", c.max_len},
              {"max_bag_size", c.max_bag_size},
              {"qs_att", c.qs_att},
              {"bag_att", c.bag_att},
              {"aggregation", c.aggregation},
              {"bag_att_dropout", c.bag_dropout},
              {"dropout", c.cls_dropout},
              {"freeze_embeddings", c.freeze_embeddings},
              {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size},
              {"optimizer", "SGD"},
              {"epochs", c.epochs},
              {"patience", c.patience},
              {"seed", c.seed},
              {"p_at", c.p_at},
              {"train_path", c.train_path},
              {"valid_path", c.valid_path},
              {"test_path", c.test_path},
              {"embeddings_path", c.embeddings_path},
              {"relations_path", c.relations_path},
              {"checkpoint_path", c.checkpoint_path},
              {"out_dir", c.out_dir}};
}

}  // namespace

void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a flat JSON object");

  auto get = [&j](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  get("word_size", c.word_dim);
  get("hidden_size", c.hidden);
  get("window_size", c.window);
  get("position_size", c.pos_dim);
  get("max_len", c.max_len);
  get("max_bag_size", c.max_bag_size);
  get("qs_att", c.qs_att);
  get("bag_att", c.bag_att);
  get("aggregation", c.aggregation);
  get("bag_att_dropout", c.bag_dropout);
  get("dropout", c.cls_dropout);
  get("freeze_embeddings", c.freeze_embeddings);
  get("learning_rate", c.learning_rate);
  get("batch_size", c.batch_size);
  get("epochs", c.epochs);
  get("patience", c.patience);
  get("seed", c.seed);
  get("p_at", c.p_at);
  get("train_path", c.train_path);
  get("valid_path", c.valid_path);
  get("test_path", c.test_path);
  get("embeddings_path", c.embeddings_path);
  get("relations_path", c.relations_path);
  get("checkpoint_path", c.checkpoint_path);
  get("out_dir", c.out_dir);

  for (auto it = j.begin(); it != j.end(); ++it) {
    static const std::set<std::string> known = {
        "word_size",     "hidden_size",     "window_size",    "position_size",
        "max_len",       "max_bag_size",    "qs_att",         "bag_att",
        "aggregation",   "bag_att_dropout", "dropout",        "freeze_embeddings",
        "learning_rate", "batch_size",      "epochs",         "patience",
        "seed",          "p_at",            "train_path",     "valid_path",
        "test_path",     "embeddings_path", "relations_path", "checkpoint_path",
        "out_dir"};
    if (!known.count(it.key())) throw UsageError("config file: unknown key " + it.key());
  }
}

std::string config_snapshot_json(const RunConfig& config) { return to_json(config).dump(2); }

void write_config_snapshot(const RunConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write config snapshot: " + path);
  out << config_snapshot_json(config) << "\n";
}

}  // namespace gbre
