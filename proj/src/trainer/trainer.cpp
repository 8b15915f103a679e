#include "gbre/trainer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "gbre/errors.hpp"
#include "gbre/evaluation.hpp"
#include "gbre/rng.hpp"
#include "gbre/sgd.hpp"

namespace gbre {

namespace {

std::vector<Tensor> snapshot(const ModelParams& params) {
  std::vector<Tensor> out;
  for (const Param* p : params.all()) out.push_back(p->tensor);
  return out;
}

void restore(ModelParams& params, const std::vector<Tensor>& values) {
  auto ps = params.all();
  for (std::size_t i = 0; i < ps.size(); ++i) ps[i]->tensor = values[i];
}

double validation_auc(const ModelParams& params, const std::vector<EncodedBag>& valid_bags,
                      int na_id) {
  const GoldFacts golds = gold_facts(valid_bags);
  if (golds.empty()) return -1.0;
  const auto ranked = rank_predictions(params, valid_bags, na_id);
  return auc(pr_curve(ranked, golds));
}

}  // namespace

TrainResult train(const TrainConfig& config, ModelParams& params,
                  const std::vector<EncodedBag>& train_bags,
                  const std::vector<EncodedBag>& valid_bags, int na_id) {
  if (train_bags.empty()) throw DataError("train: no training bags");
  if (config.batch_size < 1) throw UsageError("train: batch_size must be >= 1");

  Rng master(config.seed);
  Rng shuffle_rng = master.fork(1);
  Rng dropout_rng = master.fork(2);

  TrainResult result;
  std::vector<Tensor> best = snapshot(params);
  int epochs_since_best = 0;

  std::vector<std::size_t> order(train_bags.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(shuffle_rng.uniform_int(static_cast<int>(i)));
      std::swap(order[i - 1], order[j]);
    }

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      Tape tape;
      std::vector<Var> losses;
      losses.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        const EncodedBag& bag = train_bags[order[i]];
        BagForward fwd = bag_loss(tape, params, bag, /*train=*/true, &dropout_rng);
        if (!std::isfinite(fwd.loss->value.values[0]))
          throw NumericError("train: non-finite loss on bag " + bag.key);
        losses.push_back(fwd.loss);
        loss_sum += fwd.loss->value.values[0];
      }
      tape.backward(ops::mean_stack(tape, losses));
      // PAD embedding row stays zero whatever the data does
      for (int j = 0; j < params.config.word_dim; ++j)
        params.embeddings.grad.at(Vocabulary::kPadId, j) = 0.0;
      sgd_step(params.all(), config.learning_rate);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / static_cast<double>(train_bags.size());
    stats.valid_auc = valid_bags.empty() ? -1.0 : validation_auc(params, valid_bags, na_id);
    result.history.push_back(stats);

    if (stats.valid_auc > result.best_valid_auc) {
      result.best_valid_auc = stats.valid_auc;
      result.best_epoch = epoch;
      best = snapshot(params);
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
    }
    if (!valid_bags.empty() && epochs_since_best >= config.patience) break;
  }

  if (!valid_bags.empty()) restore(params, best);
  for (Param* p : params.all()) p->reset_grad();
  return result;
}

namespace {

using nlohmann::json;

json tensor_to_json(const Tensor& t) { return json{{"shape", t.shape}, {"values", t.values}}; }

Tensor tensor_from_json(const json& j) {
  return Tensor(j.at("shape").get<std::vector<int>>(), j.at("values").get<std::vector<double>>());
}

json config_to_json(const ModelConfig& c) {
  return json{{"word_dim", c.word_dim},
              {"pos_dim", c.pos_dim},
              {"hidden", c.hidden},
              {"window", c.window},
              {"max_len", c.max_len},
              {"num_relations", c.num_relations},
              {"qs_att", c.qs_att},
              {"bag_att", c.bag_att},
              {"aggregation", agg::to_string(c.aggregation)},
              {"bag_dropout", c.bag_dropout},
              {"cls_dropout", c.cls_dropout},
              {"freeze_embeddings", c.freeze_embeddings}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.word_dim = j.at("word_dim").get<int>();
  c.pos_dim = j.at("pos_dim").get<int>();
  c.hidden = j.at("hidden").get<int>();
  c.window = j.at("window").get<int>();
  c.max_len = j.at("max_len").get<int>();
  c.num_relations = j.at("num_relations").get<int>();
  c.qs_att = j.at("qs_att").get<bool>();
  c.bag_att = j.at("bag_att").get<bool>();
  c.aggregation = agg::mode_from_string(j.at("aggregation").get<std::string>());
  c.bag_dropout = j.at("bag_dropout").get<double>();
  c.cls_dropout = j.at("cls_dropout").get<double>();
  c.freeze_embeddings = j.at("freeze_embeddings").get<bool>();
  return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params) {
  json j;
  j["format"] = "gbre-checkpoint";
  j["version"] = 1;
  j["vocab_hash"] = params.vocab_hash;
  j["model"] = config_to_json(params.config);
  json tensors = json::object();
  for (const Param* p : params.all()) tensors[p->name] = tensor_to_json(p->tensor);
  j["params"] = tensors;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << j.dump() << "\n";
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("checkpoint " + path + " is not valid JSON: " + e.what());
  }
  if (j.value("format", "") != "gbre-checkpoint")
    throw DataError("checkpoint " + path + ": unrecognized format");
  if (j.value("version", 0) != 1)
    throw DataError("checkpoint " + path + ": unsupported version");

  ModelParams p;
  p.config = config_from_json(j.at("model"));
  p.vocab_hash = j.at("vocab_hash").get<std::uint64_t>();
  const json& tensors = j.at("params");
  auto read = [&tensors](Param& param, const std::string& name, bool trainable = true) {
    param = Param(tensor_from_json(tensors.at(name)), name, trainable);
  };
  read(p.embeddings, "embeddings", !p.config.freeze_embeddings);
  read(p.w_h, "w_h");
  read(p.pos_head_table, "pos_head_table");
  read(p.pos_tail_table, "pos_tail_table");
  read(p.conv_kernels, "conv_kernels");
  read(p.conv_bias, "conv_bias");
  read(p.att_diag, "att_diag");
  read(p.rel_emb, "rel_emb");
  read(p.cls_w, "cls_w");
  read(p.cls_b, "cls_b");
  return p;
}

void write_history_jsonl(const std::string& path, const std::vector<EpochStats>& history) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write history: " + path);
  for (const EpochStats& e : history) {
    json j{{"epoch", e.epoch}, {"loss", e.loss}};
    if (e.valid_auc >= 0.0) {
      j["valid_auc"] = e.valid_auc;
    } else {
      j["valid_auc"] = nullptr;
    }
    out << j.dump() << "\n";
  }
}

}  // namespace gbre
