#include "gbre/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "gbre/corpus.hpp"
#include "gbre/errors.hpp"
#include "gbre/evaluation.hpp"

namespace gbre {

namespace {

using nlohmann::json;

void report_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<EncodedBag> load_and_encode(const std::string& path, const RelationSchema& schema,
                                        const Vocabulary& vocab, BagMode mode, int max_len,
                                        int max_bag_size) {
  LoadReport report = load_instances(path, &schema);
  report_warnings(report.warnings);
  const auto bags = build_bags(report.instances, schema, mode, max_bag_size);
  std::vector<EncodedBag> encoded;
  std::vector<std::string> warnings;
  encoded.reserve(bags.size());
  for (const Bag& bag : bags) {
    if (auto enc = encode_bag(bag, vocab, max_len, &warnings)) encoded.push_back(std::move(*enc));
  }
  report_warnings(warnings);
  if (encoded.empty()) throw DataError(path + ": no usable bags");
  return encoded;
}

void require_paths(const RunConfig& c, bool need_train, bool need_test, bool need_checkpoint) {
  if (need_train && c.train_path.empty()) throw UsageError("missing --train instances file");
  if (need_test && c.test_path.empty()) throw UsageError("missing --test instances file");
  if (need_checkpoint && c.checkpoint_path.empty()) throw UsageError("missing --checkpoint file");
  if (c.embeddings_path.empty()) throw UsageError("missing --embeddings file");
  if (c.relations_path.empty()) throw UsageError("missing --relations file");
}

}  // namespace

void cmd_train(const RunConfig& config) {
  require_paths(config, /*train=*/true, /*test=*/false, /*checkpoint=*/false);
  std::filesystem::create_directories(config.out_dir);

  const RelationSchema schema = load_relation_schema(config.relations_path);
  const EmbeddingTable table = load_embeddings(config.embeddings_path, config.seed);
  if (table.dim != config.word_dim)
    throw DataError("embeddings are " + std::to_string(table.dim) +
                    "-dimensional but the configuration says word_size=" +
                    std::to_string(config.word_dim));

  const auto train_bags = load_and_encode(config.train_path, schema, table.vocab, BagMode::train,
                                          config.max_len, config.max_bag_size);
  std::vector<EncodedBag> valid_bags;
  if (!config.valid_path.empty())
    valid_bags = load_and_encode(config.valid_path, schema, table.vocab, BagMode::eval,
                                 config.max_len, config.max_bag_size);

  ModelParams params = init_params(config.model_config(schema.size()), table, config.seed);
  const TrainResult result =
      train(config.train_config(), params, train_bags, valid_bags, schema.na_id);

  save_checkpoint(config.out_dir + "/checkpoint.json", params);
  write_history_jsonl(config.out_dir + "/history.jsonl", result.history);
  write_config_snapshot(config, config.out_dir + "/config.json");
  std::cerr << "trained " << result.history.size() << " epoch(s)";
  if (result.best_valid_auc >= 0.0)
    std::cerr << ", best valid AUC " << result.best_valid_auc << " at epoch " << result.best_epoch;
  std::cerr << "\n";
}

namespace {

struct EvalSetup {
  ModelParams params;
  RelationSchema schema;
  std::vector<EncodedBag> bags;
};

EvalSetup load_eval_setup(const RunConfig& config) {
  EvalSetup s{load_checkpoint(config.checkpoint_path), load_relation_schema(config.relations_path), {}};
  const EmbeddingTable table = load_embeddings(config.embeddings_path, config.seed);
  if (table.vocab_hash() != s.params.vocab_hash)
    throw DataError("checkpoint was trained with a different vocabulary than " +
                    config.embeddings_path);
  if (s.schema.size() != s.params.config.num_relations)
    throw DataError("relation schema size does not match the checkpoint");
  s.bags = load_and_encode(config.test_path, s.schema, table.vocab, BagMode::eval,
                           s.params.config.max_len, config.max_bag_size);
  return s;
}

}  // namespace

void cmd_eval(const RunConfig& config) {
  require_paths(config, /*train=*/false, /*test=*/true, /*checkpoint=*/true);
  std::filesystem::create_directories(config.out_dir);
  EvalSetup s = load_eval_setup(config);

  const auto ranked = rank_predictions(s.params, s.bags, s.schema.na_id);
  const GoldFacts golds = gold_facts(s.bags);
  const Metrics metrics = compute_metrics(ranked, golds, config.p_at);
  write_metrics_json(config.out_dir + "/metrics.json", metrics);
  write_pr_csv(config.out_dir + "/pr_curve.csv", ranked, golds);
  write_config_snapshot(config, config.out_dir + "/eval_config.json");

  if (config.dump_attention) {
    std::ofstream out(config.out_dir + "/attention.jsonl");
    if (!out) throw DataError("cannot write attention.jsonl");
    for (const EncodedBag& bag : s.bags) {
      const BagScores scores = score_bag(s.params, bag);
      int pred = 0;
      for (std::size_t r = 1; r < scores.probability.size(); ++r)
        if (scores.probability[r] > scores.probability[static_cast<std::size_t>(pred)])
          pred = static_cast<int>(r);
      json rec{{"bag", bag.key},
               {"pred", s.schema.name_of(pred)},
               {"prob", scores.probability[static_cast<std::size_t>(pred)]}};
      json gold_names = json::array();
      for (int g : bag.gold) gold_names.push_back(s.schema.name_of(g));
      rec["gold"] = gold_names;
      if (!scores.alpha.empty()) rec["alpha"] = scores.alpha;
      if (!scores.beta.empty()) {
        rec["beta"] = scores.beta[static_cast<std::size_t>(pred)];
        json by_gold = json::object();
        for (int g : bag.gold) by_gold[s.schema.name_of(g)] = scores.beta[static_cast<std::size_t>(g)];
        rec["beta_gold"] = by_gold;
      }
      out << rec.dump() << "\n";
    }
  }
  std::cout << "auc " << metrics.auc_value << " f1 " << metrics.f1 << "\n";
}

void cmd_predict(const RunConfig& config) {
  require_paths(config, /*train=*/false, /*test=*/true, /*checkpoint=*/true);
  std::filesystem::create_directories(config.out_dir);
  EvalSetup s = load_eval_setup(config);

  std::ofstream out(config.out_dir + "/predictions.jsonl");
  if (!out) throw DataError("cannot write predictions.jsonl");
  for (const EncodedBag& bag : s.bags) {
    const BagScores scores = score_bag(s.params, bag);
    int pred = 0;
    json by_name = json::object();
    for (std::size_t r = 0; r < scores.probability.size(); ++r) {
      by_name[s.schema.name_of(static_cast<int>(r))] = scores.probability[r];
      if (scores.probability[r] > scores.probability[static_cast<std::size_t>(pred)])
        pred = static_cast<int>(r);
    }
    out << json{{"bag", bag.key},
                {"pred", s.schema.name_of(pred)},
                {"prob", scores.probability[static_cast<std::size_t>(pred)]},
                {"scores", by_name}}
               .dump()
        << "\n";
  }
}

void cmd_synth(const SynthSpec& spec, const std::string& out_dir) {
  generate_synthetic(spec, out_dir);
  std::cerr << "wrote synthetic corpus to " << out_dir << "\n";
}

}  // namespace gbre
