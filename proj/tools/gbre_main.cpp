#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gbre/commands.hpp"
#include "gbre/errors.hpp"
#include "gbre/kernels.hpp"

namespace {

struct CliArgs {
  std::string preset = "synthetic";
  std::string config_file;
  gbre::RunConfig overrides;  // only fields with a counted flag apply
};

void add_common_options(CLI::App* cmd, gbre::RunConfig& c, std::string& preset,
                        std::string& config_file) {
  cmd->add_option("--preset", preset, "dataset preset: biorel, tbga, nyt, synthetic");
  cmd->add_option("--config", config_file, "flat JSON config file");
  cmd->add_option("--seed", c.seed, "run seed");
  cmd->add_option("--out-dir", c.out_dir, "output directory");
  cmd->add_option("--train", c.train_path, "training instances (jsonl)");
  cmd->add_option("--valid", c.valid_path, "validation instances (jsonl)");
  cmd->add_option("--test", c.test_path, "test instances (jsonl)");
  cmd->add_option("--embeddings", c.embeddings_path, "embeddings file");
  cmd->add_option("--relations", c.relations_path, "relation schema (tsv)");
  cmd->add_option("--checkpoint", c.checkpoint_path, "checkpoint file");
  cmd->add_flag("--no-qs-att", "disable query-sentence attention");
  cmd->add_flag("--no-bag-att", "disable sentence-bag self-attention");
  cmd->add_option("--agg", c.aggregation, "bag aggregation: att, one, ave")
      ->check(CLI::IsMember({"att", "one", "ave"}));
  cmd->add_flag("--dump-attention", c.dump_attention,
                "write per-bag alpha/beta attention to attention.jsonl");
  cmd->add_option("--lr", c.learning_rate, "learning rate");
  cmd->add_option("--batch-size", c.batch_size, "bags per SGD step");
  cmd->add_option("--epochs", c.epochs, "maximum training epochs");
  cmd->add_option("--patience", c.patience, "early-stop patience (validation AUC)");
  cmd->add_option("--max-len", c.max_len, "sentence length cap");
  cmd->add_option("--max-bag-size", c.max_bag_size, "instances kept per bag");
  cmd->add_flag("--freeze-embeddings", c.freeze_embeddings, "do not fine-tune word vectors");
  cmd->add_flag("--serial", "run dense kernels on the serial backend");
}

// preset defaults, then config file, then explicit flags
gbre::RunConfig resolve(CLI::App* cmd, const gbre::RunConfig& parsed, const std::string& preset,
                        const std::string& config_file) {
  gbre::RunConfig c = gbre::preset_config(preset);
  if (!config_file.empty()) gbre::apply_config_file(c, config_file);

  auto took = [cmd](const char* name) { return cmd->count(name) > 0; };
  if (took("--seed")) c.seed = parsed.seed;
  if (took("--out-dir")) c.out_dir = parsed.out_dir;
  if (took("--train")) c.train_path = parsed.train_path;
  if (took("--valid")) c.valid_path = parsed.valid_path;
  if (took("--test")) c.test_path = parsed.test_path;
  if (took("--embeddings")) c.embeddings_path = parsed.embeddings_path;
  if (took("--relations")) c.relations_path = parsed.relations_path;
  if (took("--checkpoint")) c.checkpoint_path = parsed.checkpoint_path;
  if (took("--no-qs-att")) c.qs_att = false;
  if (took("--no-bag-att")) c.bag_att = false;
  if (took("--agg")) c.aggregation = parsed.aggregation;
  if (took("--dump-attention")) c.dump_attention = true;
  if (took("--lr")) c.learning_rate = parsed.learning_rate;
  if (took("--batch-size")) c.batch_size = parsed.batch_size;
  if (took("--epochs")) c.epochs = parsed.epochs;
  if (took("--patience")) c.patience = parsed.patience;
  if (took("--max-len")) c.max_len = parsed.max_len;
  if (took("--max-bag-size")) c.max_bag_size = parsed.max_bag_size;
  if (took("--freeze-embeddings")) c.freeze_embeddings = true;
  if (took("--serial")) gbre::kernels::set_backend(gbre::kernels::Backend::serial);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GBRE: graph-based distantly-supervised relation extraction"};
  app.require_subcommand(1);

  std::string preset = "synthetic", config_file;
  gbre::RunConfig parsed;

  CLI::App* train = app.add_subcommand("train", "train a model");
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint (PR curve, AUC, P@N)");
  CLI::App* predict = app.add_subcommand("predict", "score bags with a checkpoint");
  for (CLI::App* cmd : {train, eval, predict})
    add_common_options(cmd, parsed, preset, config_file);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  gbre::SynthSpec spec;
  std::string synth_out = "synth";
  synth->add_option("--out-dir", synth_out, "output directory");
  synth->add_option("--seed", spec.seed, "generator seed");
  synth->add_option("--relations", spec.num_relations, "number of actual relations");
  synth->add_option("--vocab", spec.vocab_size, "vocabulary size");
  synth->add_option("--dim", spec.embedding_dim, "embedding dimension");
  synth->add_option("--train-bags", spec.train_bags, "training bags");
  synth->add_option("--valid-bags", spec.valid_bags, "validation bags");
  synth->add_option("--test-bags", spec.test_bags, "test bags");
  synth->add_option("--bag-min", spec.bag_min, "minimum bag size");
  synth->add_option("--bag-max", spec.bag_max, "maximum bag size");
  synth->add_option("--noise", spec.noise_rate, "per-sentence noise rate");
  synth->add_flag("!--no-correlated-noise", spec.correlated_noise,
                  "disable bag-shared background tokens");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      gbre::cmd_synth(spec, synth_out);
    } else {
      CLI::App* active = train->parsed() ? train : eval->parsed() ? eval : predict;
      const gbre::RunConfig config = resolve(active, parsed, preset, config_file);
      if (train->parsed()) gbre::cmd_train(config);
      if (eval->parsed()) gbre::cmd_eval(config);
      if (predict->parsed()) gbre::cmd_predict(config);
    }
  } catch (const gbre::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const gbre::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const gbre::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
