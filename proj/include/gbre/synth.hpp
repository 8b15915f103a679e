#pragma once

#include <cstdint>
#include <string>

namespace gbre {

// Planted-signal corpus for desk-scale experiments. Each actual relation
// owns a few trigger tokens; a valid sentence mentions its bag's entity pair
// with the bag relation's triggers next to the entities, a noisy sentence
// carries triggers of some other relation instead (every instance still
// inherits the bag label, which is exactly the distant-supervision noise).
// The correlated-noise option plants a couple of bag-specific background
// tokens into all of a bag's sentences so sentences of one bag stay more
// similar to each other than to strangers.
struct SynthSpec {
  int num_relations = 8;  // actual relations; NA is appended to the schema
  int vocab_size = 200;
  int embedding_dim = 16;
  int train_bags = 2000;
  int valid_bags = 300;
  int test_bags = 500;
  int bag_min = 2;
  int bag_max = 6;
  double noise_rate = 0.4;
  bool correlated_noise = true;
  int triggers_per_relation = 3;
  std::uint64_t seed = 42;
};

// Writes train.jsonl, valid.jsonl, test.jsonl, relations.tsv,
// embeddings.txt and synth_spec.json into out_dir. Fully deterministic in
// spec.seed. Instances carry a "valid" field with the planted ground truth.
void generate_synthetic(const SynthSpec& spec, const std::string& out_dir);

}  // namespace gbre
