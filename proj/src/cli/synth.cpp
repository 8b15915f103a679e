#include "gbre/synth.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include <json.hpp>

#include "gbre/errors.hpp"
#include "gbre/rng.hpp"

namespace gbre {

namespace {

using nlohmann::json;

struct SynthWorld {
  std::vector<std::string> words;                    // full vocabulary
  std::vector<std::vector<std::string>> triggers;    // per relation
  std::vector<std::string> entities;
  std::vector<std::string> fillers;
};

SynthWorld build_world(const SynthSpec& spec) {
  SynthWorld w;
  const std::vector<std::string> query_words = {"what", "is",         "the", "relation",
                                                "between", "head-entity", "and", "tail-entity",
                                                "?"};
  const int trigger_count = spec.num_relations * spec.triggers_per_relation;
  const int remaining = spec.vocab_size - static_cast<int>(query_words.size()) - trigger_count;
  if (remaining < 20)
    throw UsageError("synth: vocab_size too small for " + std::to_string(spec.num_relations) +
                     " relations");
  const int entity_count = remaining * 3 / 5;
  const int filler_count = remaining - entity_count;

  w.words = query_words;
  w.triggers.resize(static_cast<std::size_t>(spec.num_relations));
  for (int r = 0; r < spec.num_relations; ++r) {
    for (int j = 0; j < spec.triggers_per_relation; ++j) {
      std::string tok = "trig" + std::to_string(r + 1) + "_" + std::to_string(j);
      w.triggers[static_cast<std::size_t>(r)].push_back(tok);
      w.words.push_back(std::move(tok));
    }
  }
  for (int i = 0; i < entity_count; ++i) {
    w.entities.push_back("ent" + std::to_string(i));
    w.words.push_back(w.entities.back());
  }
  for (int i = 0; i < filler_count; ++i) {
    w.fillers.push_back("w" + std::to_string(i));
    w.words.push_back(w.fillers.back());
  }
  return w;
}

struct Sentence {
  std::vector<std::string> tokens;
  int head = 0;
  int tail = 0;
  bool valid = false;
};

// The sentence relation is carried by one trigger token that repeats: once
// right after the head entity and once or twice more elsewhere. Scattered
// single-occurrence triggers of other relations act as word-level noise, so
// the true signal is the token's multiplicity, not its mere presence.
Sentence make_sentence(const SynthWorld& w, int relation, bool valid,
                       const std::string& head, const std::string& tail,
                       const std::vector<std::string>& shared, int num_relations, Rng& rng) {
  const auto& fillers = w.fillers;
  auto filler = [&]() { return fillers[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(fillers.size())))]; };

  int trigger_rel = relation;
  if (!valid) {
    trigger_rel = rng.uniform_int(num_relations - 1);
    if (trigger_rel >= relation) ++trigger_rel;  // any relation but the bag's
  }
  const auto& trig = w.triggers[static_cast<std::size_t>(trigger_rel)];
  const std::string trigger = trig[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(trig.size())))];

  Sentence s;
  s.valid = valid;
  const int lead = 1 + rng.uniform_int(3);
  for (int i = 0; i < lead; ++i) s.tokens.push_back(filler());
  s.head = static_cast<int>(s.tokens.size());
  s.tokens.push_back(head);
  if (rng.uniform() < 0.3) s.tokens.push_back(filler());
  s.tokens.push_back(trigger);
  const int mid = rng.uniform_int(2);
  for (int i = 0; i < mid; ++i) s.tokens.push_back(filler());
  s.tail = static_cast<int>(s.tokens.size());
  s.tokens.push_back(tail);
  const int trail = 2 + rng.uniform_int(3);
  for (int i = 0; i < trail; ++i) s.tokens.push_back(filler());

  auto insert_at_random = [&](const std::string& tok) {
    const int pos = rng.uniform_int(static_cast<int>(s.tokens.size()) + 1);
    s.tokens.insert(s.tokens.begin() + pos, tok);
    if (pos <= s.head) ++s.head;
    if (pos <= s.tail) ++s.tail;
  };

  for (int i = 0; i < 2; ++i) insert_at_random(trigger);
  for (int i = 0; i < 3; ++i) {
    int other = rng.uniform_int(num_relations - 1);
    if (other >= trigger_rel) ++other;
    const auto& pool = w.triggers[static_cast<std::size_t>(other)];
    insert_at_random(pool[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size())))]);
  }
  for (const std::string& tok : shared) insert_at_random(tok);
  return s;
}

void write_split(const std::string& path, const SynthSpec& spec, const SynthWorld& w,
                 int bag_count, std::set<std::pair<int, int>>& used_pairs, Rng& rng) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  const int num_entities = static_cast<int>(w.entities.size());
  for (int b = 0; b < bag_count; ++b) {
    int hi = 0, ti = 0;
    do {
      hi = rng.uniform_int(num_entities);
      ti = rng.uniform_int(num_entities);
    } while (hi == ti || used_pairs.count({hi, ti}));
    used_pairs.insert({hi, ti});
    const std::string& head = w.entities[static_cast<std::size_t>(hi)];
    const std::string& tail = w.entities[static_cast<std::size_t>(ti)];

    const int relation = rng.uniform_int(spec.num_relations);
    const int size = spec.bag_min + rng.uniform_int(spec.bag_max - spec.bag_min + 1);

    std::vector<std::string> shared;
    if (spec.correlated_noise) {
      for (int i = 0; i < 2; ++i)
        shared.push_back(
            w.fillers[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(w.fillers.size())))]);
    }

    for (int i = 0; i < size; ++i) {
      const bool valid = rng.uniform() >= spec.noise_rate;
      Sentence s = make_sentence(w, relation, valid, head, tail, shared, spec.num_relations, rng);
      json rec{{"tokens", s.tokens},
               {"h", json{{"name", head}, {"pos", {s.head, s.head + 1}}}},
               {"t", json{{"name", tail}, {"pos", {s.tail, s.tail + 1}}}},
               {"relation", "rel" + std::to_string(relation + 1)},
               {"valid", s.valid}};
      out << rec.dump() << "\n";
    }
  }
}

}  // namespace

void generate_synthetic(const SynthSpec& spec, const std::string& out_dir) {
  if (spec.num_relations < 2) throw UsageError("synth: need at least 2 relations");
  if (spec.bag_min < 1 || spec.bag_max < spec.bag_min)
    throw UsageError("synth: bad bag size range");
  if (spec.noise_rate < 0.0 || spec.noise_rate > 1.0)
    throw UsageError("synth: noise_rate must lie in [0,1]");
  std::filesystem::create_directories(out_dir);
  const SynthWorld w = build_world(spec);

  Rng master(spec.seed);
  Rng emb_rng = master.fork(1);
  Rng train_rng = master.fork(2);
  Rng valid_rng = master.fork(3);
  Rng test_rng = master.fork(4);

  {
    std::ofstream out(out_dir + "/relations.tsv");
    if (!out) throw DataError("cannot write relations.tsv");
    out << "NA\t0\n";
    for (int r = 0; r < spec.num_relations; ++r)
      out << "rel" << (r + 1) << "\t" << (r + 1) << "\n";
  }
  {
    std::ofstream out(out_dir + "/embeddings.txt");
    if (!out) throw DataError("cannot write embeddings.txt");
    out << w.words.size() << " " << spec.embedding_dim << "\n";
    char buf[48];
    for (const std::string& word : w.words) {
      out << word;
      for (int j = 0; j < spec.embedding_dim; ++j) {
        std::snprintf(buf, sizeof(buf), " %.8f", emb_rng.uniform(-0.5, 0.5));
        out << buf;
      }
      out << "\n";
    }
  }

  std::set<std::pair<int, int>> used_pairs;
  write_split(out_dir + "/train.jsonl", spec, w, spec.train_bags, used_pairs, train_rng);
  write_split(out_dir + "/valid.jsonl", spec, w, spec.valid_bags, used_pairs, valid_rng);
  write_split(out_dir + "/test.jsonl", spec, w, spec.test_bags, used_pairs, test_rng);

  json echo{{"num_relations", spec.num_relations},
            {"vocab_size", spec.vocab_size},
            {"embedding_dim", spec.embedding_dim},
            {"train_bags", spec.train_bags},
            {"valid_bags", spec.valid_bags},
            {"test_bags", spec.test_bags},
            {"bag_min", spec.bag_min},
            {"bag_max", spec.bag_max},
            {"noise_rate", spec.noise_rate},
            {"correlated_noise", spec.correlated_noise},
            {"triggers_per_relation", spec.triggers_per_relation},
            {"seed", spec.seed}};
  std::ofstream out(out_dir + "/synth_spec.json");
  if (!out) throw DataError("cannot write synth_spec.json");
  out << echo.dump(2) << "\n";
}

}  // namespace gbre
