#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gbre/tensor.hpp"

namespace gbre {

// Half-open token range [begin, end).
struct TokenSpan {
  int begin = 0;
  int end = 0;
  int length() const { return end - begin; }
};

// One sentence mention of an entity pair.
struct Instance {
  std::vector<std::string> tokens;
  std::string head_name, tail_name;
  TokenSpan head, tail;
  std::string relation;
  // Ground-truth sentence validity when the source file carries it
  // (synthetic corpora do); -1 when unknown.
  int valid_flag = -1;

  std::string pair_key() const { return head_name + "\t" + tail_name; }
};

enum class BagMode { train, eval };

struct Bag {
  std::string key;
  std::vector<Instance> instances;
  int label = -1;          // relation id, train mode
  std::vector<int> gold;   // distinct non-NA relation ids (eval: all seen for the pair)
};

struct RelationSchema {
  std::unordered_map<std::string, int> name_to_id;
  std::vector<std::string> id_to_name;
  int na_id = -1;

  int size() const { return static_cast<int>(id_to_name.size()); }
  bool contains(const std::string& name) const { return name_to_id.count(name) > 0; }
  int id_of(const std::string& name) const;
  const std::string& name_of(int id) const { return id_to_name.at(static_cast<std::size_t>(id)); }
};

struct Vocabulary {
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;

  std::unordered_map<std::string, int> word_to_id;
  std::vector<std::string> id_to_word;  // aligned with embedding rows

  int size() const { return static_cast<int>(id_to_word.size()); }
  int lookup(const std::string& word) const {
    auto it = word_to_id.find(word);
    return it == word_to_id.end() ? kUnkId : it->second;
  }
};

struct EmbeddingTable {
  Vocabulary vocab;
  int dim = 0;
  Tensor matrix;  // vocab.size() x dim; PAD row all zeros

  // Hash over the word list and dimension, stored in checkpoints so a model
  // is never evaluated against a different vocabulary.
  std::uint64_t vocab_hash() const;
};

// Instances file: one JSON object per line with fields
//   {"text": "..."} or {"tokens": [...]},
//   "h": {"name": ..., "pos": [begin, end)}, "t": {...}, "relation": ...
// pos is a token range with "tokens" and a character range with "text"
// (mapped to the overlapping tokens after whitespace tokenization).
struct LoadReport {
  std::vector<Instance> instances;
  std::vector<std::string> warnings;
};
LoadReport load_instances(const std::string& path, const RelationSchema* schema);

RelationSchema load_relation_schema(const std::string& path);  // "name<TAB>id" lines

// Embeddings file: header "V d", then "word v1 ... v_d" per line. PAD and
// UNK rows are prepended; UNK is drawn uniform(-0.25, 0.25) from `seed`.
EmbeddingTable load_embeddings(const std::string& path, std::uint64_t seed);

// Train mode groups by (pair, relation), eval mode by pair, both keeping
// first-appearance key order and input order inside a bag. Bags longer than
// max_bag_size keep their earliest instances.
std::vector<Bag> build_bags(const std::vector<Instance>& instances, const RelationSchema& schema,
                            BagMode mode, int max_bag_size);

// "what is the relation between head-entity <e1> and tail-entity <e2> ?",
// lowercased and whitespace-tokenized after substitution.
std::vector<std::string> generate_query(const std::string& e1, const std::string& e2);

struct EncodedInstance {
  std::vector<int> ids;       // padded/truncated to max_len
  std::vector<int> pos_head;  // shifted relative offsets to the head entity
  std::vector<int> pos_tail;
  int k_head = 0;  // last token index of each span after truncation
  int k_tail = 0;
  int length = 0;  // count of non-PAD positions
};

// Returns nothing when an entity span is truncated away entirely; the caller
// drops the instance and keeps the warning.
std::optional<EncodedInstance> encode_instance(const Instance& inst, const Vocabulary& vocab,
                                               int max_len);

struct EncodedBag {
  std::string key;
  int label = -1;
  std::vector<int> gold;
  std::vector<EncodedInstance> instances;
  std::vector<int> query_ids;
  std::vector<int> valid_flags;  // per kept instance, -1 when unknown
};

// Encodes every instance of a bag plus the shared pair query. Returns
// nothing when all instances were dropped.
std::optional<EncodedBag> encode_bag(const Bag& bag, const Vocabulary& vocab, int max_len,
                                     std::vector<std::string>* warnings);

}  // namespace gbre
