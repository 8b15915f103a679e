#include "gbre/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gbre/errors.hpp"
#include "gbre/rng.hpp"

namespace gbre {

using nlohmann::json;

int RelationSchema::id_of(const std::string& name) const {
  auto it = name_to_id.find(name);
  if (it == name_to_id.end()) throw DataError("unknown relation: " + name);
  return it->second;
}

std::uint64_t EmbeddingTable::vocab_hash() const {
  // FNV-1a over the word list in id order plus the dimension.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const char* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(p[i]);
      h *= 1099511628211ULL;
    }
  };
  for (const auto& w : vocab.id_to_word) {
    mix(w.data(), w.size());
    mix("\n", 1);
  }
  const std::string d = std::to_string(dim);
  mix(d.data(), d.size());
  return h;
}

namespace {

std::vector<std::string> whitespace_tokens(const std::string& text,
                                           std::vector<std::pair<int, int>>* char_spans) {
  std::vector<std::string> tokens;
  int i = 0;
  const int n = static_cast<int>(text.size());
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= n) break;
    int j = i;
    while (j < n && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    tokens.push_back(text.substr(i, j - i));
    if (char_spans) char_spans->emplace_back(i, j);
    i = j;
  }
  return tokens;
}

// Tokens overlapping a character range [begin, end).
TokenSpan chars_to_token_span(const std::vector<std::pair<int, int>>& char_spans, int begin,
                              int end) {
  TokenSpan span{-1, -1};
  for (std::size_t i = 0; i < char_spans.size(); ++i) {
    const auto [cb, ce] = char_spans[i];
    if (ce > begin && cb < end) {
      if (span.begin < 0) span.begin = static_cast<int>(i);
      span.end = static_cast<int>(i) + 1;
    }
  }
  return span;
}

TokenSpan parse_span(const json& pos) {
  if (!pos.is_array() || pos.size() != 2 || !pos[0].is_number_integer() ||
      !pos[1].is_number_integer())
    throw DataError("pos must be an integer pair [begin, end)");
  return TokenSpan{pos[0].get<int>(), pos[1].get<int>()};
}

Instance parse_instance(const std::string& line, const RelationSchema* schema) {
  json rec = json::parse(line);
  if (!rec.is_object()) throw DataError("record is not an object");
  for (const char* field : {"h", "t", "relation"}) {
    if (!rec.contains(field)) throw DataError(std::string("missing field: ") + field);
  }
  if (!rec.contains("text") && !rec.contains("tokens"))
    throw DataError("missing field: text or tokens");

  Instance inst;
  std::vector<std::pair<int, int>> char_spans;
  bool char_offsets = false;
  if (rec.contains("tokens")) {
    for (const auto& t : rec["tokens"]) inst.tokens.push_back(t.get<std::string>());
  } else {
    inst.tokens = whitespace_tokens(rec["text"].get<std::string>(), &char_spans);
    char_offsets = true;
  }
  if (inst.tokens.empty()) throw DataError("empty sentence");

  auto read_entity = [&](const char* field, std::string* name, TokenSpan* span) {
    const json& e = rec[field];
    if (!e.contains("name") || !e.contains("pos"))
      throw DataError(std::string(field) + " needs name and pos");
    *name = e["name"].get<std::string>();
    TokenSpan raw = parse_span(e["pos"]);
    if (char_offsets) {
      *span = chars_to_token_span(char_spans, raw.begin, raw.end);
      if (span->begin < 0)
        throw DataError(std::string(field) + ": character span matches no token");
    } else {
      *span = raw;
    }
    const int n = static_cast<int>(inst.tokens.size());
    if (span->begin < 0 || span->end <= span->begin || span->end > n)
      throw DataError(std::string(field) + ": span out of range");
  };
  read_entity("h", &inst.head_name, &inst.head);
  read_entity("t", &inst.tail_name, &inst.tail);

  if (inst.head.begin < inst.tail.end && inst.tail.begin < inst.head.end)
    throw DataError("head and tail spans overlap");

  inst.relation = rec["relation"].get<std::string>();
  if (inst.relation.empty()) throw DataError("empty relation");
  if (schema && !schema->contains(inst.relation))
    throw DataError("unknown relation: " + inst.relation);

  if (rec.contains("valid") && rec["valid"].is_boolean())
    inst.valid_flag = rec["valid"].get<bool>() ? 1 : 0;
  return inst;
}

}  // namespace

LoadReport load_instances(const std::string& path, const RelationSchema* schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open instances file: " + path);
  LoadReport report;
  std::vector<std::string> fatal;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      report.instances.push_back(parse_instance(line, schema));
    } catch (const json::exception& e) {
      fatal.push_back(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      fatal.push_back(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!fatal.empty()) {
    std::string msg = std::to_string(fatal.size()) + " malformed record(s):";
    for (const auto& f : fatal) msg += "\n  " + f;
    throw DataError(msg);
  }
  if (report.instances.empty())
    report.warnings.push_back(path + ": no instances loaded");
  return report;
}

RelationSchema load_relation_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open relation schema: " + path);
  RelationSchema schema;
  std::string line;
  long line_no = 0;
  std::vector<std::pair<std::string, int>> rows;
  int max_id = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected name<TAB>id");
    const std::string name = line.substr(0, tab);
    int id = 0;
    try {
      id = std::stoi(line.substr(tab + 1));
    } catch (...) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad relation id");
    }
    if (schema.name_to_id.count(name))
      throw DataError(path + ": duplicate relation " + name);
    schema.name_to_id[name] = id;
    rows.emplace_back(name, id);
    max_id = std::max(max_id, id);
  }
  if (rows.empty()) throw DataError(path + ": empty relation schema");
  schema.id_to_name.assign(static_cast<std::size_t>(max_id) + 1, "");
  for (const auto& [name, id] : rows) {
    if (id < 0) throw DataError(path + ": negative relation id for " + name);
    if (!schema.id_to_name[static_cast<std::size_t>(id)].empty())
      throw DataError(path + ": duplicate relation id " + std::to_string(id));
    schema.id_to_name[static_cast<std::size_t>(id)] = name;
  }
  for (std::size_t i = 0; i < schema.id_to_name.size(); ++i) {
    if (schema.id_to_name[i].empty())
      throw DataError(path + ": relation ids not dense, missing " + std::to_string(i));
  }
  auto na = schema.name_to_id.find("NA");
  if (na == schema.name_to_id.end()) throw DataError(path + ": schema must contain relation NA");
  schema.na_id = na->second;
  return schema;
}

EmbeddingTable load_embeddings(const std::string& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file: " + path);
  long count = 0;
  int dim = 0;
  if (!(in >> count >> dim) || count < 1 || dim < 1)
    throw DataError(path + ": bad header, expected \"V d\"");

  EmbeddingTable table;
  table.dim = dim;
  table.vocab.id_to_word = {"<PAD>", "<UNK>"};
  table.matrix = Tensor({static_cast<int>(count) + 2, dim});

  Rng rng(seed);
  for (int j = 0; j < dim; ++j)
    table.matrix.at(Vocabulary::kUnkId, j) = rng.uniform(-0.25, 0.25);

  std::string word;
  for (long i = 0; i < count; ++i) {
    if (!(in >> word)) throw DataError(path + ": fewer rows than header declares");
    const int id = static_cast<int>(table.vocab.id_to_word.size());
    if (table.vocab.word_to_id.count(word)) throw DataError(path + ": duplicate word " + word);
    table.vocab.word_to_id[word] = id;
    table.vocab.id_to_word.push_back(word);
    for (int j = 0; j < dim; ++j) {
      if (!(in >> table.matrix.at(id, j)))
        throw DataError(path + ": truncated vector for word " + word);
    }
  }
  return table;
}

std::vector<Bag> build_bags(const std::vector<Instance>& instances, const RelationSchema& schema,
                            BagMode mode, int max_bag_size) {
  std::vector<Bag> bags;
  std::unordered_map<std::string, std::size_t> index;
  for (const Instance& inst : instances) {
    const std::string key =
        mode == BagMode::train ? inst.pair_key() + "\t" + inst.relation : inst.pair_key();
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, bags.size());
      Bag bag;
      bag.key = key;
      if (mode == BagMode::train) bag.label = schema.id_of(inst.relation);
      bags.push_back(std::move(bag));
      it = index.find(key);
    }
    Bag& bag = bags[it->second];
    const int rel = schema.id_of(inst.relation);
    if (rel != schema.na_id &&
        std::find(bag.gold.begin(), bag.gold.end(), rel) == bag.gold.end())
      bag.gold.push_back(rel);
    if (static_cast<int>(bag.instances.size()) < max_bag_size) bag.instances.push_back(inst);
  }
  for (Bag& bag : bags) std::sort(bag.gold.begin(), bag.gold.end());
  return bags;
}

std::vector<std::string> generate_query(const std::string& e1, const std::string& e2) {
  if (e1.empty() || e2.empty()) throw DataError("generate_query: empty entity name");
  std::string text = "what is the relation between head-entity " + e1 + " and tail-entity " +
                     e2 + " ?";
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return whitespace_tokens(text, nullptr);
}

std::optional<EncodedInstance> encode_instance(const Instance& inst, const Vocabulary& vocab,
                                               int max_len) {
  if (max_len < 3) throw DataError("encode_instance: max_len must be at least 3");
  if (inst.head.begin >= max_len || inst.tail.begin >= max_len)
    return std::nullopt;  // entity truncated away entirely

  EncodedInstance enc;
  enc.length = std::min<int>(static_cast<int>(inst.tokens.size()), max_len);
  enc.ids.assign(static_cast<std::size_t>(max_len), Vocabulary::kPadId);
  for (int l = 0; l < enc.length; ++l)
    enc.ids[static_cast<std::size_t>(l)] = vocab.lookup(inst.tokens[static_cast<std::size_t>(l)]);

  enc.k_head = std::min(inst.head.end, max_len) - 1;
  enc.k_tail = std::min(inst.tail.end, max_len) - 1;

  auto offsets = [max_len](int k) {
    std::vector<int> out(static_cast<std::size_t>(max_len));
    for (int l = 0; l < max_len; ++l) {
      int rel = std::clamp(l - k, -max_len, max_len);
      out[static_cast<std::size_t>(l)] = rel + max_len;
    }
    return out;
  };
  enc.pos_head = offsets(enc.k_head);
  enc.pos_tail = offsets(enc.k_tail);
  return enc;
}

std::optional<EncodedBag> encode_bag(const Bag& bag, const Vocabulary& vocab, int max_len,
                                     std::vector<std::string>* warnings) {
  if (bag.instances.empty()) throw DataError("encode_bag: empty bag " + bag.key);
  EncodedBag enc;
  enc.key = bag.key;
  enc.label = bag.label;
  enc.gold = bag.gold;
  for (std::size_t i = 0; i < bag.instances.size(); ++i) {
    auto one = encode_instance(bag.instances[i], vocab, max_len);
    if (!one) {
      if (warnings)
        warnings->push_back("bag " + bag.key + ": instance " + std::to_string(i) +
                            " dropped, entity span truncated away");
      continue;
    }
    enc.instances.push_back(std::move(*one));
    enc.valid_flags.push_back(bag.instances[i].valid_flag);
  }
  if (enc.instances.empty()) {
    if (warnings) warnings->push_back("bag " + bag.key + ": all instances dropped");
    return std::nullopt;
  }
  const auto query = generate_query(bag.instances[0].head_name, bag.instances[0].tail_name);
  for (const auto& tok : query) enc.query_ids.push_back(vocab.lookup(tok));
  return enc;
}

}  // namespace gbre
