#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gbre/corpus.hpp"
#include "gbre/model.hpp"

namespace gbre {

// One candidate fact in the held-out ranking: never the NA relation.
struct RankedPrediction {
  std::string bag_key;
  int relation = -1;
  double probability = 0.0;
};

struct PRPoint {
  double precision = 0.0;
  double recall = 0.0;
};

using GoldFacts = std::set<std::pair<std::string, int>>;

// (bag key, relation) pairs from the bags' gold sets; NA never contributes.
GoldFacts gold_facts(const std::vector<EncodedBag>& bags);

// Scores every bag (parallel over bags, parameters frozen), pools all
// (bag, non-NA relation) candidates and sorts by descending probability,
// ties broken by (bag key, relation id).
std::vector<RankedPrediction> rank_predictions(const ModelParams& params,
                                               const std::vector<EncodedBag>& bags, int na_id);

// Walking the ranked list: precision = hits/seen, recall = hits/|golds|.
std::vector<PRPoint> pr_curve(const std::vector<RankedPrediction>& ranked, const GoldFacts& golds);

// Trapezoidal area over recall starting from (0, 1); recall the curve never
// reaches contributes nothing.
double auc(const std::vector<PRPoint>& points);

double precision_at_n(const std::vector<RankedPrediction>& ranked, const GoldFacts& golds, int n);

// Best 2PR/(P+R) along the curve, 0/0 treated as 0.
double best_f1(const std::vector<PRPoint>& points);

struct Metrics {
  double auc_value = 0.0;
  double f1 = 0.0;
  std::map<int, double> p_at;
  double mean_p_at = 0.0;
};
Metrics compute_metrics(const std::vector<RankedPrediction>& ranked, const GoldFacts& golds,
                        const std::vector<int>& p_at_ns);

void write_pr_csv(const std::string& path, const std::vector<RankedPrediction>& ranked,
                  const GoldFacts& golds);
void write_metrics_json(const std::string& path, const Metrics& metrics);

}  // namespace gbre
