#include "gbre/evaluation.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "gbre/errors.hpp"

namespace gbre {

GoldFacts gold_facts(const std::vector<EncodedBag>& bags) {
  GoldFacts golds;
  for (const EncodedBag& bag : bags)
    for (int rel : bag.gold) golds.emplace(bag.key, rel);
  return golds;
}

std::vector<RankedPrediction> rank_predictions(const ModelParams& params,
                                               const std::vector<EncodedBag>& bags, int na_id) {
  const int n = static_cast<int>(bags.size());
  std::vector<BagScores> scores(static_cast<std::size_t>(n));
  // bags are independent and the parameters are frozen; each pass uses its
  // own tape
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i)
    scores[static_cast<std::size_t>(i)] = score_bag(params, bags[static_cast<std::size_t>(i)]);

  std::vector<RankedPrediction> ranked;
  ranked.reserve(static_cast<std::size_t>(n) * (params.config.num_relations - 1));
  for (int i = 0; i < n; ++i) {
    const EncodedBag& bag = bags[static_cast<std::size_t>(i)];
    const auto& prob = scores[static_cast<std::size_t>(i)].probability;
    for (int r = 0; r < static_cast<int>(prob.size()); ++r) {
      if (r == na_id) continue;
      ranked.push_back({bag.key, r, prob[static_cast<std::size_t>(r)]});
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedPrediction& a, const RankedPrediction& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    if (a.bag_key != b.bag_key) return a.bag_key < b.bag_key;
    return a.relation < b.relation;
  });
  return ranked;
}

std::vector<PRPoint> pr_curve(const std::vector<RankedPrediction>& ranked, const GoldFacts& golds) {
  if (golds.empty()) throw DataError("pr_curve: no gold facts");
  std::vector<PRPoint> points;
  points.reserve(ranked.size());
  long hits = 0, seen = 0;
  for (const RankedPrediction& p : ranked) {
    ++seen;
    if (golds.count({p.bag_key, p.relation})) ++hits;
    points.push_back({static_cast<double>(hits) / static_cast<double>(seen),
                      static_cast<double>(hits) / static_cast<double>(golds.size())});
  }
  return points;
}

double auc(const std::vector<PRPoint>& points) {
  if (points.empty()) throw DataError("auc: empty curve");
  double area = 0.0;
  double prev_recall = 0.0, prev_precision = 1.0;
  for (const PRPoint& p : points) {
    area += (p.recall - prev_recall) * (p.precision + prev_precision) / 2.0;
    prev_recall = p.recall;
    prev_precision = p.precision;
  }
  return area;
}

double precision_at_n(const std::vector<RankedPrediction>& ranked, const GoldFacts& golds, int n) {
  if (n <= 0) throw DataError("precision_at_n: N must be positive");
  if (n > static_cast<int>(ranked.size()))
    throw DataError("precision_at_n: N=" + std::to_string(n) + " exceeds ranked list size " +
                    std::to_string(ranked.size()));
  long hits = 0;
  for (int i = 0; i < n; ++i) {
    const RankedPrediction& p = ranked[static_cast<std::size_t>(i)];
    if (golds.count({p.bag_key, p.relation})) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

double best_f1(const std::vector<PRPoint>& points) {
  double best = 0.0;
  for (const PRPoint& p : points) {
    const double denom = p.precision + p.recall;
    if (denom > 0.0) best = std::max(best, 2.0 * p.precision * p.recall / denom);
  }
  return best;
}

Metrics compute_metrics(const std::vector<RankedPrediction>& ranked, const GoldFacts& golds,
                        const std::vector<int>& p_at_ns) {
  Metrics m;
  const auto points = pr_curve(ranked, golds);
  m.auc_value = auc(points);
  m.f1 = best_f1(points);
  double sum = 0.0;
  for (int n : p_at_ns) {
    m.p_at[n] = precision_at_n(ranked, golds, n);
    sum += m.p_at[n];
  }
  m.mean_p_at = p_at_ns.empty() ? 0.0 : sum / static_cast<double>(p_at_ns.size());
  return m;
}

void write_pr_csv(const std::string& path, const std::vector<RankedPrediction>& ranked,
                  const GoldFacts& golds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "rank,precision,recall,probability\n";
  const auto points = pr_curve(ranked, golds);
  char buf[160];
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i + 1, points[i].precision,
                  points[i].recall, ranked[i].probability);
    out << buf;
  }
}

void write_metrics_json(const std::string& path, const Metrics& metrics) {
  nlohmann::json p_at = nlohmann::json::object();
  for (const auto& [n, v] : metrics.p_at) p_at[std::to_string(n)] = v;
  nlohmann::json j{{"auc", metrics.auc_value},
                   {"f1", metrics.f1},
                   {"p_at", p_at},
                   {"mean_p_at", metrics.mean_p_at}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace gbre
