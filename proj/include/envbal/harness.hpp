#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "envbal/classifier.hpp"
#include "envbal/dataset.hpp"
#include "envbal/metrics.hpp"
#include "envbal/sampler.hpp"

namespace envbal {

struct HoldoutProtocol {
  int repeats = 10;
  double train_fraction = 0.7;
  std::uint64_t master_seed = 0;
  bool normalize = true;  // fit a min-max scaler on each train split
};

struct MetricSummary {
  double mean = 0;
  double stddev = 0;  // population standard deviation over repeats
};

struct EvaluationReport {
  std::string method;
  std::string dataset;
  std::vector<MetricSet> per_repeat;
  // Per repeat, per envelope layer: squared discrepancy before/after
  // correction. Empty for non-envelope methods.
  std::vector<std::vector<std::pair<double, double>>> layer_mmd;
  MetricSummary acc, auc, f_measure, g_mean;
  std::map<std::string, std::string> config;  // fully resolved echo
};

struct MethodComparison {
  std::string method;
  double p_value = 1.0;
  bool reject = false;
};

struct ComparisonSummary {
  std::vector<std::string> methods;
  Vector mean_ranks;
  double friedman_statistic = 0;
  double friedman_p = 1.0;
  std::string best_method;
  double alpha = 0.05;
  std::string metric;
  // Post-hoc tests of every other method against the best-ranked one.
  std::vector<MethodComparison> versus_best;
};

/// Repeated stratified hold-out evaluation. Repeat i derives its seeds from
/// mix_seed(master_seed, i), so results are identical no matter how many
/// worker threads execute the repeats. The balance step sees only the train
/// split; the test split stays untouched and imbalanced.
EvaluationReport holdout_evaluate(const Dataset& ds,
                                  const std::optional<BalanceConfig>& cfg,
                                  const Classifier& clf,
                                  const HoldoutProtocol& proto,
                                  unsigned threads = 1);

/// Rank-based comparison across reports covering identical dataset lists.
/// `metric` is one of acc | auc | f_measure | g_mean.
ComparisonSummary compare_methods(const std::vector<EvaluationReport>& reports,
                                  const std::string& metric, double alpha);

double metric_summary_value(const EvaluationReport& report,
                            const std::string& metric);

std::string serialize_report(const EvaluationReport& report);
EvaluationReport parse_report(const std::string& text);
void write_report(const EvaluationReport& report, const std::string& path);
EvaluationReport read_report(const std::string& path);

}  // namespace envbal
