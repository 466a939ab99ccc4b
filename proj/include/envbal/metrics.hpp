#pragma once

#include <span>
#include <string>
#include <vector>

#include "envbal/types.hpp"

namespace envbal {

/// Confusion counts with the minority class as the positive class.
struct ConfusionMatrix {
  long tp = 0;
  long fn = 0;
  long fp = 0;
  long tn = 0;
};

/// The six threshold metrics. Every ratio whose denominator is zero is
/// defined as 0, which is what degenerate all-majority classifiers report.
/// `auc` is (sensitivity + specificity) / 2 over hard predictions, i.e.
/// balanced accuracy, not ROC integration.
struct MetricSet {
  double acc = 0;
  double precision = 0;
  double recall = 0;
  double f_measure = 0;
  double auc = 0;
  double g_mean = 0;
};

/// Methods-by-datasets score table; higher scores are better.
struct RankTable {
  std::vector<std::string> methods;
  std::vector<std::string> datasets;
  Matrix scores;  // methods x datasets
};

ConfusionMatrix confusion(std::span<const int> predictions,
                          std::span<const int> truth, int positive);

MetricSet metric_set(const ConfusionMatrix& cm);

/// Intra-class variance of the minority rows (mean over features of the
/// population variance) and inter-class variance (mean over features of the
/// squared gap between the class means).
std::pair<double, double> class_variances(const Matrix& minority,
                                          const Matrix& majority);

/// Per-dataset ranks, 1 = best, ties averaged. Same shape as rt.scores.
Matrix ranks(const RankTable& rt);

Vector mean_rankings(const RankTable& rt);

/// Friedman chi-squared statistic over the rank table and its p-value from
/// the chi-squared distribution with k - 1 degrees of freedom.
std::pair<double, double> friedman(const RankTable& rt);

/// Holm step-down decisions, aligned with the input order. Hypothesis (i) in
/// ascending p order is rejected iff p_(i) <= alpha / (m - i + 1) and all
/// earlier hypotheses were rejected.
std::vector<bool> holm(const std::vector<double>& p_values, double alpha);

/// Upper tail of the chi-squared distribution, accurate to ~1e-12.
double chi_squared_upper_tail(double x, double dof);

}  // namespace envbal
