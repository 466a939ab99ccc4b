#include "envbal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "envbal/errors.hpp"

namespace envbal {

namespace {

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

// Regularized lower incomplete gamma P(a, x) by series expansion (x < a + 1).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_squared_upper_tail(double x, double dof) {
  if (x <= 0.0) return 1.0;
  const double a = dof / 2.0;
  const double xs = x / 2.0;
  if (xs < a + 1.0) return 1.0 - gamma_p_series(a, xs);
  return gamma_q_cf(a, xs);
}

ConfusionMatrix confusion(std::span<const int> predictions,
                          std::span<const int> truth, int positive) {
  if (predictions.size() != truth.size() || truth.empty()) {
    throw ConfigError("confusion: prediction/truth lengths must match and be >= 1");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if ((truth[i] != 0 && truth[i] != 1) ||
        (predictions[i] != 0 && predictions[i] != 1)) {
      throw ConfigError("confusion: unknown label at position " + std::to_string(i));
    }
    const bool actual_pos = truth[i] == positive;
    const bool predicted_pos = predictions[i] == positive;
    if (actual_pos && predicted_pos) ++cm.tp;
    else if (actual_pos) ++cm.fn;
    else if (predicted_pos) ++cm.fp;
    else ++cm.tn;
  }
  return cm;
}

MetricSet metric_set(const ConfusionMatrix& cm) {
  const double tp = cm.tp, fn = cm.fn, fp = cm.fp, tn = cm.tn;
  MetricSet m;
  m.acc = ratio(tp + tn, tp + fp + fn + tn);
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f_measure = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  const double sensitivity = m.recall;
  const double specificity = ratio(tn, tn + fp);
  m.auc = (sensitivity + specificity) / 2.0;
  m.g_mean = std::sqrt(sensitivity * specificity);
  return m;
}

std::pair<double, double> class_variances(const Matrix& minority,
                                          const Matrix& majority) {
  if (minority.rows() < 2 || majority.rows() < 1) {
    throw ConfigError("class_variances: minority needs >= 2 rows, majority >= 1");
  }
  if (minority.cols() != majority.cols()) {
    throw ConfigError("class_variances: dimension mismatch");
  }
  const RowVector mu_min = minority.colwise().mean();
  const RowVector mu_maj = majority.colwise().mean();
  const double intra =
      (minority.rowwise() - mu_min).array().square().colwise().mean().mean();
  const double inter = (mu_min - mu_maj).array().square().mean();
  return {intra, inter};
}

Matrix ranks(const RankTable& rt) {
  const Index k = static_cast<Index>(rt.methods.size());
  const Index n = static_cast<Index>(rt.datasets.size());
  if (rt.scores.rows() != k || rt.scores.cols() != n) {
    throw ConfigError("ranks: score matrix shape mismatch");
  }
  Matrix out(k, n);
  for (Index d = 0; d < n; ++d) {
    std::vector<Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return rt.scores(a, d) > rt.scores(b, d);  // higher score ranks first
    });
    Index i = 0;
    while (i < k) {
      Index j = i;
      while (j + 1 < k &&
             rt.scores(order[static_cast<std::size_t>(j + 1)], d) ==
                 rt.scores(order[static_cast<std::size_t>(i)], d)) {
        ++j;
      }
      const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (Index t = i; t <= j; ++t) {
        out(order[static_cast<std::size_t>(t)], d) = avg_rank;
      }
      i = j + 1;
    }
  }
  return out;
}

Vector mean_rankings(const RankTable& rt) { return ranks(rt).rowwise().mean(); }

std::pair<double, double> friedman(const RankTable& rt) {
  const auto k = static_cast<double>(rt.methods.size());
  const auto n = static_cast<double>(rt.datasets.size());
  if (k < 2 || n < 2) {
    throw ConfigError("friedman: need at least 2 methods and 2 datasets");
  }
  const Vector mean_ranks = mean_rankings(rt);
  const double stat =
      12.0 * n / (k * (k + 1.0)) *
      (mean_ranks.squaredNorm() - k * (k + 1.0) * (k + 1.0) / 4.0);
  const double clamped = std::max(0.0, stat);
  return {clamped, chi_squared_upper_tail(clamped, k - 1.0)};
}

std::vector<bool> holm(const std::vector<double>& p_values, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("holm: alpha must lie in [0, 1]");
  }
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("holm: p-values must lie in [0, 1]");
  }
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

  std::vector<bool> reject(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    const double threshold = alpha / static_cast<double>(m - i);
    if (p_values[order[i]] <= threshold) {
      reject[order[i]] = true;
    } else {
      break;  // step-down stops at the first failure
    }
  }
  return reject;
}

}  // namespace envbal
