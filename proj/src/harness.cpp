#include "envbal/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "envbal/errors.hpp"
#include "envbal/random.hpp"
#include "envbal/version.hpp"

namespace envbal {

namespace {

constexpr std::uint64_t kBalanceStream = 0x62616c61;  // "bala"
constexpr std::uint64_t kClassifierStream = 0x636c6673;  // "clfs"

using ordered_json = nlohmann::ordered_json;

MetricSummary summarize(const std::vector<MetricSet>& repeats,
                        double MetricSet::*field) {
  MetricSummary s;
  const auto n = static_cast<double>(repeats.size());
  for (const auto& m : repeats) s.mean += m.*field;
  s.mean /= n;
  double ss = 0.0;
  for (const auto& m : repeats) {
    const double d = m.*field - s.mean;
    ss += d * d;
  }
  s.stddev = std::sqrt(ss / n);
  return s;
}

struct RepeatOutcome {
  MetricSet metrics;
  std::vector<std::pair<double, double>> layer_mmd;
};

enum class FailureKind { none, split, config, generation, other };

struct Failure {
  FailureKind kind = FailureKind::none;
  std::string message;
};

[[noreturn]] void rethrow(const Failure& failure, int repeat) {
  const std::string msg =
      "repeat " + std::to_string(repeat) + " failed: " + failure.message;
  switch (failure.kind) {
    case FailureKind::split: throw SplitError(msg);
    case FailureKind::config: throw ConfigError(msg);
    case FailureKind::generation: throw GenerationError(msg);
    default: throw std::runtime_error(msg);
  }
}

RepeatOutcome run_repeat(const Dataset& ds, const std::optional<BalanceConfig>& cfg,
                         const Classifier& clf, const HoldoutProtocol& proto,
                         int positive, int repeat) {
  const std::uint64_t base =
      mix_seed(proto.master_seed, static_cast<std::uint64_t>(repeat));
  auto [train, test] = stratified_split(ds, proto.train_fraction, base);

  if (proto.normalize) {
    auto [norm_train, scaler] = normalize_minmax(train);
    train = std::move(norm_train);
    test.features = scaler.transform(test.features);
  }

  RepeatOutcome out;
  Dataset train_used = std::move(train);
  if (cfg) {
    BalanceConfig bc = *cfg;
    bc.seed = mix_seed(base, kBalanceStream);
    BalancedDataset balanced = balance(train_used, bc);
    out.layer_mmd = std::move(balanced.layer_mmd);
    train_used = std::move(balanced.dataset);
  }

  Classifier rc = clf;
  rc.seed = mix_seed(base, kClassifierStream);
  const std::vector<int> predictions = train_predict(train_used, test, rc);
  out.metrics = metric_set(confusion(predictions, test.labels, positive));
  return out;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::map<std::string, std::string> echo_config(
    const std::optional<BalanceConfig>& cfg, const Classifier& clf,
    const HoldoutProtocol& proto) {
  std::map<std::string, std::string> echo;
  echo["method"] = cfg ? method_name(cfg->method) : "none";
  if (cfg) {
    echo["seed"] = std::to_string(cfg->seed);
    echo["t"] = format_full(cfg->t);
    echo["layer_cap"] = std::to_string(cfg->layer_cap);
    echo["kernel"] = cfg->kernel.kind == Kernel::Kind::linear ? "linear" : "rbf";
    echo["bandwidth"] = format_full(cfg->kernel.bandwidth);
    echo["m"] = format_full(cfg->fcm.m);
    echo["epsilon"] = format_full(cfg->fcm.epsilon);
    echo["max_iterations"] = std::to_string(cfg->fcm.max_iterations);
    echo["smote_k"] = std::to_string(cfg->smote_k);
    echo["correct_toward_original"] =
        cfg->correct_toward_original ? "true" : "false";
  }
  echo["classifier"] = classifier_name(clf.kind);
  echo["knn_k"] = std::to_string(clf.knn_k);
  echo["hinge_lambda"] = format_full(clf.hinge_lambda);
  echo["hinge_epochs"] = std::to_string(clf.hinge_epochs);
  echo["repeats"] = std::to_string(proto.repeats);
  echo["train_fraction"] = format_full(proto.train_fraction);
  echo["master_seed"] = std::to_string(proto.master_seed);
  echo["normalize"] = proto.normalize ? "true" : "false";
  return echo;
}

}  // namespace

EvaluationReport holdout_evaluate(const Dataset& ds,
                                  const std::optional<BalanceConfig>& cfg,
                                  const Classifier& clf,
                                  const HoldoutProtocol& proto, unsigned threads) {
  if (proto.repeats < 1) throw ConfigError("holdout_evaluate: repeats must be >= 1");
  if (!(proto.train_fraction > 0.0 && proto.train_fraction < 1.0)) {
    throw ConfigError("holdout_evaluate: train fraction must lie in (0, 1)");
  }
  validate(ds);
  const int positive = class_stats(ds).minority_index;

  std::vector<RepeatOutcome> outcomes(static_cast<std::size_t>(proto.repeats));
  std::vector<Failure> failures(static_cast<std::size_t>(proto.repeats));

  auto run_one = [&](int i) {
    auto& failure = failures[static_cast<std::size_t>(i)];
    try {
      outcomes[static_cast<std::size_t>(i)] =
          run_repeat(ds, cfg, clf, proto, positive, i);
    } catch (const SplitError& e) {
      failure = {FailureKind::split, e.what()};
    } catch (const ConfigError& e) {
      failure = {FailureKind::config, e.what()};
    } catch (const GenerationError& e) {
      failure = {FailureKind::generation, e.what()};
    } catch (const std::exception& e) {
      failure = {FailureKind::other, e.what()};
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads,
      static_cast<unsigned>(proto.repeats)));
  if (workers == 1) {
    for (int i = 0; i < proto.repeats; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int i = static_cast<int>(w); i < proto.repeats;
             i += static_cast<int>(workers)) {
          run_one(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (int i = 0; i < proto.repeats; ++i) {
    if (failures[static_cast<std::size_t>(i)].kind != FailureKind::none) {
      rethrow(failures[static_cast<std::size_t>(i)], i);
    }
  }

  EvaluationReport report;
  report.method = cfg ? method_name(cfg->method) : "none";
  report.config = echo_config(cfg, clf, proto);
  for (auto& o : outcomes) {
    report.per_repeat.push_back(o.metrics);
    report.layer_mmd.push_back(std::move(o.layer_mmd));
  }
  report.acc = summarize(report.per_repeat, &MetricSet::acc);
  report.auc = summarize(report.per_repeat, &MetricSet::auc);
  report.f_measure = summarize(report.per_repeat, &MetricSet::f_measure);
  report.g_mean = summarize(report.per_repeat, &MetricSet::g_mean);
  return report;
}

double metric_summary_value(const EvaluationReport& report,
                            const std::string& metric) {
  if (metric == "acc") return report.acc.mean;
  if (metric == "auc") return report.auc.mean;
  if (metric == "f_measure" || metric == "f-measure") return report.f_measure.mean;
  if (metric == "g_mean" || metric == "g-mean") return report.g_mean.mean;
  throw ConfigError("unknown metric '" + metric + "'");
}

ComparisonSummary compare_methods(const std::vector<EvaluationReport>& reports,
                                  const std::string& metric, double alpha) {
  // Group scores by method, keyed on dataset.
  std::vector<std::string> methods;
  std::map<std::string, std::map<std::string, double>> by_method;
  for (const auto& r : reports) {
    if (!by_method.count(r.method)) methods.push_back(r.method);
    auto& slot = by_method[r.method];
    if (slot.count(r.dataset)) {
      throw ConfigError("duplicate report for method '" + r.method +
                        "' on dataset '" + r.dataset + "'");
    }
    slot[r.dataset] = metric_summary_value(r, metric);
  }
  if (methods.size() < 2) {
    throw ConfigError("compare_methods: need at least 2 methods");
  }

  std::vector<std::string> datasets;
  for (const auto& [name, _] : by_method[methods.front()]) datasets.push_back(name);
  if (datasets.size() < 2) {
    throw ConfigError("compare_methods: need at least 2 datasets");
  }
  for (const auto& m : methods) {
    const auto& slot = by_method[m];
    if (slot.size() != datasets.size() ||
        !std::all_of(datasets.begin(), datasets.end(),
                     [&](const std::string& d) { return slot.count(d) > 0; })) {
      throw ConfigError("compare_methods: method '" + m +
                        "' does not cover the same dataset list");
    }
  }

  RankTable rt;
  rt.methods = methods;
  rt.datasets = datasets;
  rt.scores.resize(static_cast<Index>(methods.size()),
                   static_cast<Index>(datasets.size()));
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = 0; j < datasets.size(); ++j) {
      rt.scores(static_cast<Index>(i), static_cast<Index>(j)) =
          by_method[methods[i]][datasets[j]];
    }
  }

  ComparisonSummary summary;
  summary.methods = methods;
  summary.metric = metric;
  summary.alpha = alpha;
  summary.mean_ranks = mean_rankings(rt);
  std::tie(summary.friedman_statistic, summary.friedman_p) = friedman(rt);

  Index best = 0;
  summary.mean_ranks.minCoeff(&best);
  summary.best_method = methods[static_cast<std::size_t>(best)];

  // Post-hoc z-tests against the best-ranked method, Holm-adjusted.
  const double k = static_cast<double>(methods.size());
  const double n = static_cast<double>(datasets.size());
  const double se = std::sqrt(k * (k + 1.0) / (6.0 * n));
  std::vector<double> p_values;
  std::vector<std::string> tested;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (static_cast<Index>(i) == best) continue;
    const double z =
        std::abs(summary.mean_ranks(static_cast<Index>(i)) - summary.mean_ranks(best)) / se;
    p_values.push_back(std::erfc(z / std::sqrt(2.0)));  // two-sided normal tail
    tested.push_back(methods[i]);
  }
  const std::vector<bool> rejected = holm(p_values, alpha);
  for (std::size_t i = 0; i < tested.size(); ++i) {
    summary.versus_best.push_back({tested[i], p_values[i], rejected[i]});
  }
  return summary;
}

std::string serialize_report(const EvaluationReport& report) {
  ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["method"] = report.method;
  j["dataset"] = report.dataset;
  j["config"] = report.config;

  auto summary = [](const MetricSummary& s) {
    return ordered_json{{"mean", s.mean}, {"std", s.stddev}};
  };
  j["metrics"] = ordered_json{{"acc", summary(report.acc)},
                              {"auc", summary(report.auc)},
                              {"f_measure", summary(report.f_measure)},
                              {"g_mean", summary(report.g_mean)}};

  ordered_json repeats = ordered_json::array();
  for (std::size_t i = 0; i < report.per_repeat.size(); ++i) {
    const MetricSet& m = report.per_repeat[i];
    ordered_json r{{"acc", m.acc},       {"precision", m.precision},
                   {"recall", m.recall}, {"f_measure", m.f_measure},
                   {"auc", m.auc},       {"g_mean", m.g_mean}};
    if (i < report.layer_mmd.size() && !report.layer_mmd[i].empty()) {
      ordered_json layers = ordered_json::array();
      for (const auto& [before, after] : report.layer_mmd[i]) {
        layers.push_back(ordered_json{{"before", before}, {"after", after}});
      }
      r["layer_mmd"] = std::move(layers);
    }
    repeats.push_back(std::move(r));
  }
  j["repeats"] = std::move(repeats);
  return j.dump(2) + "\n";
}

EvaluationReport parse_report(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  EvaluationReport report;
  report.method = j.at("method").get<std::string>();
  report.dataset = j.at("dataset").get<std::string>();
  for (const auto& [key, value] : j.at("config").items()) {
    report.config[key] = value.get<std::string>();
  }
  auto read_summary = [&](const char* name) {
    const auto& s = j.at("metrics").at(name);
    return MetricSummary{s.at("mean").get<double>(), s.at("std").get<double>()};
  };
  report.acc = read_summary("acc");
  report.auc = read_summary("auc");
  report.f_measure = read_summary("f_measure");
  report.g_mean = read_summary("g_mean");
  for (const auto& r : j.at("repeats")) {
    MetricSet m;
    m.acc = r.at("acc").get<double>();
    m.precision = r.at("precision").get<double>();
    m.recall = r.at("recall").get<double>();
    m.f_measure = r.at("f_measure").get<double>();
    m.auc = r.at("auc").get<double>();
    m.g_mean = r.at("g_mean").get<double>();
    report.per_repeat.push_back(m);
    std::vector<std::pair<double, double>> layers;
    if (r.contains("layer_mmd")) {
      for (const auto& l : r.at("layer_mmd")) {
        layers.emplace_back(l.at("before").get<double>(),
                            l.at("after").get<double>());
      }
    }
    report.layer_mmd.push_back(std::move(layers));
  }
  return report;
}

void write_report(const EvaluationReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write report '" + path + "'");
  out << serialize_report(report);
}

EvaluationReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open report '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return parse_report(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed report '" + path + "': " + e.what());
  }
}

}  // namespace envbal
