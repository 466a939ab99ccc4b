#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "envbal/dataset.hpp"
#include "envbal/envelope.hpp"
#include "envbal/errors.hpp"
#include "envbal/harness.hpp"
#include "envbal/sampler.hpp"
#include "envbal/version.hpp"

namespace {

using namespace envbal;

struct DatasetFlags {
  std::string format = "auto";  // auto | csv | keel
  std::string label_column;     // name or 0-based index; empty = last column
};

struct SamplerFlags {
  std::string method = "mifc-idmd";
  std::uint64_t seed = 0;
  double t = 2.0;
  int layer_cap = 9;
  std::string kernel = "linear";
  double bandwidth = 0.0;
  double m = 2.0;
  double epsilon = 1e-5;
  int max_iter = 100;
  int smote_k = 5;
  bool toward_original = false;
};

void add_dataset_flags(CLI::App* cmd, DatasetFlags& flags) {
  cmd->add_option("--format", flags.format, "Input format: csv or keel")
      ->check(CLI::IsMember({"auto", "csv", "keel"}));
  cmd->add_option("--label-column", flags.label_column,
                  "Label column name or 0-based index (csv only; default: last)");
}

void add_sampler_flags(CLI::App* cmd, SamplerFlags& flags, bool with_method) {
  if (with_method) {
    cmd->add_option("--method", flags.method,
                    "mifc-idmd | mifcm | smote | random");
  }
  cmd->add_option("--seed", flags.seed, "Seed for all randomized steps");
  cmd->add_option("--t", flags.t, "Layer shrink ratio (> 1)");
  cmd->add_option("--layer-cap", flags.layer_cap, "Maximum number of layers");
  cmd->add_option("--kernel", flags.kernel, "Discrepancy kernel: linear | rbf")
      ->check(CLI::IsMember({"linear", "rbf"}));
  cmd->add_option("--bandwidth", flags.bandwidth,
                  "Rbf bandwidth (0 = median heuristic)");
  cmd->add_option("--m", flags.m, "Fuzzification coefficient (> 1)");
  cmd->add_option("--eps", flags.epsilon, "Objective convergence threshold");
  cmd->add_option("--max-iter", flags.max_iter, "Clustering iteration cap");
  cmd->add_option("--smote-k", flags.smote_k, "SMOTE neighbor count");
  cmd->add_flag("--toward-original", flags.toward_original,
                "Correct every layer toward the original minority set");
}

Dataset load_dataset(const std::string& path, const DatasetFlags& flags) {
  std::string format = flags.format;
  if (format == "auto") {
    const std::string ext = std::filesystem::path(path).extension().string();
    format = (ext == ".dat" || ext == ".keel" || ext == ".arff") ? "keel" : "csv";
  }
  if (format == "keel") return load_keel(path);

  std::optional<LabelColumn> label;
  if (!flags.label_column.empty()) {
    const std::string& s = flags.label_column;
    if (s.find_first_not_of("0123456789") == std::string::npos) {
      label = static_cast<Index>(std::stoll(s));
    } else {
      label = s;
    }
  }
  // "provenance" is this tool's own export column; never treat it as a feature.
  return load_csv(path, label, {"provenance"});
}

BalanceConfig to_balance_config(const SamplerFlags& flags) {
  BalanceConfig cfg;
  cfg.method = parse_method(flags.method);
  cfg.seed = flags.seed;
  cfg.t = flags.t;
  cfg.layer_cap = flags.layer_cap;
  cfg.kernel = flags.kernel == "rbf" ? Kernel::rbf(flags.bandwidth) : Kernel::linear();
  cfg.fcm.m = flags.m;
  cfg.fcm.epsilon = flags.epsilon;
  cfg.fcm.max_iterations = flags.max_iter;
  cfg.smote_k = flags.smote_k;
  cfg.correct_toward_original = flags.toward_original;
  return cfg;
}

void echo_config_line(const std::string& subcommand,
                      const std::map<std::string, std::string>& kv) {
  std::cerr << "config " << subcommand;
  for (const auto& [key, value] : kv) std::cerr << ' ' << key << '=' << value;
  std::cerr << '\n';
}

std::map<std::string, std::string> sampler_echo(const SamplerFlags& flags) {
  return {{"method", flags.method},
          {"seed", std::to_string(flags.seed)},
          {"t", std::to_string(flags.t)},
          {"layer_cap", std::to_string(flags.layer_cap)},
          {"kernel", flags.kernel},
          {"bandwidth", std::to_string(flags.bandwidth)},
          {"m", std::to_string(flags.m)},
          {"eps", std::to_string(flags.epsilon)},
          {"max_iter", std::to_string(flags.max_iter)},
          {"smote_k", std::to_string(flags.smote_k)},
          {"toward_original", flags.toward_original ? "true" : "false"}};
}

int run_inspect(const std::string& path, const DatasetFlags& dflags, double t,
                int layer_cap) {
  const Dataset ds = load_dataset(path, dflags);
  const ClassStats stats = class_stats(ds);
  std::printf("n=%lld d=%lld min=%lld maj=%lld IR=%.2f\n",
              static_cast<long long>(ds.rows()), static_cast<long long>(ds.dims()),
              static_cast<long long>(stats.min_count),
              static_cast<long long>(stats.maj_count), stats.ir);
  if (stats.min_count == stats.maj_count) {
    std::printf("plan none (already balanced)\n");
    return 0;
  }
  const LayerPlan plan = plan_layers(stats.min_count, stats.maj_count, t, layer_cap);
  std::string counts;
  for (std::size_t i = 0; i < plan.cluster_counts.size(); ++i) {
    if (i) counts += ',';
    counts += std::to_string(plan.cluster_counts[i]);
  }
  std::printf("plan L=%lld C=[%s] deficit=%lld shortfall=%lld\n",
              static_cast<long long>(plan.layers()), counts.c_str(),
              static_cast<long long>(plan.deficit),
              static_cast<long long>(plan.shortfall_fill));
  return 0;
}

int run_balance(const std::string& input, const std::string& output,
                const DatasetFlags& dflags, const SamplerFlags& sflags,
                bool provenance, bool raw) {
  echo_config_line("balance", sampler_echo(sflags));
  const Dataset ds = load_dataset(input, dflags);
  const BalanceConfig cfg = to_balance_config(sflags);

  BalancedDataset balanced;
  if (raw) {
    balanced = balance(ds, cfg);
  } else {
    // Generate in normalized space, then map the synthetic rows back so the
    // original rows are written out untouched.
    auto [norm, scaler] = normalize_minmax(ds);
    balanced = balance(norm, cfg);
    const Index extra = balanced.dataset.rows() - ds.rows();
    balanced.dataset.features.topRows(ds.rows()) = ds.features;
    if (extra > 0) {
      balanced.dataset.features.bottomRows(extra) =
          scaler.inverse(balanced.dataset.features.bottomRows(extra));
    }
  }

  if (balanced.already_balanced) {
    std::cerr << "notice: input is already balanced; copied unchanged\n";
  }
  if (cfg.method == Method::mifc_idmd) {
    for (std::size_t l = 0; l < balanced.layer_mmd.size(); ++l) {
      std::printf("layer %zu mmd_before=%.6e mmd_after=%.6e\n", l + 1,
                  balanced.layer_mmd[l].first, balanced.layer_mmd[l].second);
    }
  }

  std::vector<std::string> tags;
  if (provenance) {
    tags.reserve(balanced.provenance.size());
    for (const auto& tag : balanced.provenance) tags.push_back(tag.to_string());
  }
  save_csv(balanced.dataset, output, tags);

  const ClassStats stats = class_stats(balanced.dataset);
  std::printf("wrote %s rows=%lld min=%lld maj=%lld\n", output.c_str(),
              static_cast<long long>(balanced.dataset.rows()),
              static_cast<long long>(stats.min_count),
              static_cast<long long>(stats.maj_count));
  return 0;
}

int run_evaluate(const std::string& input, const DatasetFlags& dflags,
                 const SamplerFlags& sflags, const std::string& classifier,
                 int knn_k, double hinge_lambda, int hinge_epochs, int repeats,
                 double train_fraction, std::uint64_t seed, bool raw,
                 unsigned threads, const std::string& report_path,
                 std::string dataset_name) {
  const Dataset ds = load_dataset(input, dflags);
  if (dataset_name.empty()) {
    dataset_name = std::filesystem::path(input).stem().string();
  }

  std::optional<BalanceConfig> cfg;
  if (sflags.method != "none") cfg = to_balance_config(sflags);

  Classifier clf;
  clf.kind = parse_classifier(classifier);
  clf.knn_k = knn_k;
  clf.hinge_lambda = hinge_lambda;
  clf.hinge_epochs = hinge_epochs;

  HoldoutProtocol proto;
  proto.repeats = repeats;
  proto.train_fraction = train_fraction;
  proto.master_seed = seed;
  proto.normalize = !raw;

  EvaluationReport report = holdout_evaluate(ds, cfg, clf, proto, threads);
  report.dataset = dataset_name;
  echo_config_line("evaluate", report.config);

  std::printf("%-12s %-15s %-15s %-15s %-15s\n", "method", "acc", "auc",
              "f_measure", "g_mean");
  auto cell = [](const MetricSummary& s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f±%.4f", s.mean, s.stddev);
    return std::string(buf);
  };
  std::printf("%-12s %-15s %-15s %-15s %-15s\n", report.method.c_str(),
              cell(report.acc).c_str(), cell(report.auc).c_str(),
              cell(report.f_measure).c_str(), cell(report.g_mean).c_str());

  if (!report_path.empty()) {
    write_report(report, report_path);
    std::fprintf(stderr, "report written to %s\n", report_path.c_str());
  }
  return 0;
}

int run_compare(const std::vector<std::string>& report_paths,
                const std::string& metric, double alpha) {
  std::vector<EvaluationReport> reports;
  reports.reserve(report_paths.size());
  for (const auto& path : report_paths) reports.push_back(read_report(path));

  const ComparisonSummary summary = compare_methods(reports, metric, alpha);
  for (std::size_t i = 0; i < summary.methods.size(); ++i) {
    std::printf("ranking %s %.4f\n", summary.methods[i].c_str(),
                summary.mean_ranks(static_cast<Index>(i)));
  }
  std::printf("friedman statistic=%.6f p=%.6f\n", summary.friedman_statistic,
              summary.friedman_p);
  std::printf("best %s\n", summary.best_method.c_str());
  for (const auto& vs : summary.versus_best) {
    std::printf("holm %s p=%.6f %s\n", vs.method.c_str(), vs.p_value,
                vs.reject ? "reject" : "keep");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Envelope-based rebalancing of binary imbalanced datasets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Summarize a dataset file");
  std::string in_path;
  DatasetFlags in_dflags;
  double in_t = 2.0;
  int in_cap = 9;
  inspect->add_option("file", in_path, "Dataset file")->required();
  add_dataset_flags(inspect, in_dflags);
  inspect->add_option("--t", in_t, "Layer shrink ratio");
  inspect->add_option("--layer-cap", in_cap, "Maximum number of layers");

  // balance
  auto* bal = app.add_subcommand("balance", "Write a balanced copy of a dataset");
  std::string bal_in, bal_out;
  DatasetFlags bal_dflags;
  SamplerFlags bal_sflags;
  bool bal_prov = false, bal_raw = false;
  bal->add_option("input", bal_in, "Dataset file")->required();
  bal->add_option("--out", bal_out, "Output CSV path")->required();
  add_dataset_flags(bal, bal_dflags);
  add_sampler_flags(bal, bal_sflags, true);
  bal->add_flag("--provenance", bal_prov, "Append a provenance column");
  bal->add_flag("--raw", bal_raw, "Generate on raw features (skip normalization)");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Repeated hold-out evaluation");
  std::string ev_in, ev_classifier = "knn", ev_report, ev_name;
  DatasetFlags ev_dflags;
  SamplerFlags ev_sflags;
  int ev_knn_k = 5, ev_hinge_epochs = 50, ev_repeats = 10;
  double ev_hinge_lambda = 0.01, ev_fraction = 0.7;
  unsigned ev_threads = 1;
  bool ev_raw = false;
  ev->add_option("input", ev_in, "Dataset file")->required();
  add_dataset_flags(ev, ev_dflags);
  add_sampler_flags(ev, ev_sflags, true);
  ev->get_option("--method")->description("none | mifc-idmd | mifcm | smote | random");
  ev->add_option("--classifier", ev_classifier, "knn | linear-hinge");
  ev->add_option("--knn-k", ev_knn_k, "Neighbor count for knn");
  ev->add_option("--hinge-lambda", ev_hinge_lambda, "Hinge L2 regularization");
  ev->add_option("--hinge-epochs", ev_hinge_epochs, "Hinge training epochs");
  ev->add_option("--repeats", ev_repeats, "Number of hold-out repeats");
  ev->add_option("--train-fraction", ev_fraction, "Train fraction per repeat");
  ev->add_option("--threads", ev_threads, "Worker threads for repeats");
  ev->add_flag("--raw", ev_raw, "Skip per-split min-max normalization");
  ev->add_option("--report", ev_report, "Write the JSON report here");
  ev->add_option("--name", ev_name, "Dataset name in the report (default: file stem)");

  // compare
  auto* cmp = app.add_subcommand("compare", "Rank reports and test significance");
  std::vector<std::string> cmp_reports;
  std::string cmp_metric = "auc";
  double cmp_alpha = 0.05;
  cmp->add_option("reports", cmp_reports, "Two or more report files")->required();
  cmp->add_option("--metric", cmp_metric, "acc | auc | f_measure | g_mean");
  cmp->add_option("--alpha", cmp_alpha, "Significance level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 3;
  }

  try {
    if (*inspect) return run_inspect(in_path, in_dflags, in_t, in_cap);
    if (*bal) {
      return run_balance(bal_in, bal_out, bal_dflags, bal_sflags, bal_prov, bal_raw);
    }
    if (*ev) {
      return run_evaluate(ev_in, ev_dflags, ev_sflags, ev_classifier, ev_knn_k,
                          ev_hinge_lambda, ev_hinge_epochs, ev_repeats,
                          ev_fraction, ev_sflags.seed, ev_raw, ev_threads,
                          ev_report, ev_name);
    }
    if (*cmp) return run_compare(cmp_reports, cmp_metric, cmp_alpha);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const SplitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
