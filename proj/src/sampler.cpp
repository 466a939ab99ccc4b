#include "envbal/sampler.hpp"

#include <algorithm>
#include <numeric>

#include "envbal/errors.hpp"
#include "envbal/random.hpp"

namespace envbal {

namespace {

constexpr std::uint64_t kTrimStream = 0x7472696d;    // "trim"
constexpr std::uint64_t kSmoteStream = 0x736d6f74;   // "smot"
constexpr std::uint64_t kRandomStream = 0x72616e64;  // "rand"

BalancedDataset fuse(const Dataset& ds, const Matrix& synthetic, int minority,
                     std::vector<ProvenanceTag> synthetic_tags) {
  BalancedDataset out;
  out.dataset.feature_names = ds.feature_names;
  out.dataset.class_names = ds.class_names;
  out.dataset.label_name = ds.label_name;

  const Index n = ds.rows();
  const Index extra = synthetic.rows();
  out.dataset.features.resize(n + extra, ds.dims());
  out.dataset.features.topRows(n) = ds.features;
  out.dataset.features.bottomRows(extra) = synthetic;

  out.dataset.labels = ds.labels;
  out.dataset.labels.insert(out.dataset.labels.end(),
                            static_cast<std::size_t>(extra), minority);

  out.provenance.assign(static_cast<std::size_t>(n), ProvenanceTag{});
  out.provenance.insert(out.provenance.end(), synthetic_tags.begin(),
                        synthetic_tags.end());
  return out;
}

std::vector<Index> minority_indices(const Dataset& ds, int minority) {
  std::vector<Index> idx;
  for (Index i = 0; i < ds.rows(); ++i) {
    if (ds.labels[static_cast<std::size_t>(i)] == minority) idx.push_back(i);
  }
  return idx;
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "mifc-idmd" || name == "mifc_idmd") return Method::mifc_idmd;
  if (name == "mifcm") return Method::mifcm;
  if (name == "smote") return Method::smote;
  if (name == "random") return Method::random;
  throw ConfigError("unknown method '" + name + "'");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::mifc_idmd: return "mifc-idmd";
    case Method::mifcm: return "mifcm";
    case Method::smote: return "smote";
    case Method::random: return "random";
  }
  return "unknown";
}

std::string ProvenanceTag::to_string() const {
  switch (kind) {
    case Kind::original: return "original";
    case Kind::generated: return "generated:layer_" + std::to_string(layer);
    case Kind::duplicated: return "duplicated";
    case Kind::interpolated: return "interpolated";
  }
  return "unknown";
}

std::pair<Matrix, std::vector<ProvenanceTag>> trim_generated(
    const EnvelopeOutput& layers, Index deficit, std::uint64_t seed) {
  const Index total = layers.generated.rows();
  if (total == 0 && deficit > 0) {
    throw GenerationError("trim_generated: no generated instances to draw from");
  }

  Rng rng(seed);
  Matrix kept(deficit, layers.generated.cols());
  std::vector<ProvenanceTag> tags;
  tags.reserve(static_cast<std::size_t>(deficit));

  // Layer tags for every generated row, in stacking order.
  std::vector<int> layer_of(static_cast<std::size_t>(total));
  {
    Index row = 0;
    for (std::size_t l = 0; l < layers.layers.size(); ++l) {
      const Index c = layers.layers[l].prototypes.rows();
      for (Index i = 0; i < c; ++i) {
        layer_of[static_cast<std::size_t>(row++)] = static_cast<int>(l) + 1;
      }
    }
  }

  if (total <= deficit) {
    kept.topRows(total) = layers.generated;
    for (Index i = 0; i < total; ++i) {
      tags.push_back({ProvenanceTag::Kind::generated,
                      layer_of[static_cast<std::size_t>(i)]});
    }
    for (Index i = total; i < deficit; ++i) {
      const Index src = static_cast<Index>(rng.index(static_cast<std::uint64_t>(total)));
      kept.row(i) = layers.generated.row(src);
      tags.push_back({ProvenanceTag::Kind::duplicated, 0});
    }
    return {std::move(kept), std::move(tags)};
  }

  // Surplus: earlier layers stay whole, the final layer is subsampled.
  const Index last_c = layers.layers.back().prototypes.rows();
  const Index head = total - last_c;
  if (head > deficit) {
    throw GenerationError("trim_generated: surplus exceeds final layer size");
  }
  const Index keep_last = deficit - head;

  std::vector<Index> last_idx(static_cast<std::size_t>(last_c));
  std::iota(last_idx.begin(), last_idx.end(), Index(0));
  rng.shuffle(last_idx);
  last_idx.resize(static_cast<std::size_t>(keep_last));
  std::sort(last_idx.begin(), last_idx.end());

  kept.topRows(head) = layers.generated.topRows(head);
  for (Index i = 0; i < head; ++i) {
    tags.push_back({ProvenanceTag::Kind::generated,
                    layer_of[static_cast<std::size_t>(i)]});
  }
  for (Index i = 0; i < keep_last; ++i) {
    kept.row(head + i) = layers.generated.row(head + last_idx[static_cast<std::size_t>(i)]);
    tags.push_back({ProvenanceTag::Kind::generated,
                    static_cast<int>(layers.layers.size())});
  }
  return {std::move(kept), std::move(tags)};
}

BalancedDataset balance(const Dataset& ds, const BalanceConfig& cfg) {
  const ClassStats stats = class_stats(ds);
  if (stats.min_count == stats.maj_count) {
    BalancedDataset out;
    out.dataset = ds;
    out.provenance.assign(static_cast<std::size_t>(ds.rows()), ProvenanceTag{});
    out.already_balanced = true;
    return out;
  }

  switch (cfg.method) {
    case Method::random:
      return random_oversample(ds, cfg.seed);
    case Method::smote:
      return smote(ds, cfg.smote_k, cfg.seed);
    case Method::mifc_idmd:
    case Method::mifcm:
      break;
  }

  if (stats.min_count < 2) {
    throw ConfigError("balance: " + method_name(cfg.method) +
                      " needs at least 2 minority instances");
  }

  const Matrix x_min = rows_of_class(ds, stats.minority_index);
  const LayerPlan plan =
      plan_layers(stats.min_count, stats.maj_count, cfg.t, cfg.layer_cap);

  EnvelopeConfig env;
  env.fcm = cfg.fcm;
  env.fcm.seed = cfg.seed;
  env.kernel = cfg.kernel;
  env.correct = cfg.method == Method::mifc_idmd;
  env.correct_toward_original = cfg.correct_toward_original;
  const EnvelopeOutput generated = run(x_min, plan, env);

  auto [rows, tags] =
      trim_generated(generated, plan.deficit, mix_seed(cfg.seed, kTrimStream));

  BalancedDataset out = fuse(ds, rows, stats.minority_index, std::move(tags));
  for (const auto& layer : generated.layers) {
    out.layer_mmd.emplace_back(layer.mmd_before, layer.mmd_after);
  }
  return out;
}

BalancedDataset random_oversample(const Dataset& ds, std::uint64_t seed) {
  const ClassStats stats = class_stats(ds);
  if (stats.min_count == stats.maj_count) {
    BalancedDataset out;
    out.dataset = ds;
    out.provenance.assign(static_cast<std::size_t>(ds.rows()), ProvenanceTag{});
    out.already_balanced = true;
    return out;
  }

  const std::vector<Index> pool = minority_indices(ds, stats.minority_index);
  const Index deficit = stats.maj_count - stats.min_count;

  Rng rng(mix_seed(seed, kRandomStream));
  Matrix synthetic(deficit, ds.dims());
  for (Index i = 0; i < deficit; ++i) {
    const Index src = pool[rng.index(pool.size())];
    synthetic.row(i) = ds.features.row(src);
  }
  return fuse(ds, synthetic, stats.minority_index,
              std::vector<ProvenanceTag>(static_cast<std::size_t>(deficit),
                                         {ProvenanceTag::Kind::duplicated, 0}));
}

BalancedDataset smote(const Dataset& ds, int k, std::uint64_t seed) {
  if (k < 1) throw ConfigError("smote: k must be at least 1");
  const ClassStats stats = class_stats(ds);
  if (stats.min_count < 2) {
    throw ConfigError("smote: needs at least 2 minority instances");
  }
  if (stats.min_count == stats.maj_count) {
    BalancedDataset out;
    out.dataset = ds;
    out.provenance.assign(static_cast<std::size_t>(ds.rows()), ProvenanceTag{});
    out.already_balanced = true;
    return out;
  }

  const std::vector<Index> pool = minority_indices(ds, stats.minority_index);
  const Index min_n = static_cast<Index>(pool.size());
  const Index k_eff = std::min<Index>(k, min_n - 1);
  const Index deficit = stats.maj_count - stats.min_count;

  // k nearest minority neighbors per minority row; distance ties break
  // toward the lower row index.
  std::vector<std::vector<Index>> neighbors(static_cast<std::size_t>(min_n));
  for (Index i = 0; i < min_n; ++i) {
    std::vector<std::pair<double, Index>> dists;
    dists.reserve(static_cast<std::size_t>(min_n - 1));
    for (Index j = 0; j < min_n; ++j) {
      if (j == i) continue;
      const double d2 =
          (ds.features.row(pool[i]) - ds.features.row(pool[j])).squaredNorm();
      dists.emplace_back(d2, j);
    }
    std::sort(dists.begin(), dists.end());
    auto& nn = neighbors[static_cast<std::size_t>(i)];
    for (Index j = 0; j < k_eff; ++j) nn.push_back(dists[static_cast<std::size_t>(j)].second);
  }

  Rng rng(mix_seed(seed, kSmoteStream));
  Matrix synthetic(deficit, ds.dims());
  for (Index s = 0; s < deficit; ++s) {
    const Index i = static_cast<Index>(rng.index(static_cast<std::uint64_t>(min_n)));
    const auto& nn = neighbors[static_cast<std::size_t>(i)];
    const Index j = nn[rng.index(nn.size())];
    const double delta = rng.uniform();
    synthetic.row(s) =
        ds.features.row(pool[i]) +
        delta * (ds.features.row(pool[j]) - ds.features.row(pool[i]));
  }
  return fuse(ds, synthetic, stats.minority_index,
              std::vector<ProvenanceTag>(static_cast<std::size_t>(deficit),
                                         {ProvenanceTag::Kind::interpolated, 0}));
}

}  // namespace envbal
