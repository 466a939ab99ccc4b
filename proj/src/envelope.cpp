#include "envbal/envelope.hpp"

#include <cmath>
#include <numeric>

#include "envbal/errors.hpp"

namespace envbal {

Index LayerPlan::total_generated() const {
  return std::accumulate(cluster_counts.begin(), cluster_counts.end(), Index(0));
}

LayerPlan plan_layers(Index min_count, Index maj_count, double t, int layer_cap) {
  if (min_count < 2) throw ConfigError("plan_layers: need at least 2 minority instances");
  if (maj_count <= min_count) {
    throw ConfigError("plan_layers: majority count must exceed minority count");
  }
  if (!(t > 1.0)) throw ConfigError("plan_layers: t must exceed 1");
  if (layer_cap < 1) throw ConfigError("plan_layers: layer cap must be at least 1");

  LayerPlan plan;
  plan.t = t;
  plan.layer_cap = layer_cap;
  plan.deficit = maj_count - min_count;

  Index input_size = min_count;
  Index cumulative = 0;
  for (int l = 0; l < layer_cap && cumulative < plan.deficit; ++l) {
    Index c = static_cast<Index>(std::ceil(static_cast<double>(input_size) / t));
    c = std::min(c, input_size - 1);
    plan.cluster_counts.push_back(c);
    cumulative += c;
    input_size += c;
  }
  plan.shortfall_fill = std::max(Index(0), plan.deficit - cumulative);
  return plan;
}

PrototypeLayer layer_step(const Matrix& x_l, Index c_l, const FcmConfig& config) {
  if (c_l >= x_l.rows()) {
    throw ConfigError("layer_step: cluster count must stay below the input size");
  }
  PrototypeLayer layer;
  layer.prototypes = fit(x_l, c_l, config).prototypes;
  return layer;
}

Matrix discrepancy_gradient(const Matrix& target, const Matrix& v,
                            const Kernel& kernel) {
  if (kernel.kind != Kernel::Kind::rbf || kernel.bandwidth <= 0.0) {
    throw std::invalid_argument(
        "discrepancy_gradient: needs an rbf kernel with a resolved bandwidth");
  }
  const Index n = target.rows();
  const Index c = v.rows();
  const double sigma2 = kernel.bandwidth * kernel.bandwidth;
  const Matrix k_xv = gram(target, v, kernel);  // n x c
  const Matrix k_vv = gram(v, v, kernel);       // c x c

  Matrix grad = Matrix::Zero(c, v.cols());
  for (Index r = 0; r < c; ++r) {
    RowVector cross = RowVector::Zero(v.cols());
    for (Index k = 0; k < n; ++k) {
      cross += k_xv(k, r) * (target.row(k) - v.row(r));
    }
    RowVector self = RowVector::Zero(v.cols());
    for (Index j = 0; j < c; ++j) {
      self += k_vv(r, j) * (v.row(j) - v.row(r));
    }
    grad.row(r) = (-2.0 / (static_cast<double>(n) * static_cast<double>(c))) * cross / sigma2 +
                  (2.0 / (static_cast<double>(c) * static_cast<double>(c))) * self / sigma2;
  }
  return grad;
}

Matrix minimize_discrepancy(const Matrix& target, const Matrix& prototypes,
                            const Kernel& kernel, const CorrectionConfig& config) {
  if (target.cols() != prototypes.cols()) {
    throw std::invalid_argument("minimize_discrepancy: dimension mismatch");
  }

  if (kernel.kind == Kernel::Kind::linear) {
    const RowVector shift =
        target.colwise().mean() - prototypes.colwise().mean();
    return prototypes.rowwise() + shift;
  }

  const Kernel rk = resolve_kernel(kernel, target, prototypes);
  Matrix v = prototypes;
  double current = mmd_sq(target, v, rk).mmd_sq;
  double step = config.step;
  for (int it = 0; it < config.max_steps; ++it) {
    if (current == 0.0 || step < 1e-12) break;
    const Matrix grad = discrepancy_gradient(target, v, rk);
    const Matrix candidate = v - step * grad;
    const double next = mmd_sq(target, candidate, rk).mmd_sq;
    if (next > current) {
      step *= 0.5;
      continue;
    }
    const double improvement = (current - next) / std::max(current, 1e-300);
    v = candidate;
    current = next;
    if (improvement < config.rel_tol) break;
  }
  return v;
}

EnvelopeOutput run(const Matrix& x_min, const LayerPlan& plan,
                   const EnvelopeConfig& config) {
  if (plan.layers() < 1) throw GenerationError("run: empty layer plan");
  if (x_min.rows() < 2) throw GenerationError("run: need at least 2 minority rows");

  EnvelopeOutput out;
  out.generated.resize(plan.total_generated(), x_min.cols());

  Matrix augmented = x_min;
  Index written = 0;
  for (Index l = 0; l < plan.layers(); ++l) {
    const Index c_l = plan.cluster_counts[static_cast<std::size_t>(l)];
    if (c_l >= augmented.rows()) {
      throw GenerationError("run: layer plan inconsistent with input size");
    }
    FcmConfig layer_cfg = config.fcm;
    layer_cfg.seed = config.fcm.seed ^ static_cast<std::uint64_t>(l + 1);

    PrototypeLayer layer = layer_step(augmented, c_l, layer_cfg);

    const Matrix& target = config.correct_toward_original ? x_min : augmented;
    const Kernel kernel = resolve_kernel(config.kernel, target, layer.prototypes);
    layer.mmd_before = mmd_sq(target, layer.prototypes, kernel).mmd_sq;
    if (config.correct) {
      layer.prototypes =
          minimize_discrepancy(target, layer.prototypes, kernel, config.correction);
      layer.mmd_after = mmd_sq(target, layer.prototypes, kernel).mmd_sq;
    } else {
      layer.mmd_after = layer.mmd_before;
    }

    out.generated.middleRows(written, c_l) = layer.prototypes;
    written += c_l;

    Matrix next(augmented.rows() + c_l, augmented.cols());
    next << augmented, layer.prototypes;
    augmented = std::move(next);

    out.layers.push_back(std::move(layer));
  }
  return out;
}

EnvelopeOutput run(const Matrix& x_min, const LayerPlan& plan,
                   const FcmConfig& fcm_config, const Kernel& kernel) {
  EnvelopeConfig cfg;
  cfg.fcm = fcm_config;
  cfg.kernel = kernel;
  return run(x_min, plan, cfg);
}

}  // namespace envbal
