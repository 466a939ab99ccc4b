#pragma once

#include <cstdint>
#include <vector>

#include "envbal/fcm.hpp"
#include "envbal/mmd.hpp"
#include "envbal/types.hpp"

namespace envbal {

/// Per-layer cluster counts for the envelope network. Layer l clusters the
/// augmented set X^l (original minority rows plus all previously generated
/// prototypes) into C_l = ceil(|X^l| / t) clusters, stopping once the
/// cumulative count covers the class deficit or the layer cap is reached.
struct LayerPlan {
  std::vector<Index> cluster_counts;
  double t = 2.0;
  int layer_cap = 9;
  Index deficit = 0;
  Index shortfall_fill = 0;  // > 0 only when the capped plan under-generates

  Index layers() const { return static_cast<Index>(cluster_counts.size()); }
  Index total_generated() const;
};

/// One envelope layer: converged prototypes plus the squared discrepancy
/// against the layer's correction target before and after correction.
struct PrototypeLayer {
  Matrix prototypes;
  double mmd_before = 0.0;
  double mmd_after = 0.0;
};

struct EnvelopeOutput {
  std::vector<PrototypeLayer> layers;
  Matrix generated;  // all layer prototypes stacked in layer order
};

/// Gradient-descent settings for the rbf discrepancy correction. The linear
/// kernel has a closed-form minimizer and ignores these.
struct CorrectionConfig {
  double step = 0.01;
  int max_steps = 50;
  double rel_tol = 1e-6;
};

struct EnvelopeConfig {
  FcmConfig fcm;
  Kernel kernel;
  bool correct = true;                  // false runs the plain multilayer fit
  bool correct_toward_original = false; // correct against X^1 instead of X^l
  CorrectionConfig correction;
};

LayerPlan plan_layers(Index min_count, Index maj_count, double t, int layer_cap);

/// One envelope layer: a fuzzy c-means fit over the augmented set.
PrototypeLayer layer_step(const Matrix& x_l, Index c_l, const FcmConfig& config);

/// Moves prototypes to cut the squared discrepancy against `target`. Linear
/// kernel: translate all prototypes by the mean gap, the exact minimizer
/// within the translation family (relative geometry unchanged). Rbf kernel:
/// monotone gradient descent on the discrepancy; steps that would increase
/// it are halved away.
Matrix minimize_discrepancy(const Matrix& target, const Matrix& prototypes,
                            const Kernel& kernel, const CorrectionConfig& config);

/// Gradient of the squared rbf discrepancy with respect to each prototype
/// row. The kernel bandwidth must already be resolved.
Matrix discrepancy_gradient(const Matrix& target, const Matrix& prototypes,
                            const Kernel& kernel);

/// Runs the full envelope network over the minority rows. Layer l fits on
/// the augmented set with seed = config.fcm.seed xor l, corrects its
/// prototypes, then feeds them back into the augmented set.
EnvelopeOutput run(const Matrix& x_min, const LayerPlan& plan,
                   const EnvelopeConfig& config);

EnvelopeOutput run(const Matrix& x_min, const LayerPlan& plan,
                   const FcmConfig& fcm_config, const Kernel& kernel);

}  // namespace envbal
