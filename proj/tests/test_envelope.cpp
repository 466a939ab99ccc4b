#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "envbal/envelope.hpp"
#include "envbal/errors.hpp"
#include "support/fixtures.hpp"

using namespace envbal;
using namespace envbal::testing;

TEST_CASE("plan_layers covers the vertebral-shaped deficit in two layers") {
  const LayerPlan plan = plan_layers(100, 210, 2.0, 9);
  CHECK(plan.cluster_counts == std::vector<Index>{50, 75});
  CHECK(plan.deficit == 110);
  CHECK(plan.shortfall_fill == 0);
  CHECK(plan.total_generated() == 125);
}

TEST_CASE("plan_layers hand iteration for a 50/456 split") {
  // sizes 50, 75, 113, 170, 255, 383 with C_l = ceil(size / 2)
  const LayerPlan plan = plan_layers(50, 456, 2.0, 9);
  CHECK(plan.cluster_counts == std::vector<Index>{25, 38, 57, 85, 128, 192});
  CHECK(plan.layers() == 6);
  CHECK(plan.deficit == 406);
  CHECK(plan.total_generated() == 525);
  CHECK(plan.shortfall_fill == 0);
}

TEST_CASE("plan_layers single layer suffices for a deficit of one") {
  const LayerPlan plan = plan_layers(10, 11, 2.0, 9);
  CHECK(plan.cluster_counts == std::vector<Index>{5});
  CHECK(plan.deficit == 1);
}

TEST_CASE("plan_layers caps the layer count and reports the shortfall") {
  const LayerPlan plan = plan_layers(10, 100, 2.0, 2);
  CHECK(plan.layers() == 2);
  // layers generate 5 + 8 = 13 of the 90 needed
  CHECK(plan.cluster_counts == std::vector<Index>{5, 8});
  CHECK(plan.shortfall_fill == 90 - 13);
}

TEST_CASE("plan_layers clamps cluster counts below the layer input size") {
  const LayerPlan plan = plan_layers(2, 30, 1.1, 9);
  Index size = 2;
  for (Index c : plan.cluster_counts) {
    CHECK(c >= 1);
    CHECK(c < size);
    size += c;
  }
}

TEST_CASE("plan_layers rejects invalid inputs") {
  CHECK_THROWS_AS(plan_layers(10, 10, 2.0, 9), ConfigError);
  CHECK_THROWS_AS(plan_layers(1, 10, 2.0, 9), ConfigError);
  CHECK_THROWS_AS(plan_layers(10, 20, 1.0, 9), ConfigError);
  CHECK_THROWS_AS(plan_layers(10, 20, 2.0, 0), ConfigError);
}

TEST_CASE("layer_step with one cluster finds the square center") {
  Matrix x(4, 2);
  x << 0, 0, 0, 2, 2, 0, 2, 2;
  const PrototypeLayer layer = layer_step(x, 1, {});
  CHECK((layer.prototypes.row(0) - RowVector::Constant(2, 1.0)).cwiseAbs().maxCoeff() <
        1e-10);
  CHECK_THROWS_AS(layer_step(x, 4, {}), ConfigError);
}

TEST_CASE("prototype update on the augmented set equals the split-sum form") {
  Rng rng(67);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 4 + static_cast<Index>(rng.index(12));
    const Index c1 = 1 + static_cast<Index>(rng.index(4));
    const Index c2 = 1 + static_cast<Index>(rng.index(4));
    const Index d = 1 + static_cast<Index>(rng.index(3));
    const Matrix x = uniform_matrix(n, d, rng);
    const Matrix v1 = uniform_matrix(c1, d, rng);

    Matrix augmented(n + c1, d);
    augmented << x, v1;
    const Matrix u = random_memberships(c2, n + c1, rng.next());
    const Matrix via_concat = update_prototypes(augmented, u, 2.0);

    // direct evaluation: separate sums over original rows and layer-1 rows
    for (Index i = 0; i < c2; ++i) {
      RowVector num = RowVector::Zero(d);
      double den = 0.0;
      for (Index k = 0; k < n; ++k) {
        const double w = u(i, k) * u(i, k);
        num += w * x.row(k);
        den += w;
      }
      for (Index j = 0; j < c1; ++j) {
        const double w = u(i, n + j) * u(i, n + j);
        num += w * v1.row(j);
        den += w;
      }
      CHECK((via_concat.row(i) - num / den).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("linear correction removes a pure shift") {
  Rng rng(71);
  const Matrix x = uniform_matrix(9, 2, rng);
  const Matrix v = x.rowwise() + RowVector::Constant(2, 1.0);
  const Matrix corrected = minimize_discrepancy(x, v, Kernel::linear(), {});
  CHECK(mmd_sq(x, corrected, Kernel::linear()).mmd_sq <= 1e-10);
  // relative geometry is untouched
  for (Index i = 1; i < corrected.rows(); ++i) {
    CHECK(((corrected.row(i) - corrected.row(0)) - (v.row(i) - v.row(0)))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("linear correction is a fixed point at matching means") {
  Rng rng(73);
  Matrix v = gaussian_matrix(6, 3, rng);
  v.rowwise() -= v.colwise().mean().eval();  // zero-mean prototypes
  Matrix x = gaussian_matrix(20, 3, rng);
  x.rowwise() -= x.colwise().mean().eval();
  const Matrix corrected = minimize_discrepancy(x, v, Kernel::linear(), {});
  CHECK((corrected - v).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("rbf gradient agrees with central finite differences") {
  Rng rng(79);
  const Matrix x = gaussian_matrix(20, 2, rng);
  const Matrix v = gaussian_matrix(5, 2, rng, 0.4);
  const Kernel k = Kernel::rbf(1.0);
  const Matrix grad = discrepancy_gradient(x, v, k);

  const double h = 1e-6;
  for (Index i = 0; i < v.rows(); ++i) {
    for (Index j = 0; j < v.cols(); ++j) {
      Matrix hi = v, lo = v;
      hi(i, j) += h;
      lo(i, j) -= h;
      const double fd = (mmd_sq(x, hi, k).mmd_sq - mmd_sq(x, lo, k).mmd_sq) / (2.0 * h);
      CHECK(grad(i, j) == doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("rbf correction never increases the discrepancy") {
  Rng rng(83);
  const Matrix x = gaussian_matrix(20, 2, rng);
  const Matrix v = gaussian_matrix(5, 2, rng, 0.8);
  const Kernel k = Kernel::rbf(1.0);
  const double before = mmd_sq(x, v, k).mmd_sq;
  const Matrix corrected = minimize_discrepancy(x, v, k, {});
  const double after = mmd_sq(x, corrected, k).mmd_sq;
  CHECK(after <= before + 1e-12);
  CHECK(after < before);  // this pair starts strictly away from the optimum
}

TEST_CASE("run on two points generates their centroid") {
  Matrix x(2, 2);
  x << 0, 0, 2, 2;
  LayerPlan plan;
  plan.cluster_counts = {1};
  plan.deficit = 1;
  const EnvelopeOutput out = run(x, plan, FcmConfig{}, Kernel::linear());
  REQUIRE(out.generated.rows() == 1);
  CHECK((out.generated.row(0) - RowVector::Constant(2, 1.0)).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("run bookkeeping, growth, and linear-mode discrepancy") {
  Rng rng(89);
  const Matrix x = gaussian_matrix(40, 2, rng);
  const LayerPlan plan = plan_layers(40, 100, 2.0, 9);
  const EnvelopeOutput out = run(x, plan, FcmConfig{}, Kernel::linear());

  CHECK(static_cast<Index>(out.layers.size()) == plan.layers());
  CHECK(out.generated.rows() == plan.total_generated());
  Index offset = 0;
  for (std::size_t l = 0; l < out.layers.size(); ++l) {
    const auto& layer = out.layers[l];
    CHECK(layer.prototypes.rows() == plan.cluster_counts[l]);
    CHECK(layer.mmd_after <= layer.mmd_before + 1e-12);
    CHECK(layer.mmd_after <= 1e-10);
    CHECK((out.generated.middleRows(offset, layer.prototypes.rows()) -
           layer.prototypes)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    offset += layer.prototypes.rows();
  }
}

TEST_CASE("run is bit-identical under one seed") {
  Rng rng(97);
  const Matrix x = gaussian_matrix(25, 3, rng);
  const LayerPlan plan = plan_layers(25, 60, 2.0, 9);
  FcmConfig cfg;
  cfg.seed = 12345;
  const EnvelopeOutput a = run(x, plan, cfg, Kernel::linear());
  const EnvelopeOutput b = run(x, plan, cfg, Kernel::linear());
  CHECK(a.generated == b.generated);
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    CHECK(a.layers[l].mmd_before == b.layers[l].mmd_before);
    CHECK(a.layers[l].mmd_after == b.layers[l].mmd_after);
  }
}

TEST_CASE("skipping the correction leaves layer one shifted by a constant") {
  Rng rng(101);
  const Matrix x = gaussian_matrix(30, 2, rng);
  const LayerPlan plan = plan_layers(30, 70, 2.0, 9);

  EnvelopeConfig corrected;
  corrected.fcm.seed = 5;
  EnvelopeConfig plain = corrected;
  plain.correct = false;

  const EnvelopeOutput with = run(x, plan, corrected);
  const EnvelopeOutput without = run(x, plan, plain);

  const Matrix delta =
      with.layers[0].prototypes - without.layers[0].prototypes;
  CHECK((delta.rowwise() - delta.row(0)).cwiseAbs().maxCoeff() < 1e-12);
  for (const auto& layer : without.layers) {
    CHECK(layer.mmd_after == layer.mmd_before);
  }
}

TEST_CASE("correction toward the original set targets x1 in every layer") {
  Rng rng(103);
  const Matrix x = gaussian_matrix(24, 2, rng);
  const LayerPlan plan = plan_layers(24, 60, 2.0, 9);
  EnvelopeConfig cfg;
  cfg.fcm.seed = 9;
  cfg.correct_toward_original = true;
  const EnvelopeOutput out = run(x, plan, cfg);
  for (const auto& layer : out.layers) {
    CHECK(mmd_sq(x, layer.prototypes, Kernel::linear()).mmd_sq <= 1e-10);
  }
}

TEST_CASE("run rejects a plan that exceeds the input size") {
  Matrix x(3, 2);
  x << 0, 0, 1, 1, 2, 0;
  LayerPlan plan;
  plan.cluster_counts = {3};
  plan.deficit = 3;
  CHECK_THROWS_AS(run(x, plan, FcmConfig{}, Kernel::linear()), GenerationError);
}
