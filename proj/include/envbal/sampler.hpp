#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "envbal/dataset.hpp"
#include "envbal/envelope.hpp"

namespace envbal {

enum class Method { mifc_idmd, mifcm, smote, random };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct BalanceConfig {
  Method method = Method::mifc_idmd;
  double t = 2.0;
  int layer_cap = 9;
  Kernel kernel;
  FcmConfig fcm;  // fcm.seed is overridden by `seed`
  bool correct_toward_original = false;
  int smote_k = 5;
  std::uint64_t seed = 0;
};

/// Where an output row came from.
struct ProvenanceTag {
  enum class Kind { original, generated, duplicated, interpolated };
  Kind kind = Kind::original;
  int layer = 0;  // 1-based, set for generated rows only

  std::string to_string() const;
};

struct BalancedDataset {
  Dataset dataset;
  std::vector<ProvenanceTag> provenance;
  std::vector<std::pair<double, double>> layer_mmd;  // (before, after), envelope methods only
  bool already_balanced = false;
};

/// Keeps all layers except the last intact and removes surplus prototypes
/// uniformly at random from the final layer. When the capped plan produced
/// fewer instances than the deficit, the gap is filled by duplicating
/// generated instances uniformly at random.
std::pair<Matrix, std::vector<ProvenanceTag>> trim_generated(
    const EnvelopeOutput& layers, Index deficit, std::uint64_t seed);

/// Generates exactly Maj - Min minority instances with the configured method
/// and fuses them with the unmodified input rows. Already-balanced input is
/// returned unchanged with `already_balanced` set.
BalancedDataset balance(const Dataset& ds, const BalanceConfig& cfg);

BalancedDataset random_oversample(const Dataset& ds, std::uint64_t seed);

BalancedDataset smote(const Dataset& ds, int k, std::uint64_t seed);

}  // namespace envbal
