#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "envbal/dataset.hpp"

namespace envbal {

/// Built-in classifiers: brute-force k-NN (vote ties break toward the
/// training minority class) and a linear hinge-loss model trained by seeded
/// stochastic subgradient descent.
struct Classifier {
  enum class Kind { knn, linear_hinge };
  Kind kind = Kind::knn;
  int knn_k = 5;
  double hinge_lambda = 0.01;  // L2 regularization strength
  int hinge_epochs = 50;
  std::uint64_t seed = 0;
};

Classifier::Kind parse_classifier(const std::string& name);
std::string classifier_name(Classifier::Kind kind);

/// Predicted label index (0/1) for every test row.
std::vector<int> train_predict(const Dataset& train, const Dataset& test,
                               const Classifier& clf);

}  // namespace envbal
