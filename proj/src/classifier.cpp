#include "envbal/classifier.hpp"

#include <algorithm>
#include <numeric>

#include "envbal/errors.hpp"
#include "envbal/random.hpp"

namespace envbal {

namespace {

std::vector<int> knn_predict(const Dataset& train, const Dataset& test, int k,
                             int minority) {
  const Index n = train.rows();
  const Index k_eff = std::min<Index>(k, n);

  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(test.rows()));
  std::vector<std::pair<double, Index>> dists(static_cast<std::size_t>(n));
  for (Index q = 0; q < test.rows(); ++q) {
    for (Index i = 0; i < n; ++i) {
      dists[static_cast<std::size_t>(i)] = {
          (train.features.row(i) - test.features.row(q)).squaredNorm(), i};
    }
    std::partial_sort(dists.begin(), dists.begin() + k_eff, dists.end());
    Index votes[2] = {0, 0};
    for (Index i = 0; i < k_eff; ++i) {
      ++votes[train.labels[static_cast<std::size_t>(dists[static_cast<std::size_t>(i)].second)]];
    }
    if (votes[0] == votes[1]) {
      out.push_back(minority);
    } else {
      out.push_back(votes[1] > votes[0] ? 1 : 0);
    }
  }
  return out;
}

std::vector<int> hinge_predict(const Dataset& train, const Dataset& test,
                               const Classifier& clf, int minority) {
  const Index n = train.rows();
  const Index d = train.dims();
  const double lambda = clf.hinge_lambda;

  // Minority maps to +1 so a non-negative score predicts the minority class.
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = train.labels[static_cast<std::size_t>(i)] == minority ? 1.0 : -1.0;
  }

  Vector w = Vector::Zero(d);
  double b = 0.0;
  Rng rng(clf.seed);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));

  long t = 0;
  for (int epoch = 0; epoch < clf.hinge_epochs; ++epoch) {
    rng.shuffle(order);
    for (Index idx : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double margin = y(idx) * (train.features.row(idx).dot(w) + b);
      w *= 1.0 - eta * lambda;
      if (margin < 1.0) {
        w += eta * y(idx) * train.features.row(idx).transpose();
        b += eta * y(idx);
      }
    }
  }

  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(test.rows()));
  for (Index q = 0; q < test.rows(); ++q) {
    const double score = test.features.row(q).dot(w) + b;
    out.push_back(score >= 0.0 ? minority : 1 - minority);
  }
  return out;
}

}  // namespace

Classifier::Kind parse_classifier(const std::string& name) {
  if (name == "knn") return Classifier::Kind::knn;
  if (name == "linear-hinge" || name == "linear_hinge") {
    return Classifier::Kind::linear_hinge;
  }
  throw ConfigError("unknown classifier '" + name + "'");
}

std::string classifier_name(Classifier::Kind kind) {
  return kind == Classifier::Kind::knn ? "knn" : "linear-hinge";
}

std::vector<int> train_predict(const Dataset& train, const Dataset& test,
                               const Classifier& clf) {
  if (train.dims() != test.dims()) {
    throw ConfigError("train_predict: dimension mismatch between train and test");
  }
  if (test.rows() < 1) throw ConfigError("train_predict: empty test set");
  if (clf.knn_k < 1) throw ConfigError("train_predict: knn_k must be at least 1");

  // class_stats also rejects single-class training sets.
  const int minority = class_stats(train).minority_index;
  if (clf.kind == Classifier::Kind::knn) {
    return knn_predict(train, test, clf.knn_k, minority);
  }
  return hinge_predict(train, test, clf, minority);
}

}  // namespace envbal
