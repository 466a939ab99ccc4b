#include "envbal/fcm.hpp"

#include "envbal/errors.hpp"
#include "envbal/random.hpp"

namespace envbal {

Matrix random_memberships(Index c, Index n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix u(c, n);
  for (Index k = 0; k < n; ++k) {
    double total = 0.0;
    for (Index i = 0; i < c; ++i) {
      u(i, k) = rng.uniform();
      total += u(i, k);
    }
    if (total <= 0.0) {
      u.col(k).setConstant(1.0 / static_cast<double>(c));
    } else {
      u.col(k) /= total;
    }
  }
  return u;
}

FcmResult fit(const Matrix& x, Index c, const FcmConfig& config) {
  if (x.rows() < 2) throw ConfigError("fit: need at least 2 points");
  if (c < 1 || c > x.rows()) {
    throw ConfigError("fit: cluster count must satisfy 1 <= c <= n");
  }
  if (!(config.m > 1.0)) throw ConfigError("fit: m must exceed 1");
  if (!(config.epsilon > 0.0)) throw ConfigError("fit: epsilon must be positive");
  if (config.max_iterations < 1) {
    throw ConfigError("fit: max_iterations must be at least 1");
  }

  FcmResult result;
  result.memberships = random_memberships(c, x.rows(), config.seed);
  for (int w = 0; w < config.max_iterations; ++w) {
    result.prototypes = update_prototypes(x, result.memberships, config.m);
    result.memberships = update_memberships(x, result.prototypes, config.m);
    const double j = objective(x, result.memberships, result.prototypes, config.m);
    result.iterations_used = w + 1;
    if (!result.objective_trace.empty() &&
        std::abs(j - result.objective_trace.back()) < config.epsilon) {
      result.objective_trace.push_back(j);
      result.converged = true;
      break;
    }
    result.objective_trace.push_back(j);
  }
  return result;
}

}  // namespace envbal
