#pragma once

#include <cstdint>
#include <string>

#include "envbal/dataset.hpp"
#include "envbal/random.hpp"

namespace envbal::testing {

/// Two Gaussian blobs with unit spread: majority centered at the origin,
/// minority `sep` away along the all-ones direction. Minority rows come
/// first and carry the label "pos".
Dataset make_blobs(Index min_count, Index maj_count, Index dims, double sep,
                   std::uint64_t seed);

/// Benchmark-shaped fixtures (instance/feature/class counts follow the
/// usual KEEL characteristics tables): heart, haberman, vertebral,
/// yeast0359, ecoli4, glass6, blood, blob_ir5, blob_ir10.
Dataset fixture(const std::string& name);

/// Directory for scratch files, created on first use.
std::string temp_dir();

/// Writes the dataset under temp_dir()/<name> and returns the full path.
std::string write_temp_csv(const Dataset& ds, const std::string& name);

/// Writes a KEEL-format file and returns the full path.
std::string write_temp_keel(const Dataset& ds, const std::string& name);

Matrix uniform_matrix(Index rows, Index cols, Rng& rng, double lo = 0.0,
                      double hi = 1.0);

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng, double mean = 0.0,
                       double stddev = 1.0);

}  // namespace envbal::testing
