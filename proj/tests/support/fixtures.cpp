#include "support/fixtures.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace envbal::testing {

Dataset make_blobs(Index min_count, Index maj_count, Index dims, double sep,
                   std::uint64_t seed) {
  Rng rng(seed);
  const double offset = sep / std::sqrt(static_cast<double>(dims));

  Dataset ds;
  ds.features.resize(min_count + maj_count, dims);
  ds.labels.resize(static_cast<std::size_t>(min_count + maj_count));
  for (Index i = 0; i < min_count + maj_count; ++i) {
    const bool minority = i < min_count;
    for (Index j = 0; j < dims; ++j) {
      ds.features(i, j) = rng.gaussian() + (minority ? offset : 0.0);
    }
    ds.labels[static_cast<std::size_t>(i)] = minority ? 1 : 0;
  }
  ds.class_names = {"neg", "pos"};
  ds.label_name = "class";
  for (Index j = 0; j < dims; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  return ds;
}

Dataset fixture(const std::string& name) {
  // counts: minority, majority, features
  if (name == "heart") return make_blobs(120, 150, 13, 2.2, 0xae01);
  if (name == "haberman") return make_blobs(81, 225, 3, 1.8, 0xae02);
  if (name == "vertebral") return make_blobs(100, 210, 6, 2.0, 0xae03);
  if (name == "yeast0359") return make_blobs(50, 456, 8, 2.0, 0xae04);
  if (name == "ecoli4") return make_blobs(20, 316, 7, 2.2, 0xae05);
  if (name == "glass6") return make_blobs(29, 185, 9, 2.2, 0xae06);
  if (name == "blood") return make_blobs(178, 570, 4, 1.2, 0xae07);
  if (name == "blob_ir5") return make_blobs(100, 500, 5, 2.0, 0xae08);
  if (name == "blob_ir10") return make_blobs(55, 550, 5, 2.0, 0xae09);
  throw std::invalid_argument("unknown fixture '" + name + "'");
}

std::string temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "envbal_tests";
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string write_temp_csv(const Dataset& ds, const std::string& name) {
  const std::string path = temp_dir() + "/" + name;
  save_csv(ds, path);
  return path;
}

std::string write_temp_keel(const Dataset& ds, const std::string& name) {
  const std::string path = temp_dir() + "/" + name;
  std::ofstream out(path);
  out << "@relation " << name << "\n";
  for (Index j = 0; j < ds.dims(); ++j) {
    out << "@attribute " << ds.feature_names[static_cast<std::size_t>(j)]
        << " real [" << ds.features.col(j).minCoeff() << ", "
        << ds.features.col(j).maxCoeff() << "]\n";
  }
  out << "@attribute " << ds.label_name << " {" << ds.class_names[0] << ", "
      << ds.class_names[1] << "}\n";
  out << "@inputs";
  for (Index j = 0; j < ds.dims(); ++j) {
    out << (j ? ", " : " ") << ds.feature_names[static_cast<std::size_t>(j)];
  }
  out << "\n@outputs " << ds.label_name << "\n@data\n";
  for (Index i = 0; i < ds.rows(); ++i) {
    for (Index j = 0; j < ds.dims(); ++j) {
      char buf[32];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), ds.features(i, j));
      (void)ec;
      out << std::string(buf, ptr) << ", ";
    }
    out << ds.class_names[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(i)])]
        << "\n";
  }
  return path;
}

Matrix uniform_matrix(Index rows, Index cols, Rng& rng, double lo, double hi) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = lo + (hi - lo) * rng.uniform();
  }
  return m;
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng, double mean,
                       double stddev) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = mean + stddev * rng.gaussian();
  }
  return m;
}

}  // namespace envbal::testing
