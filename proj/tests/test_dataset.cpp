#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "envbal/dataset.hpp"
#include "envbal/errors.hpp"
#include "support/fixtures.hpp"

using namespace envbal;
using namespace envbal::testing;

namespace {

std::string write_text(const std::string& name, const std::string& text) {
  const std::string path = temp_dir() + "/" + name;
  std::ofstream out(path);
  out << text;
  return path;
}

Index count_label(const Dataset& ds, int cls) {
  Index n = 0;
  for (int l : ds.labels) n += l == cls;
  return n;
}

}  // namespace

TEST_CASE("load_csv reads a small file back") {
  const auto path = write_text("small.csv",
                               "a,b,class\n"
                               "1,2,pos\n"
                               "3,4,neg\n"
                               "5,6.5,pos\n"
                               "-1,0,neg\n");
  const Dataset ds = load_csv(path);
  CHECK(ds.rows() == 4);
  CHECK(ds.dims() == 2);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.class_names[0] == "neg");
  CHECK(ds.class_names[1] == "pos");
  CHECK(ds.features(2, 1) == doctest::Approx(6.5));
  CHECK(ds.labels == std::vector<int>{1, 0, 1, 0});
}

TEST_CASE("load_csv rejects a third class") {
  const auto path = write_text("three.csv", "a,class\n1,x\n2,y\n3,z\n");
  CHECK_THROWS_WITH_AS(load_csv(path),
                       doctest::Contains("more than two classes"), ParseError);
}

TEST_CASE("load_csv reports missing and malformed values with location") {
  const auto missing = write_text("missing.csv", "a,b,class\n1,,pos\n2,3,neg\n");
  CHECK_THROWS_WITH_AS(load_csv(missing), doctest::Contains("row 2"), ParseError);

  const auto bad = write_text("bad.csv", "a,b,class\n1,2,pos\nx,3,neg\n");
  CHECK_THROWS_WITH_AS(load_csv(bad), doctest::Contains("row 3"), ParseError);

  const auto inf = write_text("inf.csv", "a,b,class\n1,inf,pos\n2,3,neg\n");
  CHECK_THROWS_AS(load_csv(inf), ParseError);
}

TEST_CASE("load_csv label column can be picked by name or index") {
  const auto path = write_text("labelcol.csv", "class,a,b\npos,1,2\nneg,3,4\n");
  const Dataset by_name = load_csv(path, LabelColumn{std::string("class")});
  CHECK(by_name.dims() == 2);
  const Dataset by_index = load_csv(path, LabelColumn{Index(0)});
  CHECK(by_index.labels == by_name.labels);
  CHECK_THROWS_AS(load_csv(path, LabelColumn{std::string("nope")}), ParseError);
}

TEST_CASE("heart-shaped csv reproduces its class counts") {
  const Dataset heart = fixture("heart");
  const auto path = write_temp_csv(heart, "heart.csv");
  const Dataset ds = load_csv(path);
  CHECK(ds.rows() == 270);
  CHECK(ds.dims() == 13);
  const ClassStats st = class_stats(ds);
  CHECK(st.min_count == 120);
  CHECK(st.maj_count == 150);
}

TEST_CASE("load_keel reads a minimal file") {
  const auto path = write_text("mini.dat",
                               "@relation mini\n"
                               "@attribute a real [0, 5]\n"
                               "@attribute b real [0, 5]\n"
                               "@attribute class {yes, no}\n"
                               "@inputs a, b\n"
                               "@outputs class\n"
                               "@data\n"
                               "1, 2, yes\n"
                               "2, 1, no\n"
                               "0.5, 0.5, yes\n");
  const Dataset ds = load_keel(path);
  CHECK(ds.rows() == 3);
  CHECK(ds.dims() == 2);
  CHECK(ds.label_name == "class");
}

TEST_CASE("load_keel errors") {
  const auto no_data = write_text("nodata.dat",
                                  "@relation x\n@attribute a real\n"
                                  "@attribute class {p, n}\n");
  CHECK_THROWS_WITH_AS(load_keel(no_data), doctest::Contains("@data"), ParseError);

  const auto nominal = write_text("nominal.dat",
                                  "@relation x\n@attribute a {red, blue}\n"
                                  "@attribute class {p, n}\n@data\nred, p\nblue, n\n");
  CHECK_THROWS_WITH_AS(load_keel(nominal), doctest::Contains("nominal"), ParseError);
}

TEST_CASE("haberman-shaped keel file matches its characteristics") {
  const Dataset hab = fixture("haberman");
  const auto path = write_temp_keel(hab, "haberman.dat");
  const Dataset ds = load_keel(path);
  CHECK(ds.rows() == 306);
  CHECK(ds.dims() == 3);
  const ClassStats st = class_stats(ds);
  CHECK(st.min_count == 81);
  CHECK(st.maj_count == 225);
  CHECK(st.ir == doctest::Approx(2.78).epsilon(0.005));
}

TEST_CASE("class_stats imbalance ratios") {
  const ClassStats heart = class_stats(fixture("heart"));
  CHECK(heart.ir == doctest::Approx(1.25));
  const ClassStats ecoli = class_stats(fixture("ecoli4"));
  CHECK(ecoli.min_count == 20);
  CHECK(ecoli.maj_count == 316);
  CHECK(ecoli.ir == doctest::Approx(15.80));
}

TEST_CASE("class_stats tie goes to the lexicographically smaller label") {
  const Dataset ds = make_blobs(5, 5, 2, 1.0, 42);
  const ClassStats st = class_stats(ds);
  CHECK(st.ir == 1.0);
  CHECK(st.minority_label == "neg");
  CHECK(st.min_count == 5);
}

TEST_CASE("normalize_minmax maps features to [0,1]") {
  Dataset ds;
  ds.features.resize(3, 2);
  ds.features << 2, 7, 4, 7, 6, 7;
  ds.labels = {0, 1, 0};
  ds.feature_names = {"a", "b"};
  ds.class_names = {"n", "p"};

  auto [norm, scaler] = normalize_minmax(ds);
  CHECK(norm.features(0, 0) == 0.0);
  CHECK(norm.features(1, 0) == 0.5);
  CHECK(norm.features(2, 0) == 1.0);
  // constant column maps to 0
  CHECK(norm.features.col(1).isZero());
  // constant column inverts back to its original value
  CHECK(scaler.inverse(norm.features)(1, 1) == 7.0);
}

TEST_CASE("scaler round-trips random data within 1e-12") {
  Rng rng(7);
  Dataset ds;
  ds.features = uniform_matrix(5, 3, rng, -4.0, 9.0);
  ds.labels = {0, 1, 0, 1, 0};
  ds.feature_names = {"a", "b", "c"};
  ds.class_names = {"n", "p"};

  auto [norm, scaler] = normalize_minmax(ds);
  CHECK((norm.features.array() >= 0.0).all());
  CHECK((norm.features.array() <= 1.0).all());
  const Matrix back = scaler.inverse(norm.features);
  CHECK((back - ds.features).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normalize_minmax is idempotent on normalized data") {
  Rng rng(8);
  Dataset ds = make_blobs(6, 9, 3, 1.0, 3);
  auto [norm, scaler1] = normalize_minmax(ds);
  auto [again, scaler2] = normalize_minmax(norm);
  CHECK((again.features - norm.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(scaler2.lo.isZero());
  CHECK((scaler2.hi.array() == 1.0).all());
}

TEST_CASE("stratified_split arithmetic and determinism") {
  const Dataset ds = make_blobs(10, 20, 3, 2.0, 11);
  auto [train, test] = stratified_split(ds, 0.7, 1);
  CHECK(count_label(train, 1) == 7);
  CHECK(count_label(train, 0) == 14);
  CHECK(count_label(test, 1) == 3);
  CHECK(count_label(test, 0) == 6);

  auto [i1, i2] = split_indices(ds, 0.7, 1);
  auto [j1, j2] = split_indices(ds, 0.7, 1);
  CHECK(i1 == j1);
  CHECK(i2 == j2);
}

TEST_CASE("stratified_split partitions the dataset exactly") {
  const Dataset ds = make_blobs(13, 29, 4, 2.0, 5);
  auto [train_idx, test_idx] = split_indices(ds, 0.66, 99);
  std::vector<bool> seen(static_cast<std::size_t>(ds.rows()), false);
  for (Index i : train_idx) seen[static_cast<std::size_t>(i)] = true;
  for (Index i : test_idx) {
    CHECK_FALSE(seen[static_cast<std::size_t>(i)]);
    seen[static_cast<std::size_t>(i)] = true;
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
}

TEST_CASE("stratified_split rejects a fraction that empties a test class") {
  const Dataset ds = make_blobs(10, 20, 3, 2.0, 11);
  // round(10 * 0.99) = 10 leaves no minority test instance
  CHECK_THROWS_AS(stratified_split(ds, 0.99, 1), SplitError);
}

TEST_CASE("save_csv round-trips through load_csv") {
  const Dataset ds = make_blobs(7, 12, 4, 1.5, 21);
  const auto path = write_temp_csv(ds, "roundtrip.csv");
  const Dataset back = load_csv(path);
  CHECK(back.rows() == ds.rows());
  CHECK((back.features - ds.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.labels == ds.labels);
}

TEST_CASE("save_csv provenance column is skipped on reload") {
  const Dataset ds = make_blobs(3, 4, 2, 1.5, 22);
  std::vector<std::string> tags(7, "original");
  const std::string path = temp_dir() + "/prov.csv";
  save_csv(ds, path, tags);
  const Dataset back = load_csv(path, std::nullopt, {"provenance"});
  CHECK(back.dims() == 2);
  CHECK(back.rows() == 7);
}
