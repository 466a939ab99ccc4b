#include "envbal/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "envbal/errors.hpp"
#include "envbal/random.hpp"

namespace envbal {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Splits one CSV line on commas, honoring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t row) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) {
    throw ParseError("unterminated quote at row " + std::to_string(row));
  }
  fields.push_back(cur);
  return fields;
}

double parse_real(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string s = trim(raw);
  if (s.empty()) {
    throw ParseError("missing value at row " + std::to_string(row) + ", column " +
                     std::to_string(col));
  }
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError("cannot parse '" + s + "' as a real number at row " +
                     std::to_string(row) + ", column " + std::to_string(col));
  }
  return value;
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

Dataset assemble(std::vector<std::vector<double>> feature_rows,
                 std::vector<std::string> raw_labels,
                 std::vector<std::string> feature_names, std::string label_name) {
  std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
  if (distinct.size() > 2) {
    throw ParseError("more than two classes present (" +
                     std::to_string(distinct.size()) + " distinct labels)");
  }
  if (distinct.size() < 2) {
    throw ParseError("fewer than two classes present");
  }

  Dataset ds;
  auto it = distinct.begin();
  ds.class_names[0] = *it++;
  ds.class_names[1] = *it;
  ds.label_name = std::move(label_name);
  ds.feature_names = std::move(feature_names);

  const Index n = static_cast<Index>(feature_rows.size());
  const Index d = static_cast<Index>(ds.feature_names.size());
  ds.features.resize(n, d);
  ds.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) ds.features(i, j) = feature_rows[i][j];
    ds.labels[i] = raw_labels[i] == ds.class_names[0] ? 0 : 1;
  }
  validate(ds);
  return ds;
}

}  // namespace

void validate(const Dataset& ds) {
  if (ds.rows() < 2) throw ConfigError("dataset needs at least 2 rows");
  if (ds.dims() < 1) throw ConfigError("dataset needs at least 1 feature");
  if (static_cast<Index>(ds.labels.size()) != ds.rows()) {
    throw ConfigError("label count does not match row count");
  }
  if (static_cast<Index>(ds.feature_names.size()) != ds.dims()) {
    throw ConfigError("feature name count does not match feature count");
  }
  if (!ds.features.allFinite()) {
    throw ConfigError("dataset contains non-finite feature values");
  }
  bool seen[2] = {false, false};
  for (int l : ds.labels) {
    if (l != 0 && l != 1) throw ConfigError("labels must be 0 or 1");
    seen[l] = true;
  }
  if (!seen[0] || !seen[1]) {
    throw ConfigError("exactly two distinct labels must be present");
  }
}

Matrix Scaler::transform(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double span = hi(j) - lo(j);
    if (span <= 0.0) {
      out.col(j).setZero();
    } else {
      out.col(j) = (x.col(j).array() - lo(j)) / span;
    }
  }
  return out;
}

Matrix Scaler::inverse(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double span = hi(j) - lo(j);
    out.col(j) = x.col(j).array() * span + lo(j);
  }
  return out;
}

Dataset load_csv(const std::string& path,
                 const std::optional<LabelColumn>& label_column,
                 const std::vector<std::string>& ignore_columns) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ParseError("'" + path + "' is empty");
  std::vector<std::string> header = split_csv_line(line, 1);
  for (auto& h : header) h = trim(h);
  const std::size_t ncols = header.size();
  if (ncols < 2) throw ParseError("header must have at least 2 columns");

  std::vector<bool> ignored(ncols, false);
  for (std::size_t j = 0; j < ncols; ++j) {
    ignored[j] = std::find(ignore_columns.begin(), ignore_columns.end(),
                           header[j]) != ignore_columns.end();
  }

  std::size_t label_idx = ncols;
  if (label_column) {
    if (std::holds_alternative<Index>(*label_column)) {
      const Index idx = std::get<Index>(*label_column);
      if (idx < 0 || idx >= static_cast<Index>(ncols)) {
        throw ParseError("label column index " + std::to_string(idx) +
                         " out of range");
      }
      label_idx = static_cast<std::size_t>(idx);
    } else {
      const std::string& name = std::get<std::string>(*label_column);
      for (std::size_t j = 0; j < ncols; ++j) {
        if (header[j] == name) {
          label_idx = j;
          break;
        }
      }
      if (label_idx == ncols) {
        throw ParseError("label column '" + name + "' not found in header");
      }
    }
  } else {
    // Default: last non-ignored column.
    for (std::size_t j = ncols; j-- > 0;) {
      if (!ignored[j]) {
        label_idx = j;
        break;
      }
    }
  }
  ignored[label_idx] = false;

  std::vector<std::string> feature_names;
  for (std::size_t j = 0; j < ncols; ++j) {
    if (j != label_idx && !ignored[j]) feature_names.push_back(header[j]);
  }
  if (feature_names.empty()) throw ParseError("no feature columns remain");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line, lineno);
    if (fields.size() != ncols) {
      throw ParseError("row " + std::to_string(lineno) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(ncols));
    }
    std::vector<double> row;
    row.reserve(feature_names.size());
    for (std::size_t j = 0; j < ncols; ++j) {
      if (j == label_idx) {
        const std::string tag = trim(fields[j]);
        if (tag.empty()) {
          throw ParseError("missing label at row " + std::to_string(lineno));
        }
        labels.push_back(tag);
      } else if (!ignored[j]) {
        row.push_back(parse_real(fields[j], lineno, j + 1));
      }
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) throw ParseError("'" + path + "' has no data rows");
  return assemble(std::move(rows), std::move(labels), std::move(feature_names),
                  header[label_idx]);
}

Dataset load_keel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  struct Attr {
    std::string name;
    bool numeric = true;
  };
  std::vector<Attr> attrs;
  std::string output_name;
  bool in_data = false;

  std::vector<std::vector<std::string>> data_rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    if (!in_data && t[0] == '@') {
      const std::string lt = lower(t);
      if (lt.rfind("@attribute", 0) == 0) {
        std::string rest = trim(t.substr(10));
        // Name runs up to the first space or '{' delimiter.
        std::size_t pos = rest.find_first_of(" \t{[");
        Attr a;
        a.name = pos == std::string::npos ? rest : trim(rest.substr(0, pos));
        const std::string kind =
            pos == std::string::npos ? "" : lower(trim(rest.substr(pos)));
        a.numeric = kind.rfind("real", 0) == 0 || kind.rfind("integer", 0) == 0 ||
                    kind.rfind("numeric", 0) == 0 || kind.rfind("[", 0) == 0;
        if (a.name.empty()) {
          throw ParseError("malformed @attribute at line " + std::to_string(lineno));
        }
        attrs.push_back(a);
      } else if (lt.rfind("@outputs", 0) == 0 || lt.rfind("@output", 0) == 0) {
        const std::size_t skip = lt.rfind("@outputs", 0) == 0 ? 8 : 7;
        output_name = trim(t.substr(skip));
        if (!output_name.empty() && output_name.back() == ',') {
          output_name.pop_back();
        }
      } else if (lt.rfind("@data", 0) == 0) {
        in_data = true;
      }
      // @relation and @inputs carry no information we need.
    } else if (in_data) {
      std::vector<std::string> fields = split_csv_line(t, lineno);
      for (auto& f : fields) f = trim(f);
      data_rows.push_back(std::move(fields));
    } else {
      throw ParseError("unexpected content before @data at line " +
                       std::to_string(lineno));
    }
  }

  if (!in_data) throw ParseError("'" + path + "' has no @data section");
  if (attrs.size() < 2) throw ParseError("need at least 2 @attribute lines");
  if (data_rows.empty()) throw ParseError("'" + path + "' has no data rows");

  std::size_t label_idx = attrs.size() - 1;
  if (!output_name.empty()) {
    bool found = false;
    for (std::size_t j = 0; j < attrs.size(); ++j) {
      if (lower(attrs[j].name) == lower(output_name)) {
        label_idx = j;
        found = true;
        break;
      }
    }
    if (!found) {
      throw ParseError("@outputs attribute '" + output_name + "' not declared");
    }
  }

  std::vector<std::string> feature_names;
  for (std::size_t j = 0; j < attrs.size(); ++j) {
    if (j == label_idx) continue;
    if (!attrs[j].numeric) {
      throw ParseError("nominal feature attribute '" + attrs[j].name +
                       "' is unsupported");
    }
    feature_names.push_back(attrs[j].name);
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < data_rows.size(); ++r) {
    const auto& fields = data_rows[r];
    if (fields.size() != attrs.size()) {
      throw ParseError("data row " + std::to_string(r + 1) + " has " +
                       std::to_string(fields.size()) + " values, expected " +
                       std::to_string(attrs.size()));
    }
    std::vector<double> row;
    row.reserve(feature_names.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (j == label_idx) {
        if (fields[j].empty()) {
          throw ParseError("missing label in data row " + std::to_string(r + 1));
        }
        labels.push_back(fields[j]);
      } else {
        row.push_back(parse_real(fields[j], r + 1, j + 1));
      }
    }
    rows.push_back(std::move(row));
  }

  return assemble(std::move(rows), std::move(labels), std::move(feature_names),
                  attrs[label_idx].name);
}

void save_csv(const Dataset& ds, const std::string& path,
              const std::vector<std::string>& provenance) {
  if (!provenance.empty() &&
      static_cast<Index>(provenance.size()) != ds.rows()) {
    throw ConfigError("provenance tag count does not match row count");
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");

  for (const auto& name : ds.feature_names) out << name << ',';
  out << ds.label_name;
  if (!provenance.empty()) out << ",provenance";
  out << '\n';

  for (Index i = 0; i < ds.rows(); ++i) {
    for (Index j = 0; j < ds.dims(); ++j) out << format_real(ds.features(i, j)) << ',';
    out << ds.class_names[static_cast<std::size_t>(ds.labels[i])];
    if (!provenance.empty()) out << ',' << provenance[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

ClassStats class_stats(const Dataset& ds) {
  validate(ds);
  Index counts[2] = {0, 0};
  for (int l : ds.labels) ++counts[l];

  ClassStats st;
  // Ties go to the lexicographically smaller name, which is class 0.
  st.minority_index = counts[1] < counts[0] ? 1 : 0;
  st.min_count = counts[st.minority_index];
  st.maj_count = counts[1 - st.minority_index];
  st.ir = static_cast<double>(st.maj_count) / static_cast<double>(st.min_count);
  st.minority_label = ds.class_names[static_cast<std::size_t>(st.minority_index)];
  return st;
}

std::pair<Dataset, Scaler> normalize_minmax(const Dataset& ds) {
  Scaler sc;
  sc.lo = ds.features.colwise().minCoeff();
  sc.hi = ds.features.colwise().maxCoeff();
  Dataset out = ds;
  out.features = sc.transform(ds.features);
  return {std::move(out), std::move(sc)};
}

std::pair<std::vector<Index>, std::vector<Index>> split_indices(
    const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  validate(ds);

  std::vector<Index> by_class[2];
  for (Index i = 0; i < ds.rows(); ++i) {
    by_class[ds.labels[static_cast<std::size_t>(i)]].push_back(i);
  }

  Rng rng(seed);
  std::vector<Index> train, test;
  for (int c = 0; c < 2; ++c) {
    auto& idx = by_class[c];
    if (idx.size() < 2) {
      throw SplitError("class '" + ds.class_names[c] +
                       "' has fewer than 2 instances");
    }
    const auto n_train = static_cast<std::size_t>(
        std::llround(static_cast<double>(idx.size()) * train_fraction));
    if (n_train == idx.size()) {
      throw SplitError("class '" + ds.class_names[c] +
                       "' would receive 0 test instances");
    }
    if (n_train == 0) {
      throw SplitError("class '" + ds.class_names[c] +
                       "' would receive 0 train instances");
    }
    rng.shuffle(idx);
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<long>(n_train));
    test.insert(test.end(), idx.begin() + static_cast<long>(n_train), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds,
                                             double train_fraction,
                                             std::uint64_t seed) {
  auto [train_idx, test_idx] = split_indices(ds, train_fraction, seed);
  return {take_rows(ds, train_idx), take_rows(ds, test_idx)};
}

Dataset take_rows(const Dataset& ds, const std::vector<Index>& idx) {
  Dataset out;
  out.feature_names = ds.feature_names;
  out.class_names = ds.class_names;
  out.label_name = ds.label_name;
  out.features.resize(static_cast<Index>(idx.size()), ds.dims());
  out.labels.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.features.row(static_cast<Index>(i)) = ds.features.row(idx[i]);
    out.labels[i] = ds.labels[static_cast<std::size_t>(idx[i])];
  }
  return out;
}

Matrix rows_of_class(const Dataset& ds, int cls) {
  std::vector<Index> idx;
  for (Index i = 0; i < ds.rows(); ++i) {
    if (ds.labels[static_cast<std::size_t>(i)] == cls) idx.push_back(i);
  }
  Matrix out(static_cast<Index>(idx.size()), ds.dims());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Index>(i)) = ds.features.row(idx[i]);
  }
  return out;
}

}  // namespace envbal
