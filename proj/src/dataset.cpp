#include "unifsel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "unifsel/prng.hpp"

namespace unifsel {

using nlohmann::json;

std::vector<int> DiscreteDataset::feature_indices() const {
  std::vector<int> out;
  out.reserve(n_columns() > 0 ? n_columns() - 1 : 0);
  for (int i = 0; i < static_cast<int>(n_columns()); ++i)
    if (i != class_index) out.push_back(i);
  return out;
}

std::string DiscreteDataset::decode(int column, std::int32_t code) const {
  if (column < static_cast<int>(levels.size()) && code < static_cast<std::int32_t>(levels[column].size()))
    return levels[column][code];
  return std::to_string(code);
}

void DiscreteDataset::validate() const {
  if (columns.size() != feature_names.size() || columns.size() != cardinalities.size())
    throw std::runtime_error("dataset: column/name/cardinality count mismatch");
  if (columns.size() < 2) throw std::runtime_error("dataset: feature count n >= 1 required");
  if (class_index < 0 || class_index >= static_cast<int>(columns.size()))
    throw std::runtime_error("dataset: class index out of range");
  if (cardinalities[class_index] < 2)
    throw std::runtime_error("dataset: class cardinality must be >= 2");
  const std::size_t m = rows();
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != m)
      throw std::runtime_error("dataset: ragged column " + feature_names[c]);
    if (cardinalities[c] < 1)
      throw std::runtime_error("dataset: nonpositive cardinality in " + feature_names[c]);
    for (std::int32_t v : columns[c])
      if (v < 0 || v >= cardinalities[c])
        throw std::runtime_error("dataset: code out of range in " + feature_names[c]);
  }
}

namespace {

// RFC4180-style row split: quoted fields, "" escapes a quote
std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

DiscreteDataset load_csv_text(const std::string& text, const std::string& class_spec) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty dataset");
  const std::vector<std::string> header = split_csv_row(line);
  const std::size_t n_cols = header.size();
  if (n_cols < 2) throw std::runtime_error("csv: need at least two columns");

  int class_index = -1;
  for (std::size_t i = 0; i < n_cols; ++i)
    if (header[i] == class_spec) {
      if (class_index >= 0) throw std::runtime_error("csv: class name '" + class_spec + "' is ambiguous");
      class_index = static_cast<int>(i);
    }
  if (class_index < 0) {
    double idx;
    if (parse_number(class_spec, idx) && idx == static_cast<int>(idx) && idx >= 0 &&
        idx < static_cast<double>(n_cols)) {
      class_index = static_cast<int>(idx);
    } else {
      throw std::runtime_error("csv: class '" + class_spec + "' does not resolve to a column");
    }
  }

  DiscreteDataset data;
  data.feature_names = header;
  data.class_index = class_index;
  data.columns.assign(n_cols, {});
  data.levels.assign(n_cols, {});
  std::vector<std::unordered_map<std::string, std::int32_t>> code_of(n_cols);

  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() && in.eof()) break;
    const std::vector<std::string> cells = split_csv_row(line);
    if (cells.size() != n_cols)
      throw std::runtime_error("csv: ragged row " + std::to_string(row_no) + " (" +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(n_cols) + ")");
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (cells[c].empty())
        throw std::runtime_error("csv: missing value at row " + std::to_string(row_no) +
                                 ", column " + header[c]);
      auto [it, inserted] = code_of[c].try_emplace(cells[c], static_cast<std::int32_t>(data.levels[c].size()));
      if (inserted) data.levels[c].push_back(cells[c]);
      data.columns[c].push_back(it->second);
    }
  }

  if (data.rows() < 2) throw std::runtime_error("csv: fewer than 2 rows");
  data.cardinalities.resize(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c)
    data.cardinalities[c] = static_cast<int>(data.levels[c].size());
  data.validate();
  return data;
}

DiscreteDataset load_csv(const std::string& path, const std::string& class_spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_csv_text(buf.str(), class_spec);
}

void save_csv(const DiscreteDataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  for (std::size_t c = 0; c < data.n_columns(); ++c) {
    if (c) out << ',';
    out << csv_escape(data.feature_names[c]);
  }
  out << '\n';
  const std::size_t m = data.rows();
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < data.n_columns(); ++c) {
      if (c) out << ',';
      out << csv_escape(data.decode(static_cast<int>(c), data.columns[c][r]));
    }
    out << '\n';
  }
}

void save_dataset_json(const DiscreteDataset& data, const std::string& path) {
  json doc;
  doc["format"] = "unifsel/1";
  doc["feature_names"] = data.feature_names;
  doc["cardinalities"] = data.cardinalities;
  doc["class_index"] = data.class_index;
  doc["columns"] = data.columns;
  if (!data.levels.empty()) doc["levels"] = data.levels;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("dataset: cannot write " + path);
  out << doc.dump(2) << '\n';
}

DiscreteDataset load_dataset_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("dataset: cannot open " + path);
  json doc = json::parse(in);
  DiscreteDataset data;
  data.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
  data.cardinalities = doc.at("cardinalities").get<std::vector<int>>();
  data.class_index = doc.at("class_index").get<int>();
  data.columns = doc.at("columns").get<std::vector<std::vector<std::int32_t>>>();
  if (doc.contains("levels")) data.levels = doc.at("levels").get<std::vector<std::vector<std::string>>>();
  if (data.rows() > 0) data.validate();
  return data;
}

DiscreteDataset discretize(const DiscreteDataset& data, int bins, BinStrategy strategy,
                           std::vector<DiscretizeWarning>* warnings) {
  if (bins < 2) throw std::invalid_argument("discretize: bins must be >= 2");
  DiscreteDataset out = data;
  const std::size_t m = data.rows();

  for (std::size_t c = 0; c < data.n_columns(); ++c) {
    if (data.levels.empty() || data.levels[c].empty()) continue;
    std::vector<double> value_of(data.levels[c].size());
    bool numeric = true;
    for (std::size_t v = 0; v < data.levels[c].size(); ++v)
      if (!parse_number(data.levels[c][v], value_of[v])) {
        numeric = false;
        break;
      }
    if (!numeric) continue;

    std::vector<double> values(m);
    for (std::size_t r = 0; r < m; ++r) values[r] = value_of[data.columns[c][r]];
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    if (sorted.front() == sorted.back()) {
      if (warnings)
        warnings->push_back({static_cast<int>(c),
                             "constant column '" + data.feature_names[c] + "' kept as a single bin"});
      out.columns[c].assign(m, 0);
      out.cardinalities[c] = 1;
      out.levels[c] = {data.levels[c].empty() ? "0" : data.levels[c][0]};
      continue;
    }

    // bin upper boundaries; value v goes to the first bin with v <= boundary
    std::vector<double> upper;
    if (strategy == BinStrategy::EqualWidth) {
      const double lo = sorted.front(), hi = sorted.back();
      for (int b = 1; b < bins; ++b) upper.push_back(lo + (hi - lo) * b / bins);
    } else {
      for (int b = 1; b < bins; ++b) {
        std::size_t pos = (m * b) / bins;
        if (pos == 0) pos = 1;
        // ties stay in one bin: boundary sits at the last occurrence
        double cut = sorted[pos - 1];
        upper.push_back(cut);
      }
      upper.erase(std::unique(upper.begin(), upper.end()), upper.end());
    }

    std::vector<std::int32_t> codes(m);
    int max_code = 0;
    for (std::size_t r = 0; r < m; ++r) {
      int b = 0;
      while (b < static_cast<int>(upper.size()) && values[r] > upper[b]) ++b;
      codes[r] = b;
      max_code = std::max(max_code, b);
    }
    out.columns[c] = std::move(codes);
    out.cardinalities[c] = max_code + 1;
    out.levels[c].clear();
    for (int b = 0; b <= max_code; ++b) out.levels[c].push_back("bin" + std::to_string(b));
  }
  out.validate();
  return out;
}

FoldPlan make_folds(const DiscreteDataset& data, int k, std::uint64_t seed) {
  const std::size_t m = data.rows();
  if (k < 2) throw std::invalid_argument("make_folds: k must be >= 2");
  if (static_cast<std::size_t>(k) > m) throw std::invalid_argument("make_folds: k > m");

  // shuffle within each class, then deal round-robin so per-fold class
  // counts differ by at most one
  std::vector<std::vector<std::size_t>> by_class(data.class_cardinality());
  const auto& cls = data.columns[data.class_index];
  for (std::size_t r = 0; r < m; ++r) by_class[cls[r]].push_back(r);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(m, 0);
  Prng rng(seed, 0x666f6c64);
  int next_fold = 0;
  for (auto& group : by_class) {
    for (std::size_t i = group.size(); i > 1; --i)
      std::swap(group[i - 1], group[rng.below(i)]);
    for (std::size_t i = 0; i < group.size(); ++i) {
      plan.assignments[group[i]] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }
  return plan;
}

DiscreteDataset take_rows(const DiscreteDataset& data, const std::vector<std::size_t>& row_ids) {
  DiscreteDataset out;
  out.feature_names = data.feature_names;
  out.cardinalities = data.cardinalities;
  out.class_index = data.class_index;
  out.levels = data.levels;
  out.columns.assign(data.n_columns(), {});
  for (std::size_t c = 0; c < data.n_columns(); ++c) {
    out.columns[c].reserve(row_ids.size());
    for (std::size_t r : row_ids) out.columns[c].push_back(data.columns[c][r]);
  }
  return out;
}

}  // namespace unifsel
