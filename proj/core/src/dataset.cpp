#include "dek/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "dek/error.hpp"
#include "dek/gram_matrix.hpp"
#include "dek/random.hpp"

namespace dek {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delimiter)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long> parse_index(const std::string& s) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> build_label_dictionary(const std::vector<std::string>& raw) {
  std::vector<std::string> unique(raw.begin(), raw.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  const bool numeric = std::all_of(unique.begin(), unique.end(),
                                   [](const std::string& s) { return parse_real(s).has_value(); });
  if (numeric) {
    std::stable_sort(unique.begin(), unique.end(), [](const std::string& a, const std::string& b) {
      return *parse_real(a) < *parse_real(b);
    });
  }
  return unique;
}

}  // namespace

void Standardization::apply(SampleMatrix& features) const {
  if (features.cols() != mean.size()) {
    throw ShapeError("standardization has " + std::to_string(mean.size()) +
                     " columns, data has " + std::to_string(features.cols()));
  }
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    if (!scaled[static_cast<std::size_t>(c)]) continue;
    for (Eigen::Index r = 0; r < features.rows(); ++r)
      features(r, c) = (features(r, c) - mean[c]) / stddev[c];
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.task = task;
  out.feature_names = feature_names;
  out.target_name = target_name;
  out.label_names = label_names;
  out.standardization = standardization;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) throw ShapeError("subset row out of range");
    out.features.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(rows[r]));
    if (task == Task::classification) {
      out.labels.push_back(labels[rows[r]]);
    } else {
      out.targets.push_back(targets[rows[r]]);
    }
  }
  return out;
}

Dataset read_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  std::vector<std::string> header;
  if (schema.header) {
    while (std::getline(in, line) && trim(line).empty()) {
    }
    if (trim(line).empty()) throw DataError("csv has no header line");
    header = split_line(line, schema.delimiter);
  }

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line, schema.delimiter));
  }
  if (rows.empty()) throw DataError("csv has no data rows");

  const std::size_t width = header.empty() ? rows.front().size() : header.size();
  if (width < 2) throw DataError("csv needs at least one feature column and a target column");

  std::optional<std::size_t> target_col;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == schema.target_column) target_col = c;
  if (!target_col) {
    if (auto idx = parse_index(schema.target_column); idx && *idx >= 0 &&
                                                      static_cast<std::size_t>(*idx) < width) {
      target_col = static_cast<std::size_t>(*idx);
    }
  }
  if (!target_col) throw DataError("target column '" + schema.target_column + "' not found");

  Dataset data;
  data.task = schema.task;
  data.target_name = header.empty() ? schema.target_column : header[*target_col];
  for (std::size_t c = 0; c < width; ++c) {
    if (c == *target_col) continue;
    data.feature_names.push_back(header.empty() ? "x" + std::to_string(c) : header[c]);
  }

  std::vector<std::vector<double>> features;
  std::vector<std::string> raw_labels;
  std::vector<double> targets;
  for (const auto& cells : rows) {
    if (cells.size() != width) {
      ++data.rejected_rows;
      continue;
    }
    std::vector<double> values;
    values.reserve(width - 1);
    bool ok = true;
    for (std::size_t c = 0; c < width && ok; ++c) {
      if (c == *target_col) continue;
      auto v = parse_real(cells[c]);
      if (!v) ok = false;
      else values.push_back(*v);
    }
    const std::string& target_cell = cells[*target_col];
    std::optional<double> target_value;
    if (ok) {
      if (schema.task == Task::regression) {
        target_value = parse_real(target_cell);
        ok = target_value.has_value();
      } else {
        ok = !target_cell.empty();
      }
    }
    if (!ok) {
      ++data.rejected_rows;
      continue;
    }
    features.push_back(std::move(values));
    if (schema.task == Task::regression) targets.push_back(*target_value);
    else raw_labels.push_back(target_cell);
  }

  if (data.rejected_rows * 2 > rows.size()) {
    throw DataError("rejected " + std::to_string(data.rejected_rows) + " of " +
                    std::to_string(rows.size()) + " rows");
  }

  data.features.resize(static_cast<Eigen::Index>(features.size()),
                       static_cast<Eigen::Index>(width - 1));
  for (std::size_t r = 0; r < features.size(); ++r)
    for (std::size_t c = 0; c + 1 < width; ++c)
      data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = features[r][c];

  if (schema.task == Task::regression) {
    data.targets = std::move(targets);
  } else {
    data.label_names = schema.label_names.empty() ? build_label_dictionary(raw_labels)
                                                  : schema.label_names;
    std::map<std::string, int> index;
    for (std::size_t k = 0; k < data.label_names.size(); ++k)
      index.emplace(data.label_names[k], static_cast<int>(k));
    for (const auto& l : raw_labels) {
      auto it = index.find(l);
      if (it == index.end()) throw DataError("label '" + l + "' not in the label dictionary");
      data.labels.push_back(it->second);
    }
  }
  return data;
}

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  return read_csv(in, schema);
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& name : data.feature_names) out << name << ',';
  out << (data.target_name.empty() ? "target" : data.target_name) << '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (Eigen::Index c = 0; c < data.features.cols(); ++c)
      out << format_double(data.features(static_cast<Eigen::Index>(r), c)) << ',';
    if (data.task == Task::classification) {
      out << data.label_names.at(static_cast<std::size_t>(data.labels[r]));
    } else {
      out << format_double(data.targets[r]);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

SplitResult split(const Dataset& data, double fraction, std::uint64_t seed, bool stratify) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("split fraction must lie in (0, 1)");
  if (data.size() == 0) throw DataError("cannot split an empty dataset");
  Rng rng(seed);
  SplitResult result;

  auto take = [&](std::vector<std::size_t> members) {
    rng.shuffle(members);
    const double raw = fraction * static_cast<double>(members.size());
    auto n_train = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
    n_train = std::min(n_train, members.size());
    result.train_rows.insert(result.train_rows.end(), members.begin(), members.begin() + n_train);
    result.test_rows.insert(result.test_rows.end(), members.begin() + n_train, members.end());
  };

  if (data.task == Task::classification && stratify) {
    for (int c = 0; c < data.class_count(); ++c) {
      std::vector<std::size_t> members;
      for (std::size_t r = 0; r < data.size(); ++r)
        if (data.labels[r] == c) members.push_back(r);
      if (members.size() == 1) {
        result.warnings.push_back("class '" + data.label_names[c] +
                                  "' has a single member; placed in train");
      }
      take(std::move(members));
    }
  } else {
    std::vector<std::size_t> all(data.size());
    for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
    take(std::move(all));
  }
  std::sort(result.train_rows.begin(), result.train_rows.end());
  std::sort(result.test_rows.begin(), result.test_rows.end());
  result.train = data.subset(result.train_rows);
  result.test = data.subset(result.test_rows);
  return result;
}

Standardization fit_standardization(const SampleMatrix& train, std::vector<std::string>* warnings) {
  if (train.rows() == 0) throw DataError("cannot standardize with an empty training split");
  Standardization stats;
  const Eigen::Index d = train.cols();
  stats.mean.resize(d);
  stats.stddev.resize(d);
  stats.scaled.assign(static_cast<std::size_t>(d), true);
  const double n = static_cast<double>(train.rows());
  for (Eigen::Index c = 0; c < d; ++c) {
    double sum = 0.0;
    for (Eigen::Index r = 0; r < train.rows(); ++r) sum += train(r, c);
    const double mean = sum / n;
    double ss = 0.0;
    for (Eigen::Index r = 0; r < train.rows(); ++r) ss += (train(r, c) - mean) * (train(r, c) - mean);
    const double sd = std::sqrt(ss / n);
    stats.mean[c] = mean;
    stats.stddev[c] = sd;
    if (!(sd > 1e-12 * std::max(1.0, std::fabs(mean)))) {
      stats.scaled[static_cast<std::size_t>(c)] = false;
      if (warnings) warnings->push_back("feature " + std::to_string(c) + " has zero variance; left unscaled");
    }
  }
  return stats;
}

StandardizeResult standardize(const Dataset& train, const Dataset& test) {
  if (test.size() > 0 && test.features.cols() != train.features.cols()) {
    throw ShapeError("train and test have different feature counts");
  }
  StandardizeResult result;
  result.stats = fit_standardization(train.features, &result.warnings);
  result.train = train;
  result.test = test;
  result.stats.apply(result.train.features);
  if (result.test.size() > 0) result.stats.apply(result.test.features);
  result.train.standardization = result.stats;
  result.test.standardization = result.stats;
  return result;
}

}  // namespace dek
