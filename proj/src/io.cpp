#include "permclass/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "permclass/datasets.hpp"
#include "permclass/error.hpp"
#include "permclass/model_select.hpp"

namespace permclass {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string where(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

bool is_missing(const std::string& field) {
  return field.empty() || field == "NA" || field == "NaN" || field == "nan" || field == "?";
}

std::string join_csv(std::span<const std::string> fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& where_) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, v);
  if (t.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ParseError(where_ + ": cannot parse number '" + t + "'");
  }
  return v;
}

std::vector<CsvRecord> read_csv_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::vector<CsvRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    CsvRecord rec;
    rec.line = line_no;
    std::size_t start = 0;
    for (;;) {
      const auto comma = t.find(',', start);
      rec.fields.push_back(trim(std::string_view(t).substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<std::string> provenance_lines(std::uint64_t seed, const nlohmann::json& config) {
  return {
      std::string("permclass ") + PERMCLASS_VERSION,
      "seed: " + std::to_string(seed),
      "config: " + config.dump(),
  };
}

void write_file_atomically(const std::string& path, const std::string& content) {
  const std::string partial = path + ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + partial + "' for writing");
    out << content;
    out.flush();
    if (!out) throw Error("failed writing '" + partial + "'");
  }
  std::filesystem::rename(partial, path);
}

// ---- datasets -------------------------------------------------------------

LabeledDataset load_features_csv(const std::string& path) {
  const auto records = read_csv_records(path);
  if (records.empty()) throw ParseError(path + ": missing header row");
  const auto& header = records.front();
  if (header.fields.empty() || header.fields.back() != "label") {
    throw ParseError(where(path, header.line) + ": schema error, last column must be 'label'");
  }
  const std::size_t width = header.fields.size();
  LabeledDataset data;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != width) {
      throw ParseError(where(path, rec.line) + ": expected " + std::to_string(width) +
                       " fields, found " + std::to_string(rec.fields.size()));
    }
    Point p;
    for (std::size_t c = 0; c + 1 < width; ++c) p.push_back(parse_double(rec.fields[c], where(path, rec.line)));
    const double label = parse_double(rec.fields.back(), where(path, rec.line));
    if (label < 1 || label != static_cast<int>(label)) {
      throw ParseError(where(path, rec.line) + ": label must be a positive integer");
    }
    data.points.push_back(std::move(p));
    data.labels.push_back(static_cast<int>(label));
  }
  data.num_classes = data.max_label();
  return data;
}

std::string features_csv(const LabeledDataset& data, std::span<const std::string> comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << '\n';
  const std::size_t d = data.points.empty() ? 0 : data.points.front().size();
  for (std::size_t c = 0; c < d; ++c) out << 'x' << (c + 1) << ',';
  out << "label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.points[i]) out << format_double(v) << ',';
    out << data.labels[i] << '\n';
  }
  return out.str();
}

void save_features_csv(const std::string& path, const LabeledDataset& data,
                       std::span<const std::string> comments) {
  write_file_atomically(path, features_csv(data, comments));
}

ExpressionMatrix load_expression_csv(const std::string& matrix_path,
                                     const std::string& sidecar_path,
                                     std::vector<std::string> class_names) {
  const auto records = read_csv_records(matrix_path);
  if (records.empty()) throw ParseError(matrix_path + ": missing header row");
  const auto& header = records.front();
  if (header.fields.size() < 2) throw ParseError(where(matrix_path, header.line) + ": no sample columns");
  ExpressionMatrix e;
  e.sample_ids.assign(header.fields.begin() + 1, header.fields.end());
  const std::size_t samples = e.sample_ids.size();

  std::vector<std::vector<double>> rows;
  std::size_t dropped = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != samples + 1) {
      throw ParseError(where(matrix_path, rec.line) + ": expected " + std::to_string(samples + 1) +
                       " fields, found " + std::to_string(rec.fields.size()));
    }
    if (std::any_of(rec.fields.begin() + 1, rec.fields.end(), is_missing)) {
      ++dropped;
      spdlog::info("{}: dropping gene '{}' with missing values", where(matrix_path, rec.line),
                   rec.fields.front());
      continue;
    }
    std::vector<double> values;
    values.reserve(samples);
    for (std::size_t c = 1; c <= samples; ++c) {
      values.push_back(parse_double(rec.fields[c], where(matrix_path, rec.line)));
    }
    e.gene_ids.push_back(rec.fields.front());
    rows.push_back(std::move(values));
  }
  if (dropped > 0) spdlog::warn("{}: dropped {} gene row(s) with missing values", matrix_path, dropped);
  e.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(samples));
  for (std::size_t g = 0; g < rows.size(); ++g) {
    for (std::size_t s = 0; s < samples; ++s) {
      e.values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(s)) = rows[g][s];
    }
  }

  const auto side = read_csv_records(sidecar_path);
  if (side.empty()) throw ParseError(sidecar_path + ": missing header row");
  std::map<std::string, std::string> label_of;
  for (std::size_t r = 1; r < side.size(); ++r) {
    if (side[r].fields.size() != 2) {
      throw ParseError(where(sidecar_path, side[r].line) + ": expected 'sample,label'");
    }
    if (!label_of.emplace(side[r].fields[0], side[r].fields[1]).second) {
      throw ParseError(where(sidecar_path, side[r].line) + ": duplicate sample '" +
                       side[r].fields[0] + "'");
    }
    if (std::find(e.sample_ids.begin(), e.sample_ids.end(), side[r].fields[0]) == e.sample_ids.end()) {
      throw ParseError(where(sidecar_path, side[r].line) + ": unknown sample '" + side[r].fields[0] + "'");
    }
    if (!class_names.empty() &&
        std::find(class_names.begin(), class_names.end(), side[r].fields[1]) == class_names.end()) {
      throw ParseError(where(sidecar_path, side[r].line) + ": unknown label '" + side[r].fields[1] + "'");
    }
  }
  if (class_names.empty()) {
    std::set<std::string> names;
    for (const auto& [s, l] : label_of) names.insert(l);
    class_names.assign(names.begin(), names.end());
  }
  e.class_names = class_names;
  for (const auto& s : e.sample_ids) {
    const auto it = label_of.find(s);
    if (it == label_of.end()) throw ParseError(sidecar_path + ": no label for sample '" + s + "'");
    const auto pos = std::find(class_names.begin(), class_names.end(), it->second);
    e.sample_labels.push_back(static_cast<int>(pos - class_names.begin()) + 1);
  }
  return e;
}

std::variant<LabeledDataset, ExpressionMatrix> load_csv(const std::string& path, CsvSchema schema,
                                                        const std::string& sidecar_path) {
  if (schema == CsvSchema::FeaturesWithLabel) return load_features_csv(path);
  if (sidecar_path.empty()) throw Error("load_csv: expression matrix needs a label sidecar");
  return load_expression_csv(path, sidecar_path);
}

Eigen::MatrixXd load_matrix_csv(const std::string& path) {
  const auto records = read_csv_records(path);
  const auto n = static_cast<Eigen::Index>(records.size());
  Eigen::MatrixXd m(n, records.empty() ? 0 : static_cast<Eigen::Index>(records.front().fields.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& rec = records[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(rec.fields.size()) != m.cols()) {
      throw ParseError(where(path, rec.line) + ": ragged matrix row");
    }
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = parse_double(rec.fields[static_cast<std::size_t>(j)], where(path, rec.line));
    }
  }
  return m;
}

PointSet load_points_csv(const std::string& path) {
  const auto records = read_csv_records(path);
  if (records.empty()) throw ParseError(path + ": missing header row");
  const auto& header = records.front();
  std::size_t width = header.fields.size();
  if (!header.fields.empty() && header.fields.back() == "label") --width;
  PointSet pts;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.fields.size()) {
      throw ParseError(where(path, rec.line) + ": expected " + std::to_string(header.fields.size()) +
                       " fields, found " + std::to_string(rec.fields.size()));
    }
    Point p;
    for (std::size_t c = 0; c < width; ++c) p.push_back(parse_double(rec.fields[c], where(path, rec.line)));
    pts.push_back(std::move(p));
  }
  return pts;
}

// ---- models and outputs ---------------------------------------------------

nlohmann::json model_to_json(const FittedModel& model) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : model.training().points) points.push_back(p);
  return {
      {"format", "permclass-model"},
      {"version", PERMCLASS_VERSION},
      {"params", to_json(model.params())},
      {"num_classes", model.num_classes()},
      {"points", points},
      {"labels", model.training().labels},
  };
}

FittedModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "permclass-model") {
    throw ParseError("model: not a permclass model file");
  }
  LabeledDataset data;
  data.points = j.at("points").get<PointSet>();
  data.labels = j.at("labels").get<std::vector<int>>();
  data.num_classes = j.at("num_classes").get<int>();
  return fit(data, model_params_from_json(j.at("params")));
}

nlohmann::json to_json(const Partition& partition) {
  return {{"block_count", partition.block_count()}, {"blocks", partition.blocks}};
}

std::string posterior_csv(std::span<const PosteriorRow> rows, std::span<const std::string> comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << '\n';
  const std::size_t k = rows.empty() ? 0 : rows.front().probabilities.size();
  std::vector<std::string> header;
  for (std::size_t r = 1; r <= k; ++r) header.push_back("p" + std::to_string(r));
  header.push_back("label");
  out << join_csv(header) << '\n';
  for (const auto& row : rows) {
    for (double p : row.probabilities) out << format_double(p) << ',';
    out << row.label << '\n';
  }
  return out.str();
}

}  // namespace permclass
