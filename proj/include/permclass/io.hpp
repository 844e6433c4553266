#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "permclass/classifier.hpp"

namespace permclass {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Parses a decimal double; throws ParseError mentioning `where` on failure.
double parse_double(std::string_view text, const std::string& where);

/// A comma-separated record with its 1-based line number.
struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Reads a CSV file, skipping blank lines and lines starting with '#'.
std::vector<CsvRecord> read_csv_records(const std::string& path);

/// Comment lines for output files: tool version, seed and resolved config.
std::vector<std::string> provenance_lines(std::uint64_t seed, const nlohmann::json& config);

/// Writes `content` to `path.partial` and renames it to `path` once complete.
void write_file_atomically(const std::string& path, const std::string& content);

nlohmann::json model_to_json(const FittedModel& model);
/// Refits from the stored parameters and training points.
FittedModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Partition& partition);

/// One row per query: probabilities for classes 1..k and the argmax label.
std::string posterior_csv(std::span<const PosteriorRow> rows,
                          std::span<const std::string> comments = {});

}  // namespace permclass
