#pragma once

#include <optional>
#include <string>
#include <vector>

namespace flexifuzz::cli {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

struct InputDigest {
  std::string path;
  std::string sha256;
};

/// "# key: value" comment lines embedded at the top of every CSV artifact.
std::string csv_meta_block(std::uint64_t seed, const std::vector<InputDigest>& inputs);

std::string metric_cell(const std::optional<double>& value);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace flexifuzz::cli
