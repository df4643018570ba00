// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#include "gpboot/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "gpboot/errors.hpp"

namespace gpboot {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_double(const std::string& field) {
  if (field.empty()) return std::nullopt;
  char* end = nullptr;
  const double value = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size()) return std::nullopt;
  return value;
}

}  // namespace

Eigen::MatrixXd ingest_csv(const std::string& path) {
  std::ifstream input(path);
  if (!input) throw ParseError("cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_number = 0;
  std::size_t width = 0;
  bool first_content_row = true;
  while (std::getline(input, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);

    if (first_content_row) {
      // Header auto-detection: a first row with any non-numeric field.
      bool numeric = true;
      for (const auto& f : fields) {
        if (!parse_double(f)) {
          numeric = false;
          break;
        }
      }
      first_content_row = false;
      if (!numeric) continue;  // skip header
    }

    if (width == 0) {
      width = fields.size();
    } else if (fields.size() != width) {
      throw RaggedRows("row " + std::to_string(line_number) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(width));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto value = parse_double(fields[c]);
      if (!value) {
        throw ParseError("row " + std::to_string(line_number) + " column " +
                         std::to_string(c + 1) + ": cannot parse '" +
                         fields[c] + "'");
      }
      row.push_back(*value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("'" + path + "' contains no data rows");

  Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return data;
}

}  // namespace gpboot
