// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <Eigen/Dense>

namespace gpboot {

/// Reads a rectangular numeric CSV into a matrix. A non-numeric first row is
/// treated as a header and skipped. Throws ParseError with the offending
/// row/column and RaggedRows when a row's field count differs from the first
/// data row.
Eigen::MatrixXd ingest_csv(const std::string& path);

}  // namespace gpboot
