// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace gpboot {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gpboot
