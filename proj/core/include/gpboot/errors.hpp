// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace gpboot {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GPBOOT_DEFINE_ERROR(Name)        \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

GPBOOT_DEFINE_ERROR(NotSymmetric);
GPBOOT_DEFINE_ERROR(NotPSD);
GPBOOT_DEFINE_ERROR(RankExceeded);
GPBOOT_DEFINE_ERROR(EmptyNet);
GPBOOT_DEFINE_ERROR(TooFewSamples);
GPBOOT_DEFINE_ERROR(TooFewPoints);
GPBOOT_DEFINE_ERROR(DimensionMismatch);
GPBOOT_DEFINE_ERROR(AlphaOutOfRange);
GPBOOT_DEFINE_ERROR(NonpositiveVariance);
GPBOOT_DEFINE_ERROR(UnknownGenerator);
GPBOOT_DEFINE_ERROR(ZeroMatrix);
GPBOOT_DEFINE_ERROR(SingularSystem);
GPBOOT_DEFINE_ERROR(NoConvergence);
GPBOOT_DEFINE_ERROR(ParseError);
GPBOOT_DEFINE_ERROR(RaggedRows);
GPBOOT_DEFINE_ERROR(ConfigInvalid);
GPBOOT_DEFINE_ERROR(InvalidArgument);

#undef GPBOOT_DEFINE_ERROR

}  // namespace gpboot
