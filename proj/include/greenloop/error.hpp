// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GREENLOOP_ERROR_HPP_
#define GREENLOOP_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace greenloop {

enum class ErrorCode {
  kParse,
  kValidation,
  kCompile,
  kInvalidModel,
  kStateSpaceTooLarge,
  kDisconnectedGraph,
  kMissingEdge,
  kMissingFactor,
  kDuplicateFactor,
  kInconsistentReport,
  kNoGraph,
  kMissingFeature,
  kZeroVariance,
  kSingleClassData,
  kNonFiniteLoss,
  kDimensionMismatch,
  kEmptyDataset,
  kModeUnsupported,
  kModeMismatch,
  kMissingArtifacts,
  kManifestUnreadable,
  kMissingMetric,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this exception. The code names
// the failure family; the message carries the offending field, id or path.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

  // Returns a copy whose message is prefixed with `context` (e.g. a stage).
  Error with_context(std::string_view context) const;

 private:
  ErrorCode code_;
};

}  // namespace greenloop

#endif  // GREENLOOP_ERROR_HPP_
