// Copyright 2026 The Greenloop Authors
// SPDX-License-Identifier: Apache-2.0

#include "greenloop/error.hpp"

namespace greenloop {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kCompile: return "CompileError";
    case ErrorCode::kInvalidModel: return "InvalidModel";
    case ErrorCode::kStateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::kMissingEdge: return "MissingEdge";
    case ErrorCode::kMissingFactor: return "MissingFactor";
    case ErrorCode::kDuplicateFactor: return "DuplicateFactor";
    case ErrorCode::kInconsistentReport: return "InconsistentReport";
    case ErrorCode::kNoGraph: return "NoGraph";
    case ErrorCode::kMissingFeature: return "MissingFeature";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kSingleClassData: return "SingleClassData";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kModeUnsupported: return "ModeUnsupported";
    case ErrorCode::kModeMismatch: return "ModeMismatch";
    case ErrorCode::kMissingArtifacts: return "MissingArtifacts";
    case ErrorCode::kManifestUnreadable: return "ManifestUnreadable";
    case ErrorCode::kMissingMetric: return "MissingMetric";
    case ErrorCode::kIo: return "IoError";
  }
  return "Error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

Error Error::with_context(std::string_view context) const {
  return Error(code_, std::string(context) + ": " + what());
}

}  // namespace greenloop
