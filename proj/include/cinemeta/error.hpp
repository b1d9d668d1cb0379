// Copyright 2026 The Cinemeta Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CINEMETA_ERROR_HPP_
#define CINEMETA_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cinemeta {

// Every failure surfaced by the library carries one of these codes so callers
// (and the CLI exit-code mapping) can branch without parsing messages.
enum class ErrorCode {
  kInvalidArgument,
  // metadata_model
  kUnknownField,
  kBadValue,
  // formats
  kMissingSection,
  kRowArity,
  kEmbeddedControl,
  kEmptySelection,
  kHeaderMismatch,
  kCsvSyntax,
  kBadMagic,
  kTruncatedPayload,
  kUnsupportedMaxValue,
  kMissingKey,
  kBadType,
  kDuplicateClipId,
  kIo,
  // imaging
  kOddDimensions,
  kMissingSizeLine,
  kEntryCountMismatch,
  kValueOutOfDomain,
  kChannelMismatch,
  kBadParams,
  kFactorTooLarge,
  // geometry
  kTooFewMatches,
  kDegenerate,
  // camera_move
  kTooFewFrames,
  kNoValidSamples,
  // slate
  kNoSlateFound,
  kAlignmentRejected,
  // semantic
  kNoSubject,
  kDimensionMismatch,
  // detector_bridge
  kDetectorUnavailable,
  kProtocolError,
  kBackendExit,
  kTimeout,
  // fusion
  kUnknownLabel,
  kBadPrecedence,
  kClipMismatch,
  // pipeline
  kConfig,
  kEmptyIntersection,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnknownField: return "UnknownField";
    case ErrorCode::kBadValue: return "BadValue";
    case ErrorCode::kMissingSection: return "MissingSection";
    case ErrorCode::kRowArity: return "RowArity";
    case ErrorCode::kEmbeddedControl: return "EmbeddedControl";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kHeaderMismatch: return "HeaderMismatch";
    case ErrorCode::kCsvSyntax: return "CsvSyntax";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedPayload: return "TruncatedPayload";
    case ErrorCode::kUnsupportedMaxValue: return "UnsupportedMaxValue";
    case ErrorCode::kMissingKey: return "MissingKey";
    case ErrorCode::kBadType: return "BadType";
    case ErrorCode::kDuplicateClipId: return "DuplicateClipId";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kOddDimensions: return "OddDimensions";
    case ErrorCode::kMissingSizeLine: return "MissingSizeLine";
    case ErrorCode::kEntryCountMismatch: return "EntryCountMismatch";
    case ErrorCode::kValueOutOfDomain: return "ValueOutOfDomain";
    case ErrorCode::kChannelMismatch: return "ChannelMismatch";
    case ErrorCode::kBadParams: return "BadParams";
    case ErrorCode::kFactorTooLarge: return "FactorTooLarge";
    case ErrorCode::kTooFewMatches: return "TooFewMatches";
    case ErrorCode::kDegenerate: return "Degenerate";
    case ErrorCode::kTooFewFrames: return "TooFewFrames";
    case ErrorCode::kNoValidSamples: return "NoValidSamples";
    case ErrorCode::kNoSlateFound: return "NoSlateFound";
    case ErrorCode::kAlignmentRejected: return "AlignmentRejected";
    case ErrorCode::kNoSubject: return "NoSubject";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDetectorUnavailable: return "DetectorUnavailable";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kBackendExit: return "BackendExit";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kBadPrecedence: return "BadPrecedence";
    case ErrorCode::kClipMismatch: return "ClipMismatch";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kEmptyIntersection: return "EmptyIntersection";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace cinemeta

#endif  // CINEMETA_ERROR_HPP_
