#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// Process exit codes for the command-line tool.  Scripts drive the codec
// through the CLI, so the distinct failure modes that a caller can react to
// get stable numbers; everything else is 1.

#include "rankstego/errors.hpp"

namespace rankstego {

inline constexpr int kExitOk = 0;
inline constexpr int kExitGenericError = 1;
inline constexpr int kExitRetokenizationUnstable = 2;
inline constexpr int kExitFingerprintMismatch = 3;
inline constexpr int kExitContextOverflow = 4;
inline constexpr int kExitRankOutOfRange = 5;
inline constexpr int kExitLengthMismatch = 6;
inline constexpr int kExitNondeterminismDetected = 7;

inline int exit_code_for_error(const Error& e) {
  if (dynamic_cast<const RetokenizationUnstable*>(&e) != nullptr) {
    return kExitRetokenizationUnstable;
  }
  if (dynamic_cast<const FingerprintMismatch*>(&e) != nullptr) {
    return kExitFingerprintMismatch;
  }
  if (dynamic_cast<const ContextOverflow*>(&e) != nullptr) {
    return kExitContextOverflow;
  }
  if (dynamic_cast<const RankOutOfRange*>(&e) != nullptr) {
    return kExitRankOutOfRange;
  }
  if (dynamic_cast<const LengthMismatch*>(&e) != nullptr) {
    return kExitLengthMismatch;
  }
  if (dynamic_cast<const NondeterminismDetected*>(&e) != nullptr) {
    return kExitNondeterminismDetected;
  }
  return kExitGenericError;
}

}  // namespace rankstego
