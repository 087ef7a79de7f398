#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// Error hierarchy for the rankstego library.
//
// Every failure the library can signal derives from rankstego::Error, so
// callers that only care about "it failed" can catch one type, while the CLI
// and tests can discriminate on the concrete class.  Error messages never
// contain key material.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rankstego {

/// Root of the library's exception hierarchy.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A native inference backend was requested but is not compiled in /
/// reachable on this machine.
struct BackendUnavailable : Error {
  using Error::Error;
};

/// Text could not be tokenized by the active model.
struct EncodingError : Error {
  using Error::Error;
};

/// A key, stegotext, or serialized artifact was produced under a different
/// model (or the model file failed its integrity check).
struct FingerprintMismatch : Error {
  using Error::Error;
};

/// Context plus message no longer fit into the model's context window.
struct ContextOverflow : Error {
  using Error::Error;
};

/// The same context produced two different next-token rankings.  A model
/// that does this cannot be used for rank coding.
struct NondeterminismDetected : Error {
  using Error::Error;
};

/// A token id outside the model's vocabulary.
struct TokenOutOfRange : Error {
  using Error::Error;
};

/// A rank outside [1, vocab_size] — e.g. a rank from a larger-vocabulary
/// encoder that reached a smaller-vocabulary generator without bridging.
struct RankOutOfRange : Error {
  using Error::Error;
};

/// A stego key that violates its own invariants (empty secret prompt, bad
/// pad length, ...).
struct InvalidKey : Error {
  using Error::Error;
};

/// Inputs that were required to have equal token counts did not.
struct LengthMismatch : Error {
  using Error::Error;
};

/// Emitted stegotext did not survive detokenize -> tokenize unchanged, so a
/// receiver of the text form would decode garbage.  `first_mismatch` is the
/// index of the first token position that came back different.
struct RetokenizationUnstable : Error {
  std::size_t first_mismatch;
  RetokenizationUnstable(const std::string& what, std::size_t pos)
      : Error(what), first_mismatch(pos) {}
};

/// The encoder/decoder vocabulary pair admits no remap plan at all.
struct Unbridgeable : Error {
  using Error::Error;
};

/// A rank that falls into the reserved block of a remap plan: its two-token
/// code would collide with the code for a direct rank, so the encoder-side
/// stream cannot be represented.
struct RemapAmbiguity : Error {
  using Error::Error;
};

/// A remapped stream ended in the middle of a two-token code.
struct TruncatedCode : Error {
  using Error::Error;
};

/// A two-token code whose digit token is outside the digit range, or a
/// remapped rank that decodes outside the encoder vocabulary.
struct MalformedDigit : Error {
  using Error::Error;
};

/// A serialized artifact (model file, key file, envelope, rank table, ...)
/// that does not parse under its format.
struct FileFormatError : Error {
  using Error::Error;
};

}  // namespace rankstego
