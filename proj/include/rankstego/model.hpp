#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// The model abstraction every other module codes against.
//
// A Model is anything that can (a) tokenize and detokenize text and (b)
// produce a deterministic next-token ranking for a context.  The rank codec
// never looks past this interface, so the bundled byte-bigram reference
// model and a native inference backend are interchangeable as long as their
// rankings are bit-stable.
//
// Determinism is load-bearing: encode and decode replay the exact same
// ranking queries, so a model whose rankings wobble between calls corrupts
// round-trips.  Session runs a probe at construction to catch that early.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "rankstego/digest.hpp"
#include "rankstego/types.hpp"

namespace rankstego {

class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t vocab_size() const = 0;

  /// Maximum context length (in tokens) next_ranking accepts.
  virtual std::size_t context_window() const = 0;

  /// Stable identity of weights + tokenizer + format version.
  virtual const ModelFingerprint& fingerprint() const = 0;

  /// Beginning-of-sequence token, if the model defines one.
  virtual std::optional<TokenId> bos_token() const { return std::nullopt; }

  /// Text -> token ids.  Throws EncodingError if the text cannot be
  /// represented.
  virtual std::vector<TokenId> tokenize_raw(std::string_view text) const = 0;

  /// Token ids -> text.  Throws TokenOutOfRange on ids outside the
  /// vocabulary.
  virtual std::string detokenize_raw(std::span<const TokenId> tokens) const = 0;

  /// Next-token ranking after `context`.  Throws ContextOverflow when the
  /// context exceeds context_window().  Must be a pure function of the
  /// context: two calls with equal contexts return bit-identical rankings.
  virtual NextTokenRanking next_ranking(
      std::span<const TokenId> context) const = 0;

  // --- fingerprint-carrying conveniences -----------------------------------

  TokenSequence tokenize(std::string_view text) const {
    return TokenSequence{tokenize_raw(text), fingerprint()};
  }

  /// Verifies the sequence was tokenized by this model, then detokenizes.
  /// Throws FingerprintMismatch otherwise.
  std::string detokenize(const TokenSequence& seq) const;
};

/// Throws FingerprintMismatch unless `expected` is null or equals the
/// model's fingerprint.  `what` names the artifact in the error message.
void check_fingerprint(const Model& model, const ModelFingerprint& expected,
                       const char* what);

/// A handle on a model that has passed the determinism probe.  Holding a
/// Session is the library's way of saying "this model is safe to code
/// against right now".
class Session {
 public:
  explicit Session(std::shared_ptr<const Model> model, bool run_probe = true);

  const Model& model() const { return *model_; }
  std::shared_ptr<const Model> model_ptr() const { return model_; }

  /// Evaluates a fixed probe context twice and compares the rankings
  /// bit-for-bit (ordering and probabilities).  Throws
  /// NondeterminismDetected on any difference.
  static void determinism_probe(const Model& model);

  /// Digest over the probe ranking — equal digests across runs/processes
  /// demonstrate reproducibility.
  static Digest probe_digest(const Model& model);

 private:
  std::shared_ptr<const Model> model_;
};

/// Configuration for a native inference backend.
struct BackendConfig {
  std::string weights_path;
  /// Free-form backend options (quantization, device, ...).
  std::string options;
};

/// Loads a native backend model.  This build ships no GPU/accelerator
/// backend, so the call always throws BackendUnavailable; it exists so that
/// callers (CLI, tests) exercise the failure path they would hit on a
/// machine without the backend installed.
std::shared_ptr<const Model> load_backend_model(const BackendConfig& config);

}  // namespace rankstego
