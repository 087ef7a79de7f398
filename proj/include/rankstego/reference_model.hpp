#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// The bundled reference model: a byte-level bigram language model.
//
// Vocabulary is exactly the 256 byte values, so tokenize/detokenize are the
// identity on bytes and every string round-trips.  With add-s smoothing the
// next-byte distribution after context byte `a` is
//
//     p(b | a) = (count(a, b) + s) / (count(a, *) + s * 256)
//
// and the empty context uses the corpus's unigram byte counts with the same
// smoothing.  Orderings depend only on integer counts (descending count,
// ascending byte value), which makes every ranking reproducible to the bit
// across platforms — the property the rank codec needs.  The model is tiny
// and deliberately weak as a language model; it exists so that the whole
// pipeline is testable end-to-end without inference hardware.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rankstego/model.hpp"

namespace rankstego {

class ReferenceBigramModel final : public Model {
 public:
  static constexpr std::size_t kVocabSize = 256;
  static constexpr std::size_t kDefaultWindow = 1 << 16;
  static constexpr double kDefaultSmoothing = 1.0;

  /// Trains counts from `corpus` (any byte string, may be empty).
  explicit ReferenceBigramModel(std::string corpus,
                                double smoothing = kDefaultSmoothing,
                                std::size_t window = kDefaultWindow);

  // Model interface ----------------------------------------------------------
  std::size_t vocab_size() const override { return kVocabSize; }
  std::size_t context_window() const override { return window_; }
  const ModelFingerprint& fingerprint() const override { return fingerprint_; }
  std::vector<TokenId> tokenize_raw(std::string_view text) const override;
  std::string detokenize_raw(std::span<const TokenId> tokens) const override;
  NextTokenRanking next_ranking(
      std::span<const TokenId> context) const override;

  // Introspection ------------------------------------------------------------
  double smoothing() const { return smoothing_; }
  std::uint64_t bigram_count(std::uint8_t a, std::uint8_t b) const {
    return bigram_[a][b];
  }
  std::uint64_t unigram_count(std::uint8_t b) const { return unigram_[b]; }

  // Persistence --------------------------------------------------------------
  /// Binary count-table format; see save() in reference_model.cpp for the
  /// layout.  Loading verifies the payload checksum and throws
  /// FingerprintMismatch on corruption.
  void save(const std::filesystem::path& path) const;
  static ReferenceBigramModel load(const std::filesystem::path& path,
                                   std::size_t window = kDefaultWindow);

 private:
  struct FromCounts {};  // tag for the deserializing constructor
  ReferenceBigramModel(FromCounts, double smoothing, std::size_t window);

  void finalize_tables();

  double smoothing_;
  std::size_t window_;
  std::array<std::array<std::uint64_t, kVocabSize>, kVocabSize> bigram_{};
  std::array<std::uint64_t, kVocabSize> unigram_{};
  ModelFingerprint fingerprint_;
  // rankings_[256] is the empty-context (unigram) ranking; rankings_[a] is
  // the ranking after last byte a.  Precomputed once: next_ranking is then a
  // read-only copy, safe for concurrent use.
  std::vector<NextTokenRanking> rankings_;
};

}  // namespace rankstego
