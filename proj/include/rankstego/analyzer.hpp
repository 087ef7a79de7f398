#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// Detection-side instrumentation: everything an analyst (or a test) needs to
// ask "does this text look like it came from the model?".
//
// Scores are natural-log probabilities, summed per token under a walking
// context, so they are exactly additive: score(a ++ b following a) =
// score(a) + score(b after a).  All statistics are computed with exact
// counts and nearest-rank percentiles — no interpolation — so results are
// reproducible to the bit on every platform.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rankstego/codec.hpp"
#include "rankstego/model.hpp"
#include "rankstego/types.hpp"

namespace rankstego::analyzer {

struct PlausibilityScore {
  /// Sum over tokens of ln p(token | context so far).  0 for empty input.
  double log_prob = 0.0;
  std::size_t token_count = 0;
  ModelFingerprint fingerprint;
};

/// Log-probability of `tokens` continuing `context`.
PlausibilityScore score(const Model& model, std::span<const TokenId> tokens,
                        std::span<const TokenId> context = {});

/// Distribution of ranks over a corpus: exact counts for ranks 1..100, then
/// doubling buckets up to the vocabulary size, plus the mean model
/// probability observed at each of the top three ranks.
struct RankHistogram {
  static constexpr Rank kExactLimit = 100;

  struct Bucket {
    Rank lo = 0, hi = 0;  // inclusive span
    std::uint64_t count = 0;
  };

  std::vector<std::uint64_t> exact;  // index by rank, 1..kExactLimit; [0] unused
  std::vector<Bucket> buckets;       // (100,200], (200,400], ... up to vocab
  std::uint64_t total = 0;
  std::array<double, 3> mean_prob_top{};  // mean probability at ranks 1, 2, 3

  /// Fraction of all observed ranks equal to r (r <= kExactLimit).
  double share(Rank r) const {
    return total == 0 ? 0.0
                      : static_cast<double>(exact.at(r)) /
                            static_cast<double>(total);
  }
};

RankHistogram rank_histogram(const Model& model,
                             const std::vector<std::vector<TokenId>>& corpus,
                             std::span<const TokenId> context = {});

/// Per-position rank statistics over a corpus of equal-length sequences.
/// Percentiles are nearest-rank (index ceil(q*n), 1-based); p20/p80 are the
/// whisker span, p25/p75 the box.
struct PositionalRankProfile {
  struct PositionStats {
    Rank p20 = 0, p25 = 0, median = 0, p75 = 0, p80 = 0;
    double mean = 0.0;
  };
  std::vector<PositionStats> positions;
  std::size_t sample_count = 0;
};

/// Throws LengthMismatch unless every sequence has the same token count.
PositionalRankProfile positional_profile(
    const Model& model, const std::vector<std::vector<TokenId>>& corpus,
    std::span<const TokenId> context = {});

/// Picks the most model-plausible candidate.  Candidates must have equal
/// token counts (LengthMismatch) and there must be at least two (Error).
/// Ties go to the earliest candidate.
struct DistinguishResult {
  std::size_t best_index = 0;
  std::vector<PlausibilityScore> scores;
};

DistinguishResult distinguish(const Model& model,
                              const std::vector<std::vector<TokenId>>& candidates,
                              std::span<const TokenId> context = {});

// --- corpus report ----------------------------------------------------------

struct ReportRow {
  std::string id;
  std::string role;    // "real" | "stego" | "baseline"
  std::string key_id;  // "-" unless the row is a stego encoding
  std::size_t token_count = 0;
  double log_prob = 0.0;
  /// Score under the optional second model (cross-model comparison).
  std::optional<double> log_prob_alt;
};

struct RoleSummary {
  std::string role;
  std::size_t count = 0;
  double min = 0, p5 = 0, p25 = 0, median = 0, p75 = 0, p95 = 0, max = 0,
         mean = 0;
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<RoleSummary> summaries;
};

struct ReportOptions {
  /// Seed for baseline sampling; fixed default keeps reports reproducible.
  std::uint64_t seed = 0;
  std::size_t ascii_baselines = 20;
  std::size_t word_baselines = 20;
  /// Words for the word-salad baseline; required when word_baselines > 0.
  std::vector<std::string> word_list;
  /// Optional second scorer; adds the log_prob_alt column.
  const Model* alt_scorer = nullptr;
  /// Worker threads for scoring; results are merged by row order, so the
  /// report is identical for every jobs value.
  unsigned jobs = 1;
};

/// Scores real texts (all pre-truncated to one common token count), stego
/// encodings of the originals selected by `original_indices` under every
/// key, and random baselines of the same token length.  Row order is fixed:
/// reals, then stegos (original-major, key-minor), then ASCII baselines,
/// then word baselines.
Report corpus_report(const Model& model,
                     const std::vector<std::string>& real_texts,
                     const std::vector<std::size_t>& original_indices,
                     const std::vector<codec::StegoKey>& keys,
                     const ReportOptions& opts = {});

/// Cuts `text` to exactly `n` tokens under `model` (helper for preparing
/// equal-length report corpora).  Throws LengthMismatch if text is shorter.
std::string truncate_to_token_count(const Model& model, std::string_view text,
                                    std::size_t n);

}  // namespace rankstego::analyzer
