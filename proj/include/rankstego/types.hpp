#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// Core value types shared by every module.
//
// Ranks are 1-based everywhere: rank 1 is the model's most probable next
// token under the current context.  A NextTokenRanking is a total order over
// the whole vocabulary — ties in probability are broken by ascending token
// id, so the order is a pure function of the model's output and never
// depends on sort implementation details.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rankstego/digest.hpp"
#include "rankstego/errors.hpp"

namespace rankstego {

using TokenId = std::uint32_t;
/// 1-based rank of a token within a NextTokenRanking.
using Rank = std::uint32_t;

/// A tokenized text, pinned to the model that tokenized it.
struct TokenSequence {
  std::vector<TokenId> tokens;
  ModelFingerprint fingerprint;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

/// The model's next-token distribution under one fixed context, as a total
/// order plus probabilities.
///
/// Invariants (see validate()):
///   * `ordering` is a permutation of [0, V): ordering[0] is the most
///     probable token, ties broken by ascending token id;
///   * `probs[t]` is the probability of token id t; all probabilities are
///     finite, non-negative, and sum to 1 within 1e-6;
///   * `rank_by_token[t]` is the 1-based rank of token id t and is the exact
///     inverse of `ordering`.
struct NextTokenRanking {
  std::vector<TokenId> ordering;
  std::vector<double> probs;
  std::vector<Rank> rank_by_token;

  std::size_t vocab_size() const { return ordering.size(); }

  /// Builds a ranking from a dense probability vector (index = token id).
  /// Sorts by descending probability, ties by ascending id.
  static NextTokenRanking from_probs(std::vector<double> probs);

  /// Throws Error if any invariant is violated.
  void validate() const;
};

/// 1-based rank of `token` in `ranking`.  Throws TokenOutOfRange.
Rank rank_of(const NextTokenRanking& ranking, TokenId token);

/// Token occupying 1-based `rank`.  Throws RankOutOfRange; the message for
/// ranks above the vocabulary size points at vocabulary bridging, since that
/// is how such ranks arise in practice.
TokenId token_at_rank(const NextTokenRanking& ranking, Rank rank);

/// Adapter for logit-producing backends: stable softmax (max subtracted
/// before exponentiation), then the same ordering rule as from_probs.
NextTokenRanking ranking_from_logits(std::span<const double> logits);

}  // namespace rankstego
