#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// The rank codec: hides a message in model-plausible text.
//
// Encoding pipeline:
//   1. tokenize the plaintext e;
//   2. pad it with `pad_len` greedy continuations (rank-1 tokens) so the
//      tail of the cover text trails off naturally;
//   3. extract the 1-based rank of each message token under the ranking
//      context (bos? + k'), walking the context forward one token at a time;
//   4. re-spend those ranks under the secret context (bos? + k): each rank
//      selects the token at that rank, which is appended and becomes part of
//      the context for the next step.
//
// Decoding runs the same two walks with the roles of the contexts swapped,
// then drops the pad.  Both directions consume one rank per token, so
// |stego tokens| == |message tokens| + pad_len — full rank capacity, no
// framing overhead.
//
// Everything is deterministic given (model, key), which is exactly why the
// model interface insists on bit-stable rankings.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankstego/model.hpp"
#include "rankstego/types.hpp"

namespace rankstego::codec {

/// Whether contexts start with the model's beginning-of-sequence token.
enum class BosPolicy { kNone, kPrepend };

inline constexpr std::uint32_t kDefaultPadLen = 5;

/// Everything two parties must share to exchange stegotext.
struct StegoKey {
  /// Secret prompt: the context under which stegotext is generated/read.
  std::string k;
  /// Optional public ranking context for the message side.  When absent the
  /// message is ranked under the empty context (plus BOS, if any).
  std::optional<std::string> k_prime;
  std::uint32_t pad_len = kDefaultPadLen;
  BosPolicy bos_policy = BosPolicy::kNone;
  /// Ship token ids instead of text (sidesteps retokenization entirely).
  bool token_transport = false;
  /// Permit an empty secret prompt.  Off by default: an empty k gives a
  /// public ranking context and hides nothing.
  bool allow_empty_k = false;
  /// Model the key was created for; checked before any coding.
  ModelFingerprint fingerprint;
};

/// Output of encode / input of decode.
struct StegoText {
  /// Text form (the detokenized stego tokens).
  std::string text;
  /// Token form; authoritative when the key says token_transport.
  std::vector<TokenId> tokens;
  ModelFingerprint fingerprint;

  std::size_t token_count() const { return tokens.size(); }
};

/// A stream of extracted ranks, pinned to the model that produced it.
struct RankSequence {
  std::vector<Rank> ranks;
  ModelFingerprint fingerprint;

  std::size_t size() const { return ranks.size(); }
};

struct EncodeStats {
  double mean_rank = 0.0;
  Rank max_rank = 0;
};

/// Builds the ranking context for one side of the codec: BOS (if the policy
/// asks for one) followed by the tokenized prompt.  `secret_side` selects k;
/// otherwise k' (absent k' yields just the BOS/empty context).  This is the
/// single funnel both encode and decode use, so the two sides can never
/// disagree on context construction.
std::vector<TokenId> build_context(const Model& model, const StegoKey& key,
                                   bool secret_side);

/// Rank of each message token under the walking context.  Inverse of
/// emit_by_ranks.  Throws ContextOverflow if |context|+|message| exceeds the
/// model window, TokenOutOfRange on foreign token ids.
RankSequence extract_ranks(const Model& model,
                           std::span<const TokenId> message,
                           std::span<const TokenId> context);

/// Token selected by each rank under the walking context.  Inverse of
/// extract_ranks.  Throws RankOutOfRange on ranks outside [1, vocab].
std::vector<TokenId> emit_by_ranks(const Model& model,
                                   std::span<const Rank> ranks,
                                   std::span<const TokenId> context);

/// Appends `pad_len` greedy (rank-1) continuations of context+message.
std::vector<TokenId> pad_message(const Model& model,
                                 std::span<const TokenId> message,
                                 std::span<const TokenId> context,
                                 std::uint32_t pad_len);

/// plaintext -> stegotext under `key`.  Optional `stats` reports the rank
/// load (useful for warning when a weak context forces high ranks).  Throws
/// RetokenizationUnstable if text transport would not survive a
/// detokenize/tokenize round-trip.
StegoText encode(const Model& model, std::string_view plaintext,
                 const StegoKey& key, EncodeStats* stats = nullptr);

/// stegotext -> plaintext.  Exact inverse of encode under the same key.  A
/// wrong key yields *some* well-formed plaintext, never an error — the codec
/// itself cannot tell keys apart.
std::string decode(const Model& model, const StegoText& stego,
                   const StegoKey& key);

}  // namespace rankstego::codec
