#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// Vocabulary bridging: carrying ranks from a large-vocabulary encoder
// through a smaller-vocabulary generator.
//
// A RemapPlan splits the decoder's rank space [1, v_dec] into
//
//     [1, L]            direct ranks — pass through unchanged,
//     [L+1, L+B]        a reserved block used as the alphabet of two-token
//                       codes for encoder ranks above L.
//
// An encoder rank r > L becomes the pair (L + hi, L + lo) where
// offset = r - (L+1), hi = offset / B, lo = offset % B.  The first token of
// a pair lands in the reserved block (hi >= 1), which is what tells the
// parser a pair starts; hi == 0 would put the first token at L, colliding
// with a direct rank, so those ranks (exactly [L+1, L+B]) are unrepresentable
// and raise RemapAmbiguity.
//
// B is chosen as ceil(sqrt(v_enc - v_dec)) + 1 and L = v_dec - B - 1, which
// keeps the reserved block tiny while covering the whole overflow range.

#include <cstdint>
#include <span>
#include <vector>

#include "rankstego/errors.hpp"
#include "rankstego/types.hpp"

namespace rankstego::bridge {

struct RemapPlan {
  std::uint32_t v_enc = 0;
  std::uint32_t v_dec = 0;
  /// L: largest rank that passes through unchanged.
  std::uint32_t direct_limit = 0;
  /// B: size of the reserved block (0 for identity plans).
  std::uint32_t block_size = 0;

  bool is_identity() const { return block_size == 0; }
  /// First / last rank of the reserved block (block plans only).
  std::uint32_t block_first() const { return direct_limit + 1; }
  std::uint32_t block_last() const { return direct_limit + block_size; }
};

/// Computes the remap plan for an encoder/decoder vocabulary pair.
/// v_enc <= v_dec yields the identity plan.  Throws Unbridgeable when no
/// plan exists (decoder vocabulary too small to host a block).
RemapPlan plan_remap(std::uint32_t v_enc, std::uint32_t v_dec);

/// Remaps one encoder rank to one or two decoder ranks.  Throws
/// RankOutOfRange for ranks outside [1, v_enc] and RemapAmbiguity for the
/// unrepresentable band [L+1, L+B].
std::vector<Rank> remap_rank(const RemapPlan& plan, Rank rank);

/// Remaps a whole stream (concatenation of per-rank codes).
std::vector<Rank> remap_stream(const RemapPlan& plan,
                               std::span<const Rank> ranks);

/// Exact inverse of remap_stream.  Throws TruncatedCode when the stream ends
/// inside a pair and MalformedDigit on digit tokens outside the digit range
/// or codes that decode outside [1, v_enc].
std::vector<Rank> unremap_stream(const RemapPlan& plan,
                                 std::span<const Rank> ranks);

}  // namespace rankstego::bridge
