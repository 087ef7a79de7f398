#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// Arithmetic recoding between rank distributions.
//
// Remapping handles vocabulary *size* mismatches; recoding handles
// *distribution* mismatches: a rank stream that is cheap (low-rank-heavy)
// under the source model is first compressed to a bit string with an
// arithmetic coder driven by the source rank-frequency table, then that bit
// string is embedded as a rank stream that is cheap under the destination
// table.  Both halves use exact rational interval arithmetic on big
// integers — no finite-precision renormalization — so recode followed by
// recode_inverse reproduces the source stream bit-for-bit, for every input.
//
// Framing: the source stream is terminated with a dedicated end-of-stream
// symbol (probability 1/(total+1)), so the inverse needs no out-of-band
// length.  The destination side carries a minimal dyadic interval
// — ceil(log2(2/width)) bits — which costs at most 2 bits over the
// information content of the source stream plus the end marker.

#include <cstdint>
#include <span>
#include <vector>

#include "rankstego/rank_table.hpp"
#include "rankstego/types.hpp"

namespace rankstego::bridge {

/// Recodes `src_ranks` (ranks under `src`) into a rank stream under `dst`.
/// Requires dst.max_rank >= 2 (a one-symbol alphabet cannot carry
/// information).  Throws RankOutOfRange if a source rank exceeds the source
/// table.
std::vector<Rank> arithmetic_recode(std::span<const Rank> src_ranks,
                                    const RankFrequencyTable& src,
                                    const RankFrequencyTable& dst);

/// Exact inverse of arithmetic_recode (same table pair, same order).
/// Throws Error if the stream is not a recoder output for these tables.
std::vector<Rank> arithmetic_recode_inverse(std::span<const Rank> dst_ranks,
                                            const RankFrequencyTable& src,
                                            const RankFrequencyTable& dst);

namespace detail {

/// First half: source ranks + end marker -> minimal dyadic interval, as
/// MSB-first bits of its left endpoint (the count of bits is the dyadic
/// exponent).  Exposed so tests can check the two halves independently.
std::vector<bool> encode_to_bits(std::span<const Rank> src_ranks,
                                 const RankFrequencyTable& src);

/// Inverse of encode_to_bits: reads symbols by interval containment until
/// the end marker.
std::vector<Rank> decode_bits(const std::vector<bool>& bits,
                              const RankFrequencyTable& src);

/// Second half: embeds the dyadic interval into a destination rank stream —
/// emits symbols along the interval containing the dyadic midpoint until the
/// coder interval lies inside the dyadic interval.
std::vector<Rank> embed_bits(const std::vector<bool>& bits,
                             const RankFrequencyTable& dst);

}  // namespace detail

}  // namespace rankstego::bridge
