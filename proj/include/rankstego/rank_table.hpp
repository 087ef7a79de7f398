#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// Rank-frequency tables: how often each rank occurs in a corpus of rank
// streams.  Tables drive the arithmetic recoder, which converts a rank
// stream that is cheap under one model's rank distribution into a stream
// that is cheap under another's.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rankstego/model.hpp"
#include "rankstego/types.hpp"

namespace rankstego::bridge {

/// Occurrence counts per rank, 1-based; counts[0] is unused.  Every rank in
/// [1, max_rank] has a strictly positive count (tables are built with add-1
/// smoothing), so the recoder can represent any rank.
struct RankFrequencyTable {
  std::uint32_t max_rank = 0;
  std::vector<std::uint64_t> counts;  // size max_rank + 1
  std::uint64_t total = 0;            // sum of counts[1..max_rank]

  /// Throws Error on structural violations (zero counts, bad total, ...).
  void validate() const;

  static RankFrequencyTable uniform(std::uint32_t max_rank,
                                    std::uint64_t count_each = 1);
  /// counts_1based[0] corresponds to rank 1.
  static RankFrequencyTable from_counts(
      const std::vector<std::uint64_t>& counts_1based);
};

/// Counts ranks over `corpus` (each entry one token sequence), extracting
/// each sequence's ranks after the fixed `context`.  Starts every rank at
/// count 1 so unseen ranks stay representable.  Throws Error on an empty
/// corpus.
RankFrequencyTable build_rank_table(
    const Model& model, const std::vector<std::vector<TokenId>>& corpus,
    std::span<const TokenId> context);

/// Binary table file (magic "RSRT"); see rank_table.cpp for the layout.
void write_rank_table(const RankFrequencyTable& table,
                      const std::filesystem::path& path);
RankFrequencyTable read_rank_table(const std::filesystem::path& path);

}  // namespace rankstego::bridge
