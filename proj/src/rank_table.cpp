// SPDX-License-Identifier: Apache-2.0

#include "rankstego/rank_table.hpp"

#include <cstring>
#include <fstream>
#include <string>

#include "rankstego/codec.hpp"
#include "rankstego/errors.hpp"

namespace rankstego::bridge {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'R', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void put_u64le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

void RankFrequencyTable::validate() const {
  if (max_rank == 0) throw Error("rank table: empty rank space");
  if (counts.size() != std::size_t{max_rank} + 1) {
    throw Error("rank table: counts size does not match max_rank");
  }
  std::uint64_t sum = 0;
  for (std::uint32_t r = 1; r <= max_rank; ++r) {
    if (counts[r] == 0) {
      throw Error("rank table: rank " + std::to_string(r) +
                  " has zero count; every rank must stay representable");
    }
    sum += counts[r];
  }
  if (sum != total) throw Error("rank table: total does not match counts");
}

RankFrequencyTable RankFrequencyTable::uniform(std::uint32_t max_rank,
                                               std::uint64_t count_each) {
  RankFrequencyTable t;
  t.max_rank = max_rank;
  t.counts.assign(std::size_t{max_rank} + 1, count_each);
  t.counts[0] = 0;
  t.total = std::uint64_t{max_rank} * count_each;
  t.validate();
  return t;
}

RankFrequencyTable RankFrequencyTable::from_counts(
    const std::vector<std::uint64_t>& counts_1based) {
  RankFrequencyTable t;
  t.max_rank = static_cast<std::uint32_t>(counts_1based.size());
  t.counts.assign(std::size_t{t.max_rank} + 1, 0);
  for (std::size_t i = 0; i < counts_1based.size(); ++i) {
    t.counts[i + 1] = counts_1based[i];
    t.total += counts_1based[i];
  }
  t.validate();
  return t;
}

RankFrequencyTable build_rank_table(
    const Model& model, const std::vector<std::vector<TokenId>>& corpus,
    std::span<const TokenId> context) {
  if (corpus.empty()) {
    throw Error("rank table: corpus must be non-empty");
  }
  RankFrequencyTable t;
  t.max_rank = static_cast<std::uint32_t>(model.vocab_size());
  // Add-1 smoothing: every rank representable even if unseen.
  t.counts.assign(std::size_t{t.max_rank} + 1, 1);
  t.counts[0] = 0;
  for (const auto& seq : corpus) {
    const auto ranks = codec::extract_ranks(model, seq, context);
    for (Rank r : ranks.ranks) t.counts[r] += 1;
  }
  t.total = 0;
  for (std::uint32_t r = 1; r <= t.max_rank; ++r) t.total += t.counts[r];
  t.validate();
  return t;
}

// File layout (little-endian):
//   magic "RSRT" | u32 format_version | u32 max_rank | u64 entry_count
//   | entries: (u32 rank, u64 count), sorted by ascending rank.
// Only ranks with count != 1 are stored; absent ranks default to the add-1
// floor, which keeps tables for large vocabularies small.
void write_rank_table(const RankFrequencyTable& table,
                      const std::filesystem::path& path) {
  table.validate();
  std::string body;
  std::uint64_t entries = 0;
  for (std::uint32_t r = 1; r <= table.max_rank; ++r) {
    if (table.counts[r] == 1) continue;
    put_u32le(body, r);
    put_u64le(body, table.counts[r]);
    ++entries;
  }
  std::string head;
  head.append(kMagic, sizeof kMagic);
  put_u32le(head, kFormatVersion);
  put_u32le(head, table.max_rank);
  put_u64le(head, entries);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open rank table for writing: " + path.string());
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw Error("failed writing rank table: " + path.string());
}

RankFrequencyTable read_rank_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open rank table: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = 4 + 4 + 4 + 8;
  if (bytes.size() < kHeader ||
      std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw FileFormatError("not a rank table file: " + path.string());
  }
  const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data());
  if (get_u32le(p + 4) != kFormatVersion) {
    throw FileFormatError("unsupported rank table version in " + path.string());
  }
  const std::uint32_t max_rank = get_u32le(p + 8);
  const std::uint64_t entries = get_u64le(p + 12);
  if (max_rank == 0 || bytes.size() != kHeader + entries * 12) {
    throw FileFormatError("rank table has inconsistent sizes: " +
                          path.string());
  }
  RankFrequencyTable t;
  t.max_rank = max_rank;
  t.counts.assign(std::size_t{max_rank} + 1, 1);
  t.counts[0] = 0;
  const std::uint8_t* q = p + kHeader;
  std::uint32_t prev = 0;
  for (std::uint64_t i = 0; i < entries; ++i, q += 12) {
    const std::uint32_t rank = get_u32le(q);
    const std::uint64_t count = get_u64le(q + 4);
    if (rank <= prev || rank > max_rank || count == 0) {
      throw FileFormatError("rank table entries must be sorted, unique, in "
                            "range, and positive: " +
                            path.string());
    }
    t.counts[rank] = count;
    prev = rank;
  }
  t.total = 0;
  for (std::uint32_t r = 1; r <= max_rank; ++r) t.total += t.counts[r];
  t.validate();
  return t;
}

}  // namespace rankstego::bridge
