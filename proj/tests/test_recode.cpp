// SPDX-License-Identifier: Apache-2.0
//
// Arithmetic recoder tests.  The library represents intervals as unreduced
// big-integer fractions; the oracle recomputes them with cpp_rational, a
// different representation, so agreement is meaningful.  The tiny pins were
// derived by hand (see oracle.hpp).

#include <doctest.h>

#include <cstdint>
#include <vector>

#include "oracle.hpp"
#include "rankstego/errors.hpp"
#include "rankstego/rank_table.hpp"
#include "rankstego/recode.hpp"
#include "rankstego/reference_model.hpp"
#include "rankstego/rng.hpp"
#include "test_helpers.hpp"

using namespace rankstego;
using bridge::arithmetic_recode;
using bridge::arithmetic_recode_inverse;
using bridge::RankFrequencyTable;

namespace {

RankFrequencyTable random_table(SplitMix64& rng, std::uint32_t min_ranks = 2) {
  const std::uint32_t max_rank =
      min_ranks + static_cast<std::uint32_t>(rng.below(7));
  std::vector<std::uint64_t> counts;
  for (std::uint32_t r = 0; r < max_rank; ++r) {
    counts.push_back(1 + rng.below(50));
  }
  return RankFrequencyTable::from_counts(counts);
}

std::vector<Rank> random_stream(SplitMix64& rng, const RankFrequencyTable& t,
                                std::size_t max_len = 40) {
  std::vector<Rank> out;
  for (std::size_t i = 0, n = rng.below(max_len + 1); i < n; ++i) {
    out.push_back(1 + static_cast<Rank>(rng.below(t.max_rank)));
  }
  return out;
}

std::vector<std::uint32_t> to_u32(const std::vector<Rank>& v) {
  return std::vector<std::uint32_t>(v.begin(), v.end());
}

}  // namespace

TEST_CASE("the tiny recode pin holds in both halves and end to end") {
  const auto uni2 = RankFrequencyTable::uniform(2);
  const std::vector<Rank> src = {1};

  const auto bits = bridge::detail::encode_to_bits(src, uni2);
  CHECK(bits == oracle::kTinyRecodeBits);

  const auto emitted = bridge::detail::embed_bits(bits, uni2);
  CHECK(to_u32(emitted) == oracle::kTinyRecodeOut);

  const auto out = arithmetic_recode(src, uni2, uni2);
  CHECK(to_u32(out) == oracle::kTinyRecodeOut);
  CHECK(arithmetic_recode_inverse(out, uni2, uni2) == src);

  // Decode of the bits alone also recovers the stream.
  CHECK(bridge::detail::decode_bits(bits, uni2) == src);

  // Cross-check the hand-derived intervals with the rational oracle.
  const auto src_iv = oracle::interval_of({1}, {0, 1, 1}, true);
  CHECK(src_iv.lo == oracle::Rational(3, 9));
  CHECK(src_iv.hi == oracle::Rational(4, 9));
  const auto dyadic = oracle::dyadic_of(bits);
  CHECK(dyadic.lo == oracle::Rational(11, 32));
  CHECK(src_iv.contains(dyadic));
  const auto dst_iv = oracle::interval_of(oracle::kTinyRecodeOut, {0, 1, 1},
                                          /*with_end_marker=*/false);
  CHECK(dyadic.contains(dst_iv));
}

TEST_CASE("recode round-trips exactly over random tables and streams") {
  SplitMix64 rng(0x7ec0de);
  for (int trial = 0; trial < 300; ++trial) {
    auto src_table = random_table(rng);
    auto dst_table = random_table(rng);
    const auto stream = random_stream(rng, src_table);
    const auto coded = arithmetic_recode(stream, src_table, dst_table);
    const auto back = arithmetic_recode_inverse(coded, src_table, dst_table);
    REQUIRE(back == stream);
    for (Rank r : coded) {
      CHECK(r >= 1);
      CHECK(r <= dst_table.max_rank);
    }
  }
}

TEST_CASE("decode_bits inverts encode_to_bits") {
  SplitMix64 rng(0xb175);
  for (int trial = 0; trial < 200; ++trial) {
    auto table = random_table(rng);
    const auto stream = random_stream(rng, table);
    const auto bits = bridge::detail::encode_to_bits(stream, table);
    CHECK(bridge::detail::decode_bits(bits, table) == stream);
  }
}

TEST_CASE("both halves respect exact interval containment") {
  SplitMix64 rng(0x1e7a);
  for (int trial = 0; trial < 60; ++trial) {
    auto src_table = random_table(rng);
    auto dst_table = random_table(rng);
    const auto stream = random_stream(rng, src_table, 15);

    const auto bits = bridge::detail::encode_to_bits(stream, src_table);
    const auto coded = bridge::detail::embed_bits(bits, dst_table);

    std::vector<std::uint64_t> src_counts(src_table.counts.begin(),
                                          src_table.counts.end());
    std::vector<std::uint64_t> dst_counts(dst_table.counts.begin(),
                                          dst_table.counts.end());

    // Dyadic cell nests inside the source coder interval...
    const auto src_iv = oracle::interval_of(to_u32(stream), src_counts, true);
    const auto dyadic = oracle::dyadic_of(bits);
    CHECK(src_iv.contains(dyadic));
    // ...and the emitted destination interval nests inside the dyadic cell.
    const auto dst_iv =
        oracle::interval_of(to_u32(coded), dst_counts, false);
    CHECK(dyadic.contains(dst_iv));
  }
}

TEST_CASE("bit counts stay near the information content") {
  // Uniform 4-rank source with heavy counts: 2 bits per symbol plus the end
  // marker's ~18 bits plus the dyadic rounding slack of at most 2 bits.
  const auto src = RankFrequencyTable::uniform(4, 1 << 16);
  std::vector<Rank> stream;
  for (int i = 0; i < 256; ++i) stream.push_back(1 + (i % 4));
  const auto bits = bridge::detail::encode_to_bits(stream, src);
  CHECK(bits.size() >= 2 * 256);
  CHECK(bits.size() <= 2 * 256 + 24);
}

TEST_CASE("recoding between uniform alphabets doubles or halves length") {
  // Heavy counts keep the end marker's share negligible, so the per-symbol
  // information is 2 bits (four ranks) and 1 bit (two ranks) almost exactly.
  const auto four = RankFrequencyTable::uniform(4, 1 << 16);
  const auto two = RankFrequencyTable::uniform(2, 1 << 16);
  std::vector<Rank> stream;
  for (int i = 0; i < 256; ++i) stream.push_back(1 + (i % 4));

  const auto down = arithmetic_recode(stream, four, two);
  CHECK(down.size() >= 2 * stream.size() - 8);
  CHECK(down.size() <= 2 * stream.size() + 64);
  CHECK(arithmetic_recode_inverse(down, four, two) == stream);

  // The reverse direction packs two binary symbols per quaternary one.
  std::vector<Rank> bits_stream;
  for (int i = 0; i < 256; ++i) bits_stream.push_back(1 + (i % 2));
  const auto up = arithmetic_recode(bits_stream, two, four);
  CHECK(up.size() <= bits_stream.size() / 2 + 24);
  CHECK(arithmetic_recode_inverse(up, two, four) == bits_stream);
}

TEST_CASE("skewed tables still round-trip") {
  // 99.9%-of-mass rank 1 in the source; a lopsided destination.
  const auto src = RankFrequencyTable::from_counts({9990, 5, 5});
  const auto dst = RankFrequencyTable::from_counts({5, 95});
  std::vector<Rank> stream(64, 1);
  stream[10] = 3;
  stream[40] = 2;
  const auto coded = arithmetic_recode(stream, src, dst);
  CHECK(arithmetic_recode_inverse(coded, src, dst) == stream);
  // A low-entropy source stream under a matching table codes tightly.
  CHECK(coded.size() < 4096);
}

TEST_CASE("empty source streams carry only the end marker") {
  const auto uni = RankFrequencyTable::uniform(3);
  const std::vector<Rank> empty;
  const auto coded = arithmetic_recode(empty, uni, uni);
  CHECK(!coded.empty());  // the end marker still needs bits
  CHECK(arithmetic_recode_inverse(coded, uni, uni).empty());
}

TEST_CASE("recode rejects invalid inputs") {
  const auto uni2 = RankFrequencyTable::uniform(2);
  const auto uni1 = RankFrequencyTable::uniform(1);
  const std::vector<Rank> ok = {1};
  const std::vector<Rank> zero = {0};
  const std::vector<Rank> high = {3};

  // Destination must be able to carry information.
  CHECK_THROWS_AS(arithmetic_recode(ok, uni2, uni1), Error);
  // Source ranks must be inside the source table.
  CHECK_THROWS_AS(arithmetic_recode(zero, uni2, uni2), RankOutOfRange);
  CHECK_THROWS_AS(arithmetic_recode(high, uni2, uni2), RankOutOfRange);
  // Inverse rejects destination ranks outside the destination table.
  CHECK_THROWS_AS(arithmetic_recode_inverse(high, uni2, uni2), RankOutOfRange);
  // Streams that are not recoder outputs are detected, not misdecoded.
  CHECK_THROWS_AS(arithmetic_recode_inverse(ok, uni2, uni2), Error);
  CHECK_THROWS_AS(bridge::detail::decode_bits({}, uni2), Error);
}

TEST_CASE("rank tables validate their structure") {
  CHECK_THROWS_AS(RankFrequencyTable{}.validate(), Error);
  CHECK_THROWS_AS(RankFrequencyTable::from_counts({1, 0, 3}), Error);
  auto t = RankFrequencyTable::uniform(4, 2);
  CHECK(t.total == 8);
  t.total = 9;
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("tables built from a model corpus use add-1 smoothing") {
  ReferenceBigramModel model("ABABAB");
  const std::vector<std::vector<TokenId>> corpus = {
      testutil::bytes_to_tokens("BABA")};
  const auto table = bridge::build_rank_table(model, corpus, {});
  CHECK(table.max_rank == 256);
  // Extracted ranks are {2,1,1,1}; every other rank keeps the add-1 floor.
  CHECK(table.counts[1] == 1 + 3);
  CHECK(table.counts[2] == 1 + 1);
  CHECK(table.counts[3] == 1);
  CHECK(table.total == 256 + 4);
  CHECK_THROWS_AS(bridge::build_rank_table(model, {}, {}), Error);
}
