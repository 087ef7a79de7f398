// SPDX-License-Identifier: Apache-2.0
//
// Vocabulary remapping tests: frozen plan constants, an exhaustive sweep of
// the (1000, 900) plan, stream round-trips, and every parser failure mode.

#include <doctest.h>

#include <vector>

#include "oracle.hpp"
#include "rankstego/bridge.hpp"
#include "rankstego/errors.hpp"
#include "rankstego/rng.hpp"

using namespace rankstego;
using bridge::plan_remap;
using bridge::RemapPlan;
using bridge::remap_rank;
using bridge::remap_stream;
using bridge::unremap_stream;

TEST_CASE("remap plan matches the hand-derived large-vocabulary constants") {
  const RemapPlan plan = plan_remap(100000, 60000);
  CHECK(plan.v_enc == 100000);
  CHECK(plan.v_dec == 60000);
  CHECK(plan.direct_limit == oracle::kPlanBigL);
  CHECK(plan.block_size == oracle::kPlanBigB);
  CHECK(!plan.is_identity());
  CHECK(plan.block_first() == oracle::kPlanBigL + 1);
  CHECK(plan.block_last() == oracle::kPlanBigL + oracle::kPlanBigB);

  CHECK(remap_rank(plan, 98799) == oracle::kRemap98799);
  const auto back = unremap_stream(plan, oracle::kRemap98799);
  CHECK(back == std::vector<Rank>{98799});
}

TEST_CASE("remap plan matches the hand-derived small-vocabulary constants") {
  const RemapPlan plan = plan_remap(1000, 900);
  CHECK(plan.direct_limit == oracle::kPlanSmallL);
  CHECK(plan.block_size == oracle::kPlanSmallB);
}

TEST_CASE("shrinking is unnecessary when the decoder vocabulary suffices") {
  for (const auto [enc, dec] : {std::pair{900u, 1000u}, std::pair{256u, 256u},
                                std::pair{1u, 2u}}) {
    const RemapPlan plan = plan_remap(enc, dec);
    CHECK(plan.is_identity());
    CHECK(plan.direct_limit == enc);
    for (Rank r : {Rank{1}, Rank{enc / 2 + 1}, Rank{enc}}) {
      CHECK(remap_rank(plan, r) == std::vector<Rank>{r});
    }
    const std::vector<Rank> stream = {1, enc, 1};
    CHECK(unremap_stream(plan, remap_stream(plan, stream)) == stream);
  }
}

TEST_CASE("every (1000, 900) rank either round-trips or is ambiguous") {
  const RemapPlan plan = plan_remap(1000, 900);
  const Rank band_lo = plan.block_first();   // 889
  const Rank band_hi = plan.block_last();    // 899
  for (Rank r = 1; r <= 1000; ++r) {
    if (r >= band_lo && r <= band_hi) {
      CHECK_THROWS_AS(remap_rank(plan, r), RemapAmbiguity);
      continue;
    }
    const auto code = remap_rank(plan, r);
    if (r <= plan.direct_limit) {
      CHECK(code == std::vector<Rank>{r});
    } else {
      REQUIRE(code.size() == 2);
      CHECK(code[0] >= band_lo);  // openers always land in the block
      CHECK(code[0] <= band_hi);
    }
    CHECK(unremap_stream(plan, code) == std::vector<Rank>{r});
  }
}

TEST_CASE("streams of mixed direct and paired codes round-trip") {
  const RemapPlan plan = plan_remap(1000, 900);
  SplitMix64 rng(0xb71d6e);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Rank> ranks;
    for (std::size_t i = 0, n = 1 + rng.below(30); i < n; ++i) {
      Rank r;
      do {
        r = 1 + static_cast<Rank>(rng.below(1000));
      } while (r >= plan.block_first() && r <= plan.block_last());
      ranks.push_back(r);
    }
    const auto coded = remap_stream(plan, ranks);
    CHECK(unremap_stream(plan, coded) == ranks);
  }
}

TEST_CASE("random vocabulary pairs cover their whole rank range") {
  SplitMix64 rng(0x706c616e);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t v_dec = 100 + static_cast<std::uint32_t>(rng.below(5000));
    // Keep the pair bridgeable: the reserved block (ceil(sqrt(excess)) + 1)
    // must leave room for at least one direct rank, so cap the excess.
    const std::uint64_t max_excess =
        std::min<std::uint64_t>(50000, std::uint64_t{v_dec - 3} * (v_dec - 3));
    const std::uint32_t v_enc =
        v_dec + 1 + static_cast<std::uint32_t>(rng.below(max_excess));
    const RemapPlan plan = plan_remap(v_enc, v_dec);
    REQUIRE(!plan.is_identity());
    // Spot-check boundary and random ranks (the ambiguous band excepted).
    const std::vector<Rank> probes = {
        1,
        plan.direct_limit,
        plan.block_last() + 1,
        v_enc,
        1 + static_cast<Rank>(rng.below(v_enc)),
    };
    for (Rank r : probes) {
      if (r >= plan.block_first() && r <= plan.block_last()) continue;
      const auto code = remap_rank(plan, r);
      CHECK(unremap_stream(plan, code) == std::vector<Rank>{r});
      for (Rank piece : code) {
        CHECK(piece >= 1);
        CHECK(piece <= v_dec);
      }
    }
  }
}

TEST_CASE("unremap rejects truncated and malformed code streams") {
  const RemapPlan plan = plan_remap(1000, 900);
  const Rank opener = plan.block_first();  // valid pair opener

  // Ends inside a pair.
  CHECK_THROWS_AS(unremap_stream(plan, std::vector<Rank>{opener}),
                  TruncatedCode);
  CHECK_THROWS_AS(unremap_stream(plan, std::vector<Rank>{5, opener}),
                  TruncatedCode);

  // Digit outside [L, L+B-1].
  CHECK_THROWS_AS(unremap_stream(plan, std::vector<Rank>{opener, 1}),
                  MalformedDigit);
  CHECK_THROWS_AS(
      unremap_stream(plan, std::vector<Rank>{opener, plan.block_last() + 1}),
      MalformedDigit);

  // Decodes past the encoder vocabulary: the largest opener with the largest
  // digit encodes L+1 + B*B + (B-1) = 1020 > 1000.
  CHECK_THROWS_AS(
      unremap_stream(plan, std::vector<Rank>{plan.block_last(),
                                             plan.block_last() - 1}),
      MalformedDigit);

  // Stream tokens outside the decoder vocabulary.
  CHECK_THROWS_AS(unremap_stream(plan, std::vector<Rank>{901}),
                  MalformedDigit);
  CHECK_THROWS_AS(unremap_stream(plan, std::vector<Rank>{0}),
                  MalformedDigit);
}

TEST_CASE("remap rejects out-of-range input ranks") {
  const RemapPlan plan = plan_remap(1000, 900);
  CHECK_THROWS_AS(remap_rank(plan, 0), RankOutOfRange);
  CHECK_THROWS_AS(remap_rank(plan, 1001), RankOutOfRange);
}

TEST_CASE("impossible plans are rejected as unbridgeable") {
  CHECK_THROWS_AS(plan_remap(0, 900), Unbridgeable);
  CHECK_THROWS_AS(plan_remap(1000, 0), Unbridgeable);
  // Decoder far too small to host a block covering the overflow.
  CHECK_THROWS_AS(plan_remap(1000000, 3), Unbridgeable);
}
