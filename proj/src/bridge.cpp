// SPDX-License-Identifier: Apache-2.0

#include "rankstego/bridge.hpp"

#include <cmath>
#include <string>

namespace rankstego::bridge {

namespace {

std::uint32_t ceil_sqrt(std::uint64_t x) {
  if (x == 0) return 0;
  // Floating start, integer fixup: exact for all u64 inputs.
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
  while (r > 0 && (r - 1) * (r - 1) >= x) --r;
  while (r * r < x) ++r;
  return static_cast<std::uint32_t>(r);
}

}  // namespace

RemapPlan plan_remap(std::uint32_t v_enc, std::uint32_t v_dec) {
  if (v_enc == 0 || v_dec == 0) {
    throw Unbridgeable("vocabularies must be non-empty");
  }
  if (v_enc <= v_dec) {
    // Identity: every encoder rank is a valid decoder rank.
    return RemapPlan{v_enc, v_dec, v_enc, 0};
  }
  const std::uint64_t overflow = std::uint64_t{v_enc} - v_dec;
  const std::uint32_t b = ceil_sqrt(overflow) + 1;
  if (std::uint64_t{b} + 1 >= v_dec) {
    throw Unbridgeable("decoder vocabulary of " + std::to_string(v_dec) +
                       " is too small to host a reserved block of " +
                       std::to_string(b));
  }
  const std::uint32_t l = v_dec - b - 1;
  // Two-token codes address encoder ranks (L, L + B*B]; by the choice of B
  // this always covers v_enc, but keep the guarantee explicit.
  if (std::uint64_t{v_enc} - l > std::uint64_t{b} * b) {
    throw Unbridgeable("reserved block cannot address the overflow range");
  }
  return RemapPlan{v_enc, v_dec, l, b};
}

std::vector<Rank> remap_rank(const RemapPlan& plan, Rank rank) {
  if (rank < 1 || rank > plan.v_enc) {
    throw RankOutOfRange("rank " + std::to_string(rank) +
                         " outside encoder range [1, " +
                         std::to_string(plan.v_enc) + "]");
  }
  if (plan.is_identity() || rank <= plan.direct_limit) return {rank};
  const std::uint32_t offset = rank - (plan.direct_limit + 1);
  const std::uint32_t hi = offset / plan.block_size;
  const std::uint32_t lo = offset % plan.block_size;
  if (hi == 0) {
    throw RemapAmbiguity(
        "rank " + std::to_string(rank) + " lies in the reserved band [" +
        std::to_string(plan.block_first()) + ", " +
        std::to_string(plan.block_last()) +
        "]: its code would start outside the reserved block and be read as a "
        "direct rank");
  }
  return {plan.direct_limit + hi, plan.direct_limit + lo};
}

std::vector<Rank> remap_stream(const RemapPlan& plan,
                               std::span<const Rank> ranks) {
  std::vector<Rank> out;
  out.reserve(ranks.size());
  for (Rank r : ranks) {
    const auto code = remap_rank(plan, r);
    out.insert(out.end(), code.begin(), code.end());
  }
  return out;
}

std::vector<Rank> unremap_stream(const RemapPlan& plan,
                                 std::span<const Rank> ranks) {
  std::vector<Rank> out;
  out.reserve(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    const Rank r = ranks[i];
    if (r < 1 || r > plan.v_dec) {
      throw MalformedDigit("rank " + std::to_string(r) +
                           " outside decoder range [1, " +
                           std::to_string(plan.v_dec) + "]");
    }
    const bool opens_pair = !plan.is_identity() && r >= plan.block_first() &&
                            r <= plan.block_last();
    if (!opens_pair) {
      if (r > plan.v_enc) {
        throw MalformedDigit("direct rank " + std::to_string(r) +
                             " outside encoder range [1, " +
                             std::to_string(plan.v_enc) + "]");
      }
      out.push_back(r);
      continue;
    }
    if (i + 1 >= ranks.size()) {
      throw TruncatedCode("stream ends inside a two-token code (opened at "
                          "position " +
                          std::to_string(i) + ")");
    }
    const Rank d = ranks[++i];
    const std::uint32_t hi = r - plan.direct_limit;
    if (d < plan.direct_limit ||
        d >= plan.direct_limit + plan.block_size) {
      throw MalformedDigit("second token of a pair carries rank " +
                           std::to_string(d) + ", outside the digit range [" +
                           std::to_string(plan.direct_limit) + ", " +
                           std::to_string(plan.direct_limit +
                                          plan.block_size - 1) +
                           "]");
    }
    const std::uint32_t lo = d - plan.direct_limit;
    const std::uint64_t enc = std::uint64_t{plan.direct_limit} + 1 +
                              std::uint64_t{hi} * plan.block_size + lo;
    if (enc > plan.v_enc) {
      throw MalformedDigit("two-token code decodes to rank " +
                           std::to_string(enc) +
                           ", outside encoder range [1, " +
                           std::to_string(plan.v_enc) + "]");
    }
    out.push_back(static_cast<Rank>(enc));
  }
  return out;
}

}  // namespace rankstego::bridge
