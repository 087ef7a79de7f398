// SPDX-License-Identifier: Apache-2.0

#include "rankstego/recode.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <string>

#include "rankstego/errors.hpp"

namespace rankstego::bridge {

namespace {

using boost::multiprecision::cpp_int;

// Half-open interval [lo, lo + width) / den, kept as unreduced integer
// fractions: refinement is then multiplication only (no gcd on the hot
// path), and all comparisons are exact cross-multiplications.
struct Interval {
  cpp_int lo = 0;
  cpp_int width = 1;
  cpp_int den = 1;

  void refine(std::uint64_t cum_lo, std::uint64_t cum_hi, std::uint64_t total) {
    lo = lo * total + width * cum_lo;
    width = width * (cum_hi - cum_lo);
    den = den * total;
  }
};

// Symbol alphabets are described by a cumulative-count array `cum` of size
// S+1 (cum[0] = 0, cum[S] = total): symbol s owns [cum[s], cum[s+1]).
// Source side: symbol 0 is the end marker (count 1), symbol s >= 1 is rank s.
// Destination side: symbol s is rank s+1 (no end marker).
struct Alphabet {
  std::vector<std::uint64_t> cum;
  std::uint64_t total = 0;
};

Alphabet source_alphabet(const RankFrequencyTable& t) {
  t.validate();
  Alphabet a;
  a.cum.resize(std::size_t{t.max_rank} + 2);
  a.cum[0] = 0;
  a.cum[1] = 1;  // end marker
  for (std::uint32_t r = 1; r <= t.max_rank; ++r) {
    a.cum[r + 1] = a.cum[r] + t.counts[r];
  }
  a.total = t.total + 1;
  return a;
}

Alphabet destination_alphabet(const RankFrequencyTable& t) {
  t.validate();
  if (t.max_rank < 2) {
    throw Error(
        "recode: destination table must cover at least two ranks to carry "
        "information");
  }
  Alphabet a;
  a.cum.resize(std::size_t{t.max_rank} + 1);
  a.cum[0] = 0;
  for (std::uint32_t r = 1; r <= t.max_rank; ++r) {
    a.cum[r] = a.cum[r - 1] + t.counts[r];
  }
  a.total = t.total;
  return a;
}

// Index s with cum[s] <= x < cum[s+1]; x must lie in [0, total).
std::size_t locate(const Alphabet& a, const cpp_int& x) {
  if (x < 0 || x >= a.total) {
    throw Error("recode: stream is not a valid coder output (pointer left "
                "the unit interval)");
  }
  const auto xv = static_cast<std::uint64_t>(x);
  const auto it = std::upper_bound(a.cum.begin(), a.cum.end(), xv);
  return static_cast<std::size_t>(it - a.cum.begin()) - 1;
}

// Floor of ((p_num/p_den) - (i.lo/i.den)) / (i.width/i.den) * total — the
// position of an exterior point p inside interval i, scaled to counts.
cpp_int position_in(const Interval& i, const cpp_int& p_num,
                    const cpp_int& p_den, std::uint64_t total) {
  const cpp_int num = (p_num * i.den - i.lo * p_den) * total;
  const cpp_int den = i.width * p_den;
  if (num < 0) {
    throw Error("recode: stream is not a valid coder output (pointer below "
                "interval)");
  }
  return num / den;
}

// Is [b_lo, b_lo + b_width) / b_den contained in cell s of interval i?
bool cell_contains(const Interval& i, const Alphabet& a, std::size_t s,
                   const cpp_int& b_lo, const cpp_int& b_width,
                   const cpp_int& b_den) {
  // Cell bounds over denominator i.den * total.
  const cpp_int cell_lo = i.lo * a.total + i.width * a.cum[s];
  const cpp_int cell_hi = i.lo * a.total + i.width * a.cum[s + 1];
  const cpp_int cell_den = i.den * a.total;
  if (b_lo * cell_den < cell_lo * b_den) return false;
  if ((b_lo + b_width) * cell_den > cell_hi * b_den) return false;
  return true;
}

struct Dyadic {
  cpp_int m;    // left endpoint numerator
  cpp_int den;  // 2^n
  std::size_t n = 0;
};

Dyadic dyadic_from_bits(const std::vector<bool>& bits) {
  Dyadic d;
  d.n = bits.size();
  d.m = 0;
  for (bool b : bits) {
    d.m <<= 1;
    if (b) d.m += 1;
  }
  d.den = cpp_int(1) << d.n;
  return d;
}

std::vector<Rank> decode_by_containment(const Alphabet& src,
                                        const cpp_int& b_lo,
                                        const cpp_int& b_width,
                                        const cpp_int& b_den) {
  Interval i;
  std::vector<Rank> out;
  for (;;) {
    const cpp_int x = position_in(i, b_lo, b_den, src.total);
    const std::size_t s = locate(src, x);
    if (!cell_contains(i, src, s, b_lo, b_width, b_den)) {
      throw Error("recode: stream is not a recoder output for these tables");
    }
    if (s == 0) return out;  // end marker
    out.push_back(static_cast<Rank>(s));
    i.refine(src.cum[s], src.cum[s + 1], src.total);
  }
}

}  // namespace

namespace detail {

std::vector<bool> encode_to_bits(std::span<const Rank> src_ranks,
                                 const RankFrequencyTable& src) {
  const Alphabet a = source_alphabet(src);
  Interval i;
  for (Rank r : src_ranks) {
    if (r < 1 || r > src.max_rank) {
      throw RankOutOfRange("recode: source rank " + std::to_string(r) +
                           " outside table range [1, " +
                           std::to_string(src.max_rank) + "]");
    }
    i.refine(a.cum[r], a.cum[r + 1], a.total);
  }
  i.refine(a.cum[0], a.cum[1], a.total);  // end marker

  // Minimal n with 2^-n <= width / (2 den): an interval of relative width
  // >= 2 * 2^-n always contains a full dyadic cell of size 2^-n.
  const cpp_int q = (2 * i.den + i.width - 1) / i.width;  // ceil(2 den/width)
  std::size_t n = boost::multiprecision::msb(q);
  if ((cpp_int(1) << n) < q) ++n;
  const cpp_int m = ((i.lo << n) + i.den - 1) / i.den;  // ceil(lo * 2^n / den)
  // By construction [m, m+1)/2^n nests inside the coder interval.
  if ((m + 1) * i.den > (i.lo + i.width) * (cpp_int(1) << n)) {
    throw Error("recode: internal error, dyadic cell escaped the interval");
  }

  std::vector<bool> bits(n);
  for (std::size_t b = 0; b < n; ++b) {
    bits[n - 1 - b] = boost::multiprecision::bit_test(m, static_cast<unsigned>(b));
  }
  return bits;
}

std::vector<Rank> decode_bits(const std::vector<bool>& bits,
                              const RankFrequencyTable& src) {
  const Alphabet a = source_alphabet(src);
  const Dyadic d = dyadic_from_bits(bits);
  return decode_by_containment(a, d.m, 1, d.den);
}

std::vector<Rank> embed_bits(const std::vector<bool>& bits,
                             const RankFrequencyTable& dst) {
  const Alphabet a = destination_alphabet(dst);
  const Dyadic d = dyadic_from_bits(bits);
  // Decode pointer: the midpoint of the dyadic cell, (2m + 1) / 2^(n+1).
  const cpp_int v_num = 2 * d.m + 1;
  const cpp_int v_den = d.den << 1;

  Interval i;
  std::vector<Rank> out;
  // The loop shrinks the interval by at least max_count/total per step; the
  // cap only trips on pathologically skewed tables, where the embedding
  // would be astronomically long anyway.
  const std::size_t cap = 64 * (d.n + 2) + 4096;
  for (;;) {
    // Containment of i in the dyadic cell ends the stream.
    if (i.lo * d.den >= d.m * i.den &&
        (i.lo + i.width) * d.den <= (d.m + 1) * i.den) {
      return out;
    }
    if (out.size() > cap) {
      throw Error(
          "recode: destination table too skewed for the embedding to "
          "terminate in reasonable space");
    }
    const cpp_int x = position_in(i, v_num, v_den, a.total);
    const std::size_t s = locate(a, x);
    out.push_back(static_cast<Rank>(s + 1));  // alphabet index -> rank
    i.refine(a.cum[s], a.cum[s + 1], a.total);
  }
}

}  // namespace detail

std::vector<Rank> arithmetic_recode(std::span<const Rank> src_ranks,
                                    const RankFrequencyTable& src,
                                    const RankFrequencyTable& dst) {
  return detail::embed_bits(detail::encode_to_bits(src_ranks, src), dst);
}

std::vector<Rank> arithmetic_recode_inverse(std::span<const Rank> dst_ranks,
                                            const RankFrequencyTable& src,
                                            const RankFrequencyTable& dst) {
  const Alphabet da = destination_alphabet(dst);
  Interval j;
  for (Rank r : dst_ranks) {
    if (r < 1 || r > dst.max_rank) {
      throw RankOutOfRange("recode: destination rank " + std::to_string(r) +
                           " outside table range [1, " +
                           std::to_string(dst.max_rank) + "]");
    }
    j.refine(da.cum[r - 1], da.cum[r], da.total);
  }
  const Alphabet sa = source_alphabet(src);
  return decode_by_containment(sa, j.lo, j.width, j.den);
}

}  // namespace rankstego::bridge
