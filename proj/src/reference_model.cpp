// SPDX-License-Identifier: Apache-2.0

#include "rankstego/reference_model.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>

#include "rankstego/errors.hpp"

namespace rankstego {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'B', 'G'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kV = ReferenceBigramModel::kVocabSize;

ModelFingerprint corpus_fingerprint(std::string_view corpus, double smoothing) {
  Sha256 h;
  h.update(std::string_view(kMagic, sizeof kMagic));
  h.update_u32le(kFormatVersion);
  h.update_f64le(smoothing);
  h.update_u64le(corpus.size());
  h.update(corpus);
  return ModelFingerprint{h.finish()};
}

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

ReferenceBigramModel::ReferenceBigramModel(std::string corpus, double smoothing,
                                           std::size_t window)
    : smoothing_(smoothing), window_(window) {
  if (!(smoothing > 0.0)) {
    throw Error("reference model: smoothing must be positive");
  }
  for (unsigned char b : corpus) unigram_[b] += 1;
  for (std::size_t i = 0; i + 1 < corpus.size(); ++i) {
    const auto a = static_cast<unsigned char>(corpus[i]);
    const auto b = static_cast<unsigned char>(corpus[i + 1]);
    bigram_[a][b] += 1;
  }
  fingerprint_ = corpus_fingerprint(corpus, smoothing_);
  finalize_tables();
}

ReferenceBigramModel::ReferenceBigramModel(FromCounts, double smoothing,
                                           std::size_t window)
    : smoothing_(smoothing), window_(window) {}

void ReferenceBigramModel::finalize_tables() {
  rankings_.clear();
  rankings_.reserve(kV + 1);
  auto build = [this](const std::array<std::uint64_t, kV>& counts) {
    // Order by descending count, ascending byte value: integer comparisons
    // only, so the order is identical on every platform.
    std::array<TokenId, kV> order;
    std::iota(order.begin(), order.end(), TokenId{0});
    std::sort(order.begin(), order.end(), [&counts](TokenId a, TokenId b) {
      if (counts[a] != counts[b]) return counts[a] > counts[b];
      return a < b;
    });
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    const double denom =
        static_cast<double>(total) + smoothing_ * static_cast<double>(kV);
    NextTokenRanking r;
    r.ordering.assign(order.begin(), order.end());
    r.probs.resize(kV);
    r.rank_by_token.resize(kV);
    for (std::size_t b = 0; b < kV; ++b) {
      r.probs[b] = (static_cast<double>(counts[b]) + smoothing_) / denom;
    }
    for (std::size_t i = 0; i < kV; ++i) {
      r.rank_by_token[r.ordering[i]] = static_cast<Rank>(i + 1);
    }
    return r;
  };
  for (std::size_t a = 0; a < kV; ++a) rankings_.push_back(build(bigram_[a]));
  rankings_.push_back(build(unigram_));
}

std::vector<TokenId> ReferenceBigramModel::tokenize_raw(
    std::string_view text) const {
  std::vector<TokenId> out;
  out.reserve(text.size());
  for (unsigned char b : text) out.push_back(b);
  return out;
}

std::string ReferenceBigramModel::detokenize_raw(
    std::span<const TokenId> tokens) const {
  std::string out;
  out.reserve(tokens.size());
  for (TokenId t : tokens) {
    if (t >= kV) {
      throw TokenOutOfRange("token id " + std::to_string(t) +
                            " outside byte vocabulary");
    }
    out.push_back(static_cast<char>(static_cast<unsigned char>(t)));
  }
  return out;
}

NextTokenRanking ReferenceBigramModel::next_ranking(
    std::span<const TokenId> context) const {
  if (context.size() > window_) {
    throw ContextOverflow("context of " + std::to_string(context.size()) +
                          " tokens exceeds window of " +
                          std::to_string(window_));
  }
  if (context.empty()) return rankings_[kV];
  const TokenId last = context.back();
  if (last >= kV) {
    throw TokenOutOfRange("context token " + std::to_string(last) +
                          " outside byte vocabulary");
  }
  return rankings_[last];
}

// File layout (all integers little-endian):
//   magic "RSBG" | u32 format_version | f64 smoothing
//   | 32-byte model fingerprint | 32-byte SHA-256 of the payload
//   | payload: 256*256 u64 bigram counts (row-major, [context][next]),
//              then 256 u64 unigram counts.
void ReferenceBigramModel::save(const std::filesystem::path& path) const {
  std::string payload;
  payload.reserve(kV * kV * 8 + kV * 8);
  for (std::size_t a = 0; a < kV; ++a) {
    for (std::size_t b = 0; b < kV; ++b) put_u64le(payload, bigram_[a][b]);
  }
  for (std::size_t b = 0; b < kV; ++b) put_u64le(payload, unigram_[b]);
  const Digest payload_digest = sha256(payload);

  std::string header;
  header.append(kMagic, sizeof kMagic);
  put_u32le(header, kFormatVersion);
  put_u64le(header, std::bit_cast<std::uint64_t>(smoothing_));
  header.append(reinterpret_cast<const char*>(fingerprint_.digest.data()),
                fingerprint_.digest.size());
  header.append(reinterpret_cast<const char*>(payload_digest.data()),
                payload_digest.size());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open model file for writing: " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw Error("failed writing model file: " + path.string());
}

ReferenceBigramModel ReferenceBigramModel::load(
    const std::filesystem::path& path, std::size_t window) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  constexpr std::size_t kHeader = 4 + 4 + 8 + 32 + 32;
  constexpr std::size_t kPayload = kV * kV * 8 + kV * 8;
  if (bytes.size() != kHeader + kPayload ||
      std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw FileFormatError("not a reference model file: " + path.string());
  }
  const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const std::uint32_t version = get_u32le(p + 4);
  if (version != kFormatVersion) {
    throw FileFormatError("unsupported model format version " +
                          std::to_string(version));
  }
  const double smoothing = std::bit_cast<double>(get_u64le(p + 8));
  if (!(smoothing > 0.0)) {
    throw FileFormatError("model file carries non-positive smoothing");
  }

  ModelFingerprint fp;
  std::memcpy(fp.digest.data(), p + 16, 32);
  Digest stored_payload_digest;
  std::memcpy(stored_payload_digest.data(), p + 48, 32);

  const std::string_view payload(bytes.data() + kHeader, kPayload);
  if (sha256(payload) != stored_payload_digest) {
    throw FingerprintMismatch("model file payload checksum mismatch: " +
                              path.string() + " is corrupt");
  }

  ReferenceBigramModel m(FromCounts{}, smoothing, window);
  const auto* q = reinterpret_cast<const std::uint8_t*>(payload.data());
  for (std::size_t a = 0; a < kV; ++a) {
    for (std::size_t b = 0; b < kV; ++b) {
      m.bigram_[a][b] = get_u64le(q);
      q += 8;
    }
  }
  for (std::size_t b = 0; b < kV; ++b) {
    m.unigram_[b] = get_u64le(q);
    q += 8;
  }
  m.fingerprint_ = fp;
  m.finalize_tables();
  return m;
}

}  // namespace rankstego
