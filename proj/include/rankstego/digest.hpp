#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// SHA-256 digests and model fingerprints.
//
// A ModelFingerprint pins every artifact (key, stegotext, envelope, rank
// table) to the exact model that produced it.  Two models with the same
// fingerprint are interchangeable for coding purposes; everything else must
// be rejected before ranks are interpreted.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace rankstego {

using Digest = std::array<std::uint8_t, 32>;

/// Incremental SHA-256 hasher with helpers for the little-endian scalar
/// encodings used by the file formats.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view bytes);
  void update(const void* data, std::size_t n);
  void update_u32le(std::uint32_t v);
  void update_u64le(std::uint64_t v);
  /// IEEE-754 binary64 bit pattern, little-endian.
  void update_f64le(double v);

  /// Finalizes and invalidates the hasher.
  Digest finish();

 private:
  void* ctx_;
};

Digest sha256(std::string_view bytes);

std::string to_hex(const Digest& d);

/// Parses 64 hex characters.  Throws FileFormatError on anything else.
Digest digest_from_hex(std::string_view hex);

struct ModelFingerprint {
  Digest digest{};

  bool operator==(const ModelFingerprint&) const = default;

  /// All-zero fingerprints mean "not specified" in serialized artifacts.
  bool is_null() const {
    for (auto b : digest) {
      if (b != 0) return false;
    }
    return true;
  }

  std::string hex() const { return to_hex(digest); }

  static ModelFingerprint from_hex(std::string_view hex) {
    return ModelFingerprint{digest_from_hex(hex)};
  }
};

}  // namespace rankstego
