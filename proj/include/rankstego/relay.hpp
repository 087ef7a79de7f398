#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// The relay protocol: a minimal framing of the codec for the
// prompt-relaying deployment, where a public cover conversation (context c,
// trigger t) carries a hidden instruction u inside the visible reply s.
//
// pack/unpack are exactly encode/decode with the roles fixed: the trigger t
// is the secret prompt and the cover context c is the public ranking
// context.  Keeping the mapping in one place means the relay can never
// drift from the codec proper.

#include <cstdint>
#include <string>

#include "rankstego/codec.hpp"
#include "rankstego/model.hpp"

namespace rankstego::relay {

struct RelayEnvelope {
  std::string c;  // public cover context
  std::string t;  // trigger (shared secret)
  std::string s;  // visible reply carrying the hidden instruction
  ModelFingerprint model_fingerprint;
  std::uint32_t pad_len = codec::kDefaultPadLen;
  std::uint32_t format_version = 1;
};

/// Hides instruction `u` in a reply to (c, t).
RelayEnvelope relay_pack(const Model& model, std::string c, std::string t,
                         const std::string& u,
                         std::uint32_t pad_len = codec::kDefaultPadLen);

/// Recovers the hidden instruction from an envelope.  Exact inverse of
/// relay_pack under the same model.
std::string relay_unpack(const Model& model, const RelayEnvelope& envelope);

/// The key equivalent to an envelope's (c, t) pair — exposed so tests can
/// prove pack/unpack coincide with encode/decode.
codec::StegoKey relay_key(const std::string& c, const std::string& t,
                          std::uint32_t pad_len,
                          const ModelFingerprint& fingerprint);

}  // namespace rankstego::relay
