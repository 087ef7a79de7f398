// SPDX-License-Identifier: Apache-2.0

#include "rankstego/relay.hpp"

#include "rankstego/errors.hpp"

namespace rankstego::relay {

codec::StegoKey relay_key(const std::string& c, const std::string& t,
                          std::uint32_t pad_len,
                          const ModelFingerprint& fingerprint) {
  codec::StegoKey key;
  key.k = t;
  key.k_prime = c;
  key.pad_len = pad_len;
  key.fingerprint = fingerprint;
  return key;
}

RelayEnvelope relay_pack(const Model& model, std::string c, std::string t,
                         const std::string& u, std::uint32_t pad_len) {
  const codec::StegoKey key = relay_key(c, t, pad_len, model.fingerprint());
  const codec::StegoText stego = codec::encode(model, u, key);
  RelayEnvelope env;
  env.c = std::move(c);
  env.t = std::move(t);
  env.s = stego.text;
  env.model_fingerprint = model.fingerprint();
  env.pad_len = pad_len;
  return env;
}

std::string relay_unpack(const Model& model, const RelayEnvelope& envelope) {
  if (envelope.format_version != 1) {
    throw FileFormatError("unsupported relay envelope version " +
                          std::to_string(envelope.format_version));
  }
  check_fingerprint(model, envelope.model_fingerprint, "relay envelope");
  const codec::StegoKey key =
      relay_key(envelope.c, envelope.t, envelope.pad_len, model.fingerprint());
  codec::StegoText stego;
  stego.text = envelope.s;
  stego.fingerprint = envelope.model_fingerprint;
  return codec::decode(model, stego, key);
}

}  // namespace rankstego::relay
