#pragma once
// SPDX-License-Identifier: Apache-2.0
//
// File formats and serialization.
//
// JSON artifacts (key files, relay envelopes) are emitted with a fixed field
// order and fixed indentation, so serialize -> parse -> serialize is
// byte-identical and artifacts can be compared with plain `diff` in tests
// and in the field.  Stegotext files deliberately carry no framing at all —
// they are just the cover text (or bare token ids in token transport).

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankstego/analyzer.hpp"
#include "rankstego/codec.hpp"
#include "rankstego/relay.hpp"
#include "rankstego/types.hpp"

namespace rankstego::io {

// --- raw files --------------------------------------------------------------

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

bool utf8_valid(std::string_view bytes);
/// Throws EncodingError naming `what` when bytes are not valid UTF-8.
void require_utf8(std::string_view bytes, const char* what);

// --- key files ---------------------------------------------------------------

std::string key_to_json(const codec::StegoKey& key);
codec::StegoKey key_from_json(std::string_view json);
void write_key(const codec::StegoKey& key, const std::filesystem::path& path);
codec::StegoKey read_key(const std::filesystem::path& path);

// --- stegotext files ----------------------------------------------------------

/// Text transport: the raw cover text bytes.  Token transport: one decimal
/// token id per line.
void write_stego(const codec::StegoText& stego, const codec::StegoKey& key,
                 const std::filesystem::path& path);
codec::StegoText read_stego(const std::filesystem::path& path,
                            const codec::StegoKey& key);

// --- relay envelopes -----------------------------------------------------------

std::string envelope_to_json(const relay::RelayEnvelope& env);
relay::RelayEnvelope envelope_from_json(std::string_view json);
void write_envelope(const relay::RelayEnvelope& env,
                    const std::filesystem::path& path);
relay::RelayEnvelope read_envelope(const std::filesystem::path& path);

// --- rank / token streams -------------------------------------------------------

/// One unsigned decimal per line.
void write_rank_stream(std::span<const Rank> ranks,
                       const std::filesystem::path& path);
std::vector<Rank> read_rank_stream(const std::filesystem::path& path);

// --- manifests and word lists ----------------------------------------------------

/// Non-empty lines of a text file, whitespace-trimmed.
std::vector<std::string> read_lines(const std::filesystem::path& path);

// --- analyzer reports --------------------------------------------------------------

/// TSV with a fixed header, one row per scored text, then per-role summary
/// lines prefixed with '#'.  Floating-point fields use fixed 9-digit
/// precision so equal reports are byte-equal.
std::string report_to_tsv(const analyzer::Report& report);

}  // namespace rankstego::io
