// SPDX-License-Identifier: Apache-2.0

#include "rankstego/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

#include "rankstego/errors.hpp"

namespace rankstego::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

ordered_json parse_strict(std::string_view json, const char* what) {
  ordered_json j = ordered_json::parse(json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw FileFormatError(std::string(what) + ": not a JSON object");
  }
  return j;
}

template <typename T>
T field(const ordered_json& j, const char* name, const char* what) {
  if (!j.contains(name)) {
    throw FileFormatError(std::string(what) + ": missing field '" + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FileFormatError(std::string(what) + ": field '" + name +
                          "' has the wrong type");
  }
}

void reject_unknown(const ordered_json& j,
                    std::initializer_list<std::string_view> known,
                    const char* what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto k : known) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw FileFormatError(std::string(what) + ": unknown field '" +
                            it.key() + "'");
    }
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open file for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing file: " + path.string());
}

bool utf8_valid(std::string_view bytes) {
  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    std::size_t len;
    std::uint32_t cp;
    if (b0 < 0x80) {
      i += 1;
      continue;
    } else if ((b0 & 0xe0) == 0xc0) {
      len = 2;
      cp = b0 & 0x1f;
    } else if ((b0 & 0xf0) == 0xe0) {
      len = 3;
      cp = b0 & 0x0f;
    } else if ((b0 & 0xf8) == 0xf0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto bk = static_cast<unsigned char>(bytes[i + k]);
      if ((bk & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (bk & 0x3f);
    }
    // Overlongs, surrogates, and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10ffff ||
        (cp >= 0xd800 && cp <= 0xdfff)) {
      return false;
    }
    i += len;
  }
  return true;
}

void require_utf8(std::string_view bytes, const char* what) {
  if (!utf8_valid(bytes)) {
    throw EncodingError(std::string(what) + " is not valid UTF-8");
  }
}

// --- key files ---------------------------------------------------------------

std::string key_to_json(const codec::StegoKey& key) {
  ordered_json j;
  j["k"] = key.k;
  if (key.k_prime) j["k_prime"] = *key.k_prime;
  j["pad_len"] = key.pad_len;
  j["bos_policy"] =
      key.bos_policy == codec::BosPolicy::kPrepend ? "prepend" : "none";
  j["model_fingerprint"] = key.fingerprint.hex();
  j["token_transport"] = key.token_transport;
  if (key.allow_empty_k) j["allow_empty_k"] = true;
  j["format_version"] = 1;
  return j.dump(2) + "\n";
}

codec::StegoKey key_from_json(std::string_view json) {
  const ordered_json j = parse_strict(json, "key file");
  reject_unknown(j,
                 {"k", "k_prime", "pad_len", "bos_policy", "model_fingerprint",
                  "token_transport", "allow_empty_k", "format_version"},
                 "key file");
  if (field<std::uint32_t>(j, "format_version", "key file") != 1) {
    throw FileFormatError("key file: unsupported format_version");
  }
  codec::StegoKey key;
  key.k = field<std::string>(j, "k", "key file");
  if (j.contains("k_prime")) {
    key.k_prime = field<std::string>(j, "k_prime", "key file");
  }
  key.pad_len = field<std::uint32_t>(j, "pad_len", "key file");
  const auto bos = field<std::string>(j, "bos_policy", "key file");
  if (bos == "none") {
    key.bos_policy = codec::BosPolicy::kNone;
  } else if (bos == "prepend") {
    key.bos_policy = codec::BosPolicy::kPrepend;
  } else {
    throw FileFormatError("key file: bos_policy must be 'none' or 'prepend'");
  }
  key.fingerprint = ModelFingerprint::from_hex(
      field<std::string>(j, "model_fingerprint", "key file"));
  key.token_transport = field<bool>(j, "token_transport", "key file");
  if (j.contains("allow_empty_k")) {
    key.allow_empty_k = field<bool>(j, "allow_empty_k", "key file");
  }
  return key;
}

void write_key(const codec::StegoKey& key, const std::filesystem::path& path) {
  write_file(path, key_to_json(key));
}

codec::StegoKey read_key(const std::filesystem::path& path) {
  return key_from_json(read_file(path));
}

// --- stegotext files ----------------------------------------------------------

void write_stego(const codec::StegoText& stego, const codec::StegoKey& key,
                 const std::filesystem::path& path) {
  if (key.token_transport) {
    std::string out;
    for (TokenId t : stego.tokens) {
      out += std::to_string(t);
      out += '\n';
    }
    write_file(path, out);
  } else {
    write_file(path, stego.text);
  }
}

codec::StegoText read_stego(const std::filesystem::path& path,
                            const codec::StegoKey& key) {
  codec::StegoText stego;
  const std::string bytes = read_file(path);
  if (key.token_transport) {
    const auto ranks = read_rank_stream(path);
    stego.tokens.assign(ranks.begin(), ranks.end());
  } else {
    stego.text = bytes;
  }
  return stego;
}

// --- relay envelopes ------------------------------------------------------------

std::string envelope_to_json(const relay::RelayEnvelope& env) {
  ordered_json j;
  j["c"] = env.c;
  j["t"] = env.t;
  j["s"] = env.s;
  j["model_fingerprint"] = env.model_fingerprint.hex();
  j["pad_len"] = env.pad_len;
  j["format_version"] = env.format_version;
  return j.dump(2) + "\n";
}

relay::RelayEnvelope envelope_from_json(std::string_view json) {
  const ordered_json j = parse_strict(json, "relay envelope");
  reject_unknown(
      j, {"c", "t", "s", "model_fingerprint", "pad_len", "format_version"},
      "relay envelope");
  relay::RelayEnvelope env;
  env.c = field<std::string>(j, "c", "relay envelope");
  env.t = field<std::string>(j, "t", "relay envelope");
  env.s = field<std::string>(j, "s", "relay envelope");
  env.model_fingerprint = ModelFingerprint::from_hex(
      field<std::string>(j, "model_fingerprint", "relay envelope"));
  env.pad_len = field<std::uint32_t>(j, "pad_len", "relay envelope");
  env.format_version =
      field<std::uint32_t>(j, "format_version", "relay envelope");
  return env;
}

void write_envelope(const relay::RelayEnvelope& env,
                    const std::filesystem::path& path) {
  write_file(path, envelope_to_json(env));
}

relay::RelayEnvelope read_envelope(const std::filesystem::path& path) {
  return envelope_from_json(read_file(path));
}

// --- rank / token streams --------------------------------------------------------

void write_rank_stream(std::span<const Rank> ranks,
                       const std::filesystem::path& path) {
  std::string out;
  for (Rank r : ranks) {
    out += std::to_string(r);
    out += '\n';
  }
  write_file(path, out);
}

std::vector<Rank> read_rank_stream(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::vector<Rank> out;
  std::size_t i = 0;
  std::size_t line = 1;
  while (i < bytes.size()) {
    std::size_t end = bytes.find('\n', i);
    if (end == std::string::npos) end = bytes.size();
    std::string_view tok(bytes.data() + i, end - i);
    while (!tok.empty() && (tok.back() == '\r' || tok.back() == ' ')) {
      tok.remove_suffix(1);
    }
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    if (!tok.empty()) {
      std::uint64_t v = 0;
      for (char c : tok) {
        if (c < '0' || c > '9') {
          throw FileFormatError(path.string() + ":" + std::to_string(line) +
                                ": expected an unsigned decimal");
        }
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
        if (v > 0xffffffffull) {
          throw FileFormatError(path.string() + ":" + std::to_string(line) +
                                ": value does not fit in 32 bits");
        }
      }
      out.push_back(static_cast<Rank>(v));
    }
    i = end + 1;
    ++line;
  }
  return out;
}

// --- manifests and word lists -------------------------------------------------------

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < bytes.size()) {
    std::size_t end = bytes.find('\n', i);
    if (end == std::string::npos) end = bytes.size();
    std::string line = bytes.substr(i, end - i);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t')) {
      line.pop_back();
    }
    std::size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) {
      ++start;
    }
    line.erase(0, start);
    if (!line.empty()) out.push_back(std::move(line));
    i = end + 1;
  }
  return out;
}

// --- analyzer reports -----------------------------------------------------------------

std::string report_to_tsv(const analyzer::Report& report) {
  bool any_alt = false;
  for (const auto& r : report.rows) {
    if (r.log_prob_alt) {
      any_alt = true;
      break;
    }
  }
  std::string out = "id\trole\tkey_id\ttoken_count\tlog_prob";
  if (any_alt) out += "\tlog_prob_alt";
  out += '\n';
  for (const auto& r : report.rows) {
    out += r.id;
    out += '\t';
    out += r.role;
    out += '\t';
    out += r.key_id;
    out += '\t';
    out += std::to_string(r.token_count);
    out += '\t';
    out += fixed9(r.log_prob);
    if (any_alt) {
      out += '\t';
      out += r.log_prob_alt ? fixed9(*r.log_prob_alt) : std::string("-");
    }
    out += '\n';
  }
  for (const auto& s : report.summaries) {
    out += "# summary\trole=" + s.role + "\tcount=" + std::to_string(s.count) +
           "\tmin=" + fixed9(s.min) + "\tp5=" + fixed9(s.p5) +
           "\tp25=" + fixed9(s.p25) + "\tmedian=" + fixed9(s.median) +
           "\tp75=" + fixed9(s.p75) + "\tp95=" + fixed9(s.p95) +
           "\tmax=" + fixed9(s.max) + "\tmean=" + fixed9(s.mean) + "\n";
  }
  return out;
}

}  // namespace rankstego::io
