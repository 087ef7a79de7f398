// SPDX-License-Identifier: Apache-2.0

#include "rankstego/codec.hpp"

#include <algorithm>

#include "rankstego/errors.hpp"

namespace rankstego::codec {

namespace {

void validate_key(const Model& model, const StegoKey& key) {
  check_fingerprint(model, key.fingerprint, "stego key");
  if (key.k.empty() && !key.allow_empty_k) {
    throw InvalidKey(
        "secret prompt is empty; an empty k makes the stego context public "
        "(set allow_empty_k to override)");
  }
  if (key.bos_policy == BosPolicy::kPrepend && !model.bos_token()) {
    throw InvalidKey("key requests a BOS prefix but the model has no BOS token");
  }
}

void check_window(const Model& model, std::size_t context_len,
                  std::size_t message_len) {
  if (context_len + message_len > model.context_window()) {
    throw ContextOverflow(
        "context (" + std::to_string(context_len) + ") plus message (" +
        std::to_string(message_len) + ") tokens exceed the model window of " +
        std::to_string(model.context_window()));
  }
}

}  // namespace

std::vector<TokenId> build_context(const Model& model, const StegoKey& key,
                                   bool secret_side) {
  std::vector<TokenId> ctx;
  if (key.bos_policy == BosPolicy::kPrepend) {
    const auto bos = model.bos_token();
    if (!bos) {
      throw InvalidKey("key requests a BOS prefix but the model has no BOS token");
    }
    ctx.push_back(*bos);
  }
  const std::string* prompt = nullptr;
  if (secret_side) {
    prompt = &key.k;
  } else if (key.k_prime) {
    prompt = &*key.k_prime;
  }
  if (prompt != nullptr && !prompt->empty()) {
    const auto toks = model.tokenize_raw(*prompt);
    ctx.insert(ctx.end(), toks.begin(), toks.end());
  }
  return ctx;
}

RankSequence extract_ranks(const Model& model,
                           std::span<const TokenId> message,
                           std::span<const TokenId> context) {
  check_window(model, context.size(), message.size());
  std::vector<TokenId> ctx(context.begin(), context.end());
  ctx.reserve(context.size() + message.size());
  RankSequence out;
  out.ranks.reserve(message.size());
  out.fingerprint = model.fingerprint();
  for (TokenId tok : message) {
    const NextTokenRanking ranking = model.next_ranking(ctx);
    out.ranks.push_back(rank_of(ranking, tok));
    ctx.push_back(tok);
  }
  return out;
}

std::vector<TokenId> emit_by_ranks(const Model& model,
                                   std::span<const Rank> ranks,
                                   std::span<const TokenId> context) {
  check_window(model, context.size(), ranks.size());
  std::vector<TokenId> ctx(context.begin(), context.end());
  ctx.reserve(context.size() + ranks.size());
  std::vector<TokenId> out;
  out.reserve(ranks.size());
  for (Rank r : ranks) {
    const NextTokenRanking ranking = model.next_ranking(ctx);
    const TokenId tok = token_at_rank(ranking, r);
    out.push_back(tok);
    ctx.push_back(tok);
  }
  return out;
}

std::vector<TokenId> pad_message(const Model& model,
                                 std::span<const TokenId> message,
                                 std::span<const TokenId> context,
                                 std::uint32_t pad_len) {
  check_window(model, context.size(), message.size() + pad_len);
  std::vector<TokenId> ctx(context.begin(), context.end());
  ctx.insert(ctx.end(), message.begin(), message.end());
  std::vector<TokenId> out(message.begin(), message.end());
  out.reserve(message.size() + pad_len);
  for (std::uint32_t i = 0; i < pad_len; ++i) {
    const NextTokenRanking ranking = model.next_ranking(ctx);
    const TokenId tok = token_at_rank(ranking, 1);
    out.push_back(tok);
    ctx.push_back(tok);
  }
  return out;
}

StegoText encode(const Model& model, std::string_view plaintext,
                 const StegoKey& key, EncodeStats* stats) {
  validate_key(model, key);
  const std::vector<TokenId> e = model.tokenize_raw(plaintext);
  const std::vector<TokenId> ctx_rank = build_context(model, key, false);
  const std::vector<TokenId> padded =
      pad_message(model, e, ctx_rank, key.pad_len);
  const RankSequence ranks = extract_ranks(model, padded, ctx_rank);

  const std::vector<TokenId> ctx_secret = build_context(model, key, true);
  std::vector<TokenId> s_tokens = emit_by_ranks(model, ranks.ranks, ctx_secret);

  StegoText stego;
  stego.text = model.detokenize_raw(s_tokens);
  if (!key.token_transport) {
    const std::vector<TokenId> retok = model.tokenize_raw(stego.text);
    if (retok != s_tokens) {
      std::size_t pos = 0;
      const std::size_t n = std::min(retok.size(), s_tokens.size());
      while (pos < n && retok[pos] == s_tokens[pos]) ++pos;
      throw RetokenizationUnstable(
          "stegotext does not survive detokenize->tokenize; first divergence "
          "at token position " +
              std::to_string(pos) +
              " (use token transport for this model)",
          pos);
    }
  }
  stego.tokens = std::move(s_tokens);
  stego.fingerprint = model.fingerprint();

  if (stats != nullptr) {
    *stats = EncodeStats{};
    for (Rank r : ranks.ranks) {
      stats->mean_rank += static_cast<double>(r);
      stats->max_rank = std::max(stats->max_rank, r);
    }
    if (!ranks.ranks.empty()) {
      stats->mean_rank /= static_cast<double>(ranks.ranks.size());
    }
  }
  return stego;
}

std::string decode(const Model& model, const StegoText& stego,
                   const StegoKey& key) {
  validate_key(model, key);
  check_fingerprint(model, stego.fingerprint, "stegotext");

  std::vector<TokenId> s_tokens;
  if (key.token_transport) {
    s_tokens = stego.tokens;
    if (s_tokens.empty() && !stego.text.empty()) {
      throw Error(
          "key says token transport but the stegotext carries no tokens");
    }
    for (TokenId t : s_tokens) {
      if (t >= model.vocab_size()) {
        throw TokenOutOfRange("stego token id " + std::to_string(t) +
                              " outside vocabulary");
      }
    }
  } else {
    s_tokens = model.tokenize_raw(stego.text);
  }

  const std::vector<TokenId> ctx_secret = build_context(model, key, true);
  const RankSequence ranks = extract_ranks(model, s_tokens, ctx_secret);

  const std::vector<TokenId> ctx_rank = build_context(model, key, false);
  std::vector<TokenId> padded = emit_by_ranks(model, ranks.ranks, ctx_rank);

  if (padded.size() < key.pad_len) {
    throw Error("stegotext carries " + std::to_string(padded.size()) +
                " tokens, fewer than the key's pad length of " +
                std::to_string(key.pad_len));
  }
  padded.resize(padded.size() - key.pad_len);
  return model.detokenize_raw(padded);
}

}  // namespace rankstego::codec
