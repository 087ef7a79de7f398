// SPDX-License-Identifier: Apache-2.0

#include "rankstego/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "rankstego/errors.hpp"
#include "rankstego/rng.hpp"

namespace rankstego::analyzer {

namespace {

/// Nearest-rank percentile: value at 1-based index ceil(q * n) of the sorted
/// sample.
template <typename T>
T nearest_rank(const std::vector<T>& sorted, double q) {
  const std::size_t n = sorted.size();
  std::size_t idx = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(n)));
  if (idx < 1) idx = 1;
  if (idx > n) idx = n;
  return sorted[idx - 1];
}

void require_equal_lengths(const std::vector<std::vector<TokenId>>& corpus) {
  for (std::size_t i = 1; i < corpus.size(); ++i) {
    if (corpus[i].size() != corpus[0].size()) {
      throw LengthMismatch("sequence " + std::to_string(i) + " has " +
                           std::to_string(corpus[i].size()) +
                           " tokens, expected " +
                           std::to_string(corpus[0].size()) +
                           " (all inputs must be truncated to one length)");
    }
  }
}

}  // namespace

PlausibilityScore score(const Model& model, std::span<const TokenId> tokens,
                        std::span<const TokenId> context) {
  if (context.size() + tokens.size() > model.context_window()) {
    throw ContextOverflow("scored text exceeds the model context window");
  }
  std::vector<TokenId> ctx(context.begin(), context.end());
  ctx.reserve(context.size() + tokens.size());
  PlausibilityScore s;
  s.fingerprint = model.fingerprint();
  for (TokenId tok : tokens) {
    const NextTokenRanking r = model.next_ranking(ctx);
    if (tok >= r.vocab_size()) {
      throw TokenOutOfRange("token id " + std::to_string(tok) +
                            " outside vocabulary");
    }
    s.log_prob += std::log(r.probs[tok]);
    s.token_count += 1;
    ctx.push_back(tok);
  }
  return s;
}

RankHistogram rank_histogram(const Model& model,
                             const std::vector<std::vector<TokenId>>& corpus,
                             std::span<const TokenId> context) {
  RankHistogram h;
  h.exact.assign(RankHistogram::kExactLimit + 1, 0);
  const auto vocab = static_cast<Rank>(model.vocab_size());
  for (Rank lo = RankHistogram::kExactLimit + 1, span = RankHistogram::kExactLimit;
       lo <= vocab; span *= 2) {
    RankHistogram::Bucket b;
    b.lo = lo;
    b.hi = std::min<Rank>(vocab, lo + span - 1);
    h.buckets.push_back(b);
    lo = b.hi + 1;
  }

  std::array<double, 3> prob_sums{};
  for (const auto& seq : corpus) {
    std::vector<TokenId> ctx(context.begin(), context.end());
    ctx.reserve(context.size() + seq.size());
    for (TokenId tok : seq) {
      const NextTokenRanking r = model.next_ranking(ctx);
      const Rank rank = rank_of(r, tok);
      if (rank <= RankHistogram::kExactLimit) {
        h.exact[rank] += 1;
        if (rank <= 3) prob_sums[rank - 1] += r.probs[tok];
      } else {
        for (auto& b : h.buckets) {
          if (rank >= b.lo && rank <= b.hi) {
            b.count += 1;
            break;
          }
        }
      }
      h.total += 1;
      ctx.push_back(tok);
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const std::uint64_t n = h.exact[i + 1];
    h.mean_prob_top[i] = n == 0 ? 0.0 : prob_sums[i] / static_cast<double>(n);
  }
  return h;
}

PositionalRankProfile positional_profile(
    const Model& model, const std::vector<std::vector<TokenId>>& corpus,
    std::span<const TokenId> context) {
  if (corpus.empty()) {
    throw Error("positional profile: corpus must be non-empty");
  }
  require_equal_lengths(corpus);
  const std::size_t len = corpus[0].size();

  PositionalRankProfile profile;
  profile.sample_count = corpus.size();
  std::vector<std::vector<Rank>> by_position(len);
  for (auto& v : by_position) v.reserve(corpus.size());

  for (const auto& seq : corpus) {
    const auto ranks = codec::extract_ranks(model, seq, context);
    for (std::size_t j = 0; j < len; ++j) {
      by_position[j].push_back(ranks.ranks[j]);
    }
  }

  profile.positions.resize(len);
  for (std::size_t j = 0; j < len; ++j) {
    auto& col = by_position[j];
    std::sort(col.begin(), col.end());
    auto& p = profile.positions[j];
    p.p20 = nearest_rank(col, 0.20);
    p.p25 = nearest_rank(col, 0.25);
    p.median = nearest_rank(col, 0.50);
    p.p75 = nearest_rank(col, 0.75);
    p.p80 = nearest_rank(col, 0.80);
    double sum = 0.0;
    for (Rank r : col) sum += static_cast<double>(r);
    p.mean = sum / static_cast<double>(col.size());
  }
  return profile;
}

DistinguishResult distinguish(const Model& model,
                              const std::vector<std::vector<TokenId>>& candidates,
                              std::span<const TokenId> context) {
  if (candidates.size() < 2) {
    throw Error("distinguish: need at least two candidates");
  }
  require_equal_lengths(candidates);
  DistinguishResult out;
  out.scores.reserve(candidates.size());
  for (const auto& c : candidates) {
    out.scores.push_back(score(model, c, context));
  }
  out.best_index = 0;
  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    if (out.scores[i].log_prob > out.scores[out.best_index].log_prob) {
      out.best_index = i;  // strictly greater: ties keep the earliest
    }
  }
  return out;
}

namespace {

std::vector<TokenId> sample_ascii_tokens(const Model& model, SplitMix64& rng,
                                         std::size_t target_tokens) {
  std::string text;
  std::vector<TokenId> tokens;
  while (true) {
    text += rng.printable_ascii(std::max<std::size_t>(target_tokens, 16));
    tokens = model.tokenize_raw(text);
    if (tokens.size() >= target_tokens) break;
  }
  tokens.resize(target_tokens);
  return tokens;
}

std::vector<TokenId> sample_word_tokens(const Model& model, SplitMix64& rng,
                                        const std::vector<std::string>& words,
                                        std::size_t target_tokens) {
  std::string text;
  std::vector<TokenId> tokens;
  while (true) {
    if (!text.empty()) text += ' ';
    text += words[rng.below(words.size())];
    tokens = model.tokenize_raw(text);
    if (tokens.size() >= target_tokens) break;
  }
  tokens.resize(target_tokens);
  return tokens;
}

RoleSummary summarize(const std::string& role, std::vector<double> values) {
  RoleSummary s;
  s.role = role;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.p5 = nearest_rank(values, 0.05);
  s.p25 = nearest_rank(values, 0.25);
  s.median = nearest_rank(values, 0.50);
  s.p75 = nearest_rank(values, 0.75);
  s.p95 = nearest_rank(values, 0.95);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

}  // namespace

Report corpus_report(const Model& model,
                     const std::vector<std::string>& real_texts,
                     const std::vector<std::size_t>& original_indices,
                     const std::vector<codec::StegoKey>& keys,
                     const ReportOptions& opts) {
  if (real_texts.empty()) throw Error("report: no real texts given");
  if (opts.word_baselines > 0 && opts.word_list.empty()) {
    throw Error("report: word baselines requested but no word list given");
  }
  for (std::size_t oi : original_indices) {
    if (oi >= real_texts.size()) {
      throw Error("report: original index " + std::to_string(oi) +
                  " out of range");
    }
  }

  std::vector<std::vector<TokenId>> real_tokens;
  real_tokens.reserve(real_texts.size());
  for (const auto& t : real_texts) real_tokens.push_back(model.tokenize_raw(t));
  require_equal_lengths(real_tokens);
  const std::size_t common_len = real_tokens[0].size();

  // Assemble every row's tokens up front (baseline sampling is sequential so
  // the report does not depend on thread scheduling), then score in
  // parallel.
  struct Pending {
    ReportRow row;
    std::vector<TokenId> tokens;
    const std::string* encode_text = nullptr;  // stego rows: encode first
    const codec::StegoKey* key = nullptr;
  };
  std::vector<Pending> pending;

  for (std::size_t i = 0; i < real_tokens.size(); ++i) {
    Pending p;
    p.row = ReportRow{"real/" + std::to_string(i), "real", "-", 0, 0.0, {}};
    p.tokens = real_tokens[i];
    pending.push_back(std::move(p));
  }
  for (std::size_t oi : original_indices) {
    for (std::size_t j = 0; j < keys.size(); ++j) {
      Pending p;
      p.row = ReportRow{"stego/" + std::to_string(oi) + "-k" +
                            std::to_string(j),
                        "stego", "k" + std::to_string(j), 0, 0.0, {}};
      p.encode_text = &real_texts[oi];
      p.key = &keys[j];
      pending.push_back(std::move(p));
    }
  }
  SplitMix64 rng(opts.seed ^ 0x72616e6b73746567ULL);
  for (std::size_t i = 0; i < opts.ascii_baselines; ++i) {
    Pending p;
    p.row = ReportRow{"baseline/ascii-" + std::to_string(i), "baseline", "-",
                      0, 0.0, {}};
    p.tokens = sample_ascii_tokens(model, rng, common_len);
    pending.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < opts.word_baselines; ++i) {
    Pending p;
    p.row = ReportRow{"baseline/words-" + std::to_string(i), "baseline", "-",
                      0, 0.0, {}};
    p.tokens = sample_word_tokens(model, rng, opts.word_list, common_len);
    pending.push_back(std::move(p));
  }

  auto work = [&model, &opts](Pending& p) {
    if (p.encode_text != nullptr) {
      const codec::StegoText stego = codec::encode(model, *p.encode_text, *p.key);
      p.tokens = stego.tokens;
    }
    p.row.token_count = p.tokens.size();
    p.row.log_prob = score(model, p.tokens).log_prob;
    if (opts.alt_scorer != nullptr) {
      p.row.log_prob_alt = score(*opts.alt_scorer, p.tokens).log_prob;
    }
  };

  const unsigned jobs =
      std::max(1u, std::min<unsigned>(opts.jobs,
                                      static_cast<unsigned>(pending.size())));
  if (jobs <= 1) {
    for (auto& p : pending) work(p);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> failures(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < pending.size(); i += jobs) {
            work(pending[i]);
          }
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  Report report;
  report.rows.reserve(pending.size());
  for (auto& p : pending) report.rows.push_back(std::move(p.row));

  for (const char* role : {"real", "stego", "baseline"}) {
    std::vector<double> values;
    for (const auto& r : report.rows) {
      if (r.role == role) values.push_back(r.log_prob);
    }
    if (!values.empty()) report.summaries.push_back(summarize(role, values));
  }
  return report;
}

std::string truncate_to_token_count(const Model& model, std::string_view text,
                                    std::size_t n) {
  std::vector<TokenId> tokens = model.tokenize_raw(text);
  if (tokens.size() < n) {
    throw LengthMismatch("text tokenizes to " + std::to_string(tokens.size()) +
                         " tokens, shorter than the requested " +
                         std::to_string(n));
  }
  tokens.resize(n);
  return model.detokenize_raw(tokens);
}

}  // namespace rankstego::analyzer
