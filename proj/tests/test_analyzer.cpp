// SPDX-License-Identifier: Apache-2.0
//
// Analyzer tests: scores against the brute-force oracle, histogram and
// profile accounting, distinguisher behavior, and the corpus report's
// determinism (seed- and thread-invariance).

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "rankstego/analyzer.hpp"
#include "rankstego/codec.hpp"
#include "rankstego/errors.hpp"
#include "rankstego/reference_model.hpp"
#include "rankstego/rng.hpp"
#include "test_helpers.hpp"

using namespace rankstego;
namespace an = rankstego::analyzer;

namespace {

codec::StegoKey report_key(const Model& model, std::string k,
                           std::uint32_t pad_len) {
  codec::StegoKey key;
  key.k = std::move(k);
  key.pad_len = pad_len;
  key.fingerprint = model.fingerprint();
  return key;
}

}  // namespace

TEST_CASE("scores match the brute-force oracle to 1e-9 relative") {
  SplitMix64 rng(0x5c07e);
  for (int trial = 0; trial < 40; ++trial) {
    std::string corpus;
    for (std::size_t i = 0, n = 30 + rng.below(120); i < n; ++i) {
      corpus.push_back(static_cast<char>('a' + rng.below(6)));
    }
    ReferenceBigramModel model(corpus);
    oracle::BigramOracle ora{corpus, 1.0};

    std::string context, text;
    for (std::size_t i = 0, n = rng.below(4); i < n; ++i) {
      context.push_back(static_cast<char>('a' + rng.below(6)));
    }
    for (std::size_t i = 0, n = 1 + rng.below(30); i < n; ++i) {
      text.push_back(static_cast<char>(0x20 + rng.below(95)));
    }

    const auto got = an::score(model, testutil::bytes_to_tokens(text),
                               testutil::bytes_to_tokens(context));
    const double expect = ora.log_score(context, text);
    CHECK(got.log_prob == doctest::Approx(expect).epsilon(1e-9));
    CHECK(got.token_count == text.size());
    CHECK(got.fingerprint == model.fingerprint());
  }
}

TEST_CASE("the empty text scores zero") {
  auto model = testutil::bundled_model();
  const auto s = an::score(*model, {});
  CHECK(s.log_prob == 0.0);
  CHECK(s.token_count == 0);
}

TEST_CASE("scores are exactly additive across a split") {
  auto model = testutil::bundled_model();
  const std::string whole = "additivity is the defining property";
  for (std::size_t cut : {std::size_t{1}, std::size_t{7}, whole.size() - 1}) {
    const std::string a = whole.substr(0, cut);
    const std::string b = whole.substr(cut);
    const auto sw = an::score(*model, testutil::bytes_to_tokens(whole));
    const auto sa = an::score(*model, testutil::bytes_to_tokens(a));
    const auto sb = an::score(*model, testutil::bytes_to_tokens(b),
                              testutil::bytes_to_tokens(a));
    CHECK(sw.log_prob ==
          doctest::Approx(sa.log_prob + sb.log_prob).epsilon(1e-12));
  }
}

TEST_CASE("score rejects foreign tokens and oversized inputs") {
  auto model = testutil::bundled_model();
  const std::vector<TokenId> foreign = {256};
  CHECK_THROWS_AS(an::score(*model, foreign), TokenOutOfRange);

  ReferenceBigramModel tiny(testutil::bundled_corpus(), 1.0, /*window=*/4);
  const auto five = testutil::bytes_to_tokens("12345");
  CHECK_THROWS_AS(an::score(tiny, five), ContextOverflow);
}

TEST_CASE("greedy text is all rank 1 and pins the argmax probability") {
  auto model = testutil::bundled_model();
  const std::vector<Rank> ones(50, 1);
  const auto greedy = codec::emit_by_ranks(*model, ones, {});
  const auto hist = an::rank_histogram(*model, {greedy});
  CHECK(hist.total == 50);
  CHECK(hist.exact[1] == 50);
  CHECK(hist.share(1) == 1.0);
  for (Rank r = 2; r <= an::RankHistogram::kExactLimit; ++r) {
    CHECK(hist.exact[r] == 0);
  }
  for (const auto& b : hist.buckets) CHECK(b.count == 0);

  // mean_prob_top[0] must equal the walk's mean argmax probability, which
  // the oracle recomputes from raw counts.
  oracle::BigramOracle ora{testutil::bundled_corpus(), 1.0};
  std::string walk;
  double sum = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto ord = ora.ordering(oracle::BigramOracle::last_of(walk));
    sum += ora.probs(oracle::BigramOracle::last_of(walk))[ord[0]];
    walk.push_back(static_cast<char>(static_cast<unsigned char>(ord[0])));
  }
  CHECK(hist.mean_prob_top[0] == doctest::Approx(sum / 50.0).epsilon(1e-12));
  CHECK(testutil::bytes_to_tokens(walk) == greedy);
}

TEST_CASE("histogram counts conserve and buckets tile (100, vocab]") {
  auto model = testutil::bundled_model();
  SplitMix64 rng(0x4157);
  std::vector<std::vector<TokenId>> corpus;
  for (int i = 0; i < 10; ++i) {
    std::vector<TokenId> seq;
    for (int j = 0; j < 40; ++j) seq.push_back(static_cast<TokenId>(rng.below(256)));
    corpus.push_back(std::move(seq));
  }
  const auto hist = an::rank_histogram(*model, corpus);
  CHECK(hist.total == 400);

  std::uint64_t sum = 0;
  for (Rank r = 1; r <= an::RankHistogram::kExactLimit; ++r) sum += hist.exact[r];
  for (const auto& b : hist.buckets) sum += b.count;
  CHECK(sum == hist.total);

  // V = 256: exactly two buckets, (101..200] then the vocab-clamped tail.
  REQUIRE(hist.buckets.size() == 2);
  CHECK(hist.buckets[0].lo == 101);
  CHECK(hist.buckets[0].hi == 200);
  CHECK(hist.buckets[1].lo == 201);
  CHECK(hist.buckets[1].hi == 256);
}

TEST_CASE("positional profile matches brute-force percentiles") {
  const std::string corpus_text = "the quick brown fox jumps over the lazy dog";
  ReferenceBigramModel model(corpus_text);
  oracle::BigramOracle ora{corpus_text, 1.0};

  SplitMix64 rng(0x99);
  const std::string context = "th";
  std::vector<std::string> texts;
  std::vector<std::vector<TokenId>> corpus;
  for (int i = 0; i < 17; ++i) {  // odd count exercises index rounding
    std::string t;
    for (int j = 0; j < 9; ++j) t.push_back(static_cast<char>('a' + rng.below(26)));
    texts.push_back(t);
    corpus.push_back(testutil::bytes_to_tokens(t));
  }

  const auto profile =
      an::positional_profile(model, corpus, testutil::bytes_to_tokens(context));
  REQUIRE(profile.positions.size() == 9);
  CHECK(profile.sample_count == 17);

  for (std::size_t pos = 0; pos < 9; ++pos) {
    std::vector<std::uint32_t> col;
    double sum = 0.0;
    for (const auto& t : texts) {
      const auto ranks = ora.extract(context, t);
      col.push_back(ranks[pos]);
      sum += static_cast<double>(ranks[pos]);
    }
    std::sort(col.begin(), col.end());
    auto pct = [&](double q) {
      const auto idx = static_cast<std::size_t>(
          std::ceil(q * static_cast<double>(col.size())));
      return col[std::min(std::max<std::size_t>(idx, 1), col.size()) - 1];
    };
    const auto& p = profile.positions[pos];
    CHECK(p.p20 == pct(0.20));
    CHECK(p.p25 == pct(0.25));
    CHECK(p.median == pct(0.50));
    CHECK(p.p75 == pct(0.75));
    CHECK(p.p80 == pct(0.80));
    CHECK(p.mean == doctest::Approx(sum / 17.0).epsilon(1e-12));
  }
}

TEST_CASE("positional profile exposes the trailing greedy pad of stegotext") {
  auto model = testutil::bundled_model();
  const auto key = report_key(*model, "profile secret", 5);
  SplitMix64 rng(0xabc);
  std::vector<std::vector<TokenId>> stegos;
  for (int i = 0; i < 20; ++i) {
    const auto stego = codec::encode(*model, rng.printable_ascii(10), key);
    stegos.push_back(stego.tokens);
  }
  const auto secret_ctx = codec::build_context(*model, key, true);
  const auto profile = an::positional_profile(*model, stegos, secret_ctx);
  REQUIRE(profile.positions.size() == 15);
  // Under the secret context the stego ranks replay the padded message
  // ranks, and the last pad_len of those are greedy rank 1 by construction.
  for (std::size_t pos = 10; pos < 15; ++pos) {
    const auto& p = profile.positions[pos];
    CHECK(p.p20 == 1);
    CHECK(p.median == 1);
    CHECK(p.p80 == 1);
    CHECK(p.mean == 1.0);
  }
}

TEST_CASE("profile and distinguish insist on equal lengths") {
  auto model = testutil::bundled_model();
  const std::vector<std::vector<TokenId>> unequal = {
      testutil::bytes_to_tokens("abcd"), testutil::bytes_to_tokens("abc")};
  CHECK_THROWS_AS(an::positional_profile(*model, unequal), LengthMismatch);
  CHECK_THROWS_AS(an::distinguish(*model, unequal), LengthMismatch);
  CHECK_THROWS_AS(an::positional_profile(*model, {}), Error);
  CHECK_THROWS_AS(
      an::distinguish(*model, {testutil::bytes_to_tokens("abcd")}), Error);
}

TEST_CASE("distinguish prefers real text over random bytes") {
  auto model = testutil::bundled_model();
  const std::string& corpus = testutil::bundled_corpus();
  SplitMix64 rng(0xd157);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t len = 60;
    const std::size_t off = rng.below(corpus.size() - len);
    const std::string real = corpus.substr(off, len);
    const std::string fake = rng.printable_ascii(len);
    const auto res = an::distinguish(
        *model, {testutil::bytes_to_tokens(fake),
                 testutil::bytes_to_tokens(real)});
    CHECK(res.best_index == 1);
    CHECK(res.scores.size() == 2);
    CHECK(res.scores[1].log_prob > res.scores[0].log_prob);
  }
}

TEST_CASE("distinguish ties keep the earliest candidate") {
  auto model = testutil::bundled_model();
  const auto dup = testutil::bytes_to_tokens("identical");
  const auto res = an::distinguish(*model, {dup, dup, dup});
  CHECK(res.best_index == 0);
}

TEST_CASE("corpus report accounts for every row in fixed order") {
  auto model = testutil::bundled_model();
  const std::vector<std::string> reals = {"first sample text#1",
                                          "second sample text2",
                                          "third sample text#3"};
  REQUIRE(reals[0].size() == reals[1].size());
  REQUIRE(reals[0].size() == reals[2].size());

  const std::vector<codec::StegoKey> keys = {
      report_key(*model, "alpha key", 0), report_key(*model, "beta key", 3)};
  an::ReportOptions opts;
  opts.seed = 7;
  opts.ascii_baselines = 3;
  opts.word_baselines = 2;
  opts.word_list = {"apple", "orange", "river", "stone"};

  const auto report = an::corpus_report(*model, reals, {0, 2}, keys, opts);
  REQUIRE(report.rows.size() == 3 + 2 * 2 + 3 + 2);

  CHECK(report.rows[0].id == "real/0");
  CHECK(report.rows[2].id == "real/2");
  CHECK(report.rows[3].id == "stego/0-k0");
  CHECK(report.rows[4].id == "stego/0-k1");
  CHECK(report.rows[5].id == "stego/2-k0");
  CHECK(report.rows[6].id == "stego/2-k1");
  CHECK(report.rows[7].id == "baseline/ascii-0");
  CHECK(report.rows[10].id == "baseline/words-0");
  CHECK(report.rows[11].id == "baseline/words-1");

  for (const auto& row : report.rows) {
    if (row.role == "stego") continue;
    CHECK(row.token_count == reals[0].size());
    CHECK(row.key_id == "-");
    CHECK(!row.log_prob_alt.has_value());
  }
  // Stego rows carry the key's pad on top of the message length.
  CHECK(report.rows[3].token_count == reals[0].size() + 0);
  CHECK(report.rows[4].token_count == reals[0].size() + 3);
  CHECK(report.rows[3].key_id == "k0");
  CHECK(report.rows[4].key_id == "k1");

  // Stego scores match re-encoding by hand.
  const auto stego = codec::encode(*model, reals[0], keys[0]);
  CHECK(report.rows[3].log_prob ==
        doctest::Approx(an::score(*model, stego.tokens).log_prob)
            .epsilon(1e-12));

  REQUIRE(report.summaries.size() == 3);
  CHECK(report.summaries[0].role == "real");
  CHECK(report.summaries[0].count == 3);
  CHECK(report.summaries[1].role == "stego");
  CHECK(report.summaries[1].count == 4);
  CHECK(report.summaries[2].role == "baseline");
  CHECK(report.summaries[2].count == 5);
  CHECK(report.summaries[0].min <= report.summaries[0].median);
  CHECK(report.summaries[0].median <= report.summaries[0].max);
}

TEST_CASE("corpus report is seed-deterministic and thread-invariant") {
  auto model = testutil::bundled_model();
  const std::vector<std::string> reals = {"the gardeners kept notes",
                                          "a museum opened at noon!"};
  REQUIRE(reals[0].size() == reals[1].size());
  const std::vector<codec::StegoKey> keys = {report_key(*model, "k", 2)};

  an::ReportOptions opts;
  opts.seed = 99;
  opts.ascii_baselines = 4;
  opts.word_baselines = 0;

  const auto a = an::corpus_report(*model, reals, {0, 1}, keys, opts);
  const auto b = an::corpus_report(*model, reals, {0, 1}, keys, opts);
  auto opts_mt = opts;
  opts_mt.jobs = 4;
  const auto c = an::corpus_report(*model, reals, {0, 1}, keys, opts_mt);

  REQUIRE(a.rows.size() == b.rows.size());
  REQUIRE(a.rows.size() == c.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].id == b.rows[i].id);
    CHECK(a.rows[i].log_prob == b.rows[i].log_prob);  // bitwise
    CHECK(a.rows[i].id == c.rows[i].id);
    CHECK(a.rows[i].log_prob == c.rows[i].log_prob);
  }

  auto opts2 = opts;
  opts2.seed = 100;
  const auto d = an::corpus_report(*model, reals, {0, 1}, keys, opts2);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].role == "baseline" &&
        a.rows[i].log_prob != d.rows[i].log_prob) {
      any_differs = true;
    }
  }
  CHECK(any_differs);  // a different seed samples different baselines
}

TEST_CASE("corpus report scores under an alternate model when given") {
  auto model = testutil::bundled_model();
  ReferenceBigramModel alt("a completely different training text");
  const std::vector<std::string> reals = {"cross-model scoring"};
  an::ReportOptions opts;
  opts.ascii_baselines = 1;
  opts.word_baselines = 0;
  opts.alt_scorer = &alt;

  const auto report = an::corpus_report(*model, reals, {}, {}, opts);
  REQUIRE(report.rows.size() == 2);
  for (const auto& row : report.rows) {
    REQUIRE(row.log_prob_alt.has_value());
    CHECK(*row.log_prob_alt != row.log_prob);
  }
  const auto expect =
      an::score(alt, testutil::bytes_to_tokens(reals[0])).log_prob;
  CHECK(*report.rows[0].log_prob_alt == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("corpus report validates its inputs") {
  auto model = testutil::bundled_model();
  const std::vector<std::string> reals = {"abcd", "efgh"};
  an::ReportOptions opts;
  opts.word_baselines = 1;  // but no word list
  opts.ascii_baselines = 0;
  CHECK_THROWS_AS(an::corpus_report(*model, reals, {}, {}, opts), Error);

  an::ReportOptions ok;
  ok.ascii_baselines = 0;
  ok.word_baselines = 0;
  CHECK_THROWS_AS(an::corpus_report(*model, {}, {}, {}, ok), Error);
  CHECK_THROWS_AS(an::corpus_report(*model, reals, {2}, {}, ok), Error);
  const std::vector<std::string> unequal = {"abcd", "efg"};
  CHECK_THROWS_AS(an::corpus_report(*model, unequal, {}, {}, ok),
                  LengthMismatch);
}

TEST_CASE("texts can be truncated to an exact token count") {
  auto model = testutil::bundled_model();
  CHECK(an::truncate_to_token_count(*model, "hello world", 5) == "hello");
  CHECK(an::truncate_to_token_count(*model, "abc", 3) == "abc");
  CHECK_THROWS_AS(an::truncate_to_token_count(*model, "ab", 3), LengthMismatch);
}
