// SPDX-License-Identifier: Apache-2.0
//
// rankstego — command-line front end for the token-rank steganography
// library.
//
// Key material is only ever read from files or environment variables, never
// from argv (argv is visible to every process on the machine), and is never
// echoed to any stream.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rankstego/analyzer.hpp"
#include "rankstego/bridge.hpp"
#include "rankstego/codec.hpp"
#include "rankstego/exit_codes.hpp"
#include "rankstego/io.hpp"
#include "rankstego/model.hpp"
#include "rankstego/rank_table.hpp"
#include "rankstego/recode.hpp"
#include "rankstego/reference_model.hpp"
#include "rankstego/relay.hpp"
#include "rankstego/rng.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rankstego;

constexpr const char* kModelEnvVar = "RANKSTEGO_MODEL";

struct GlobalOptions {
  std::string model_path;
  std::string ref_corpus;
  std::string backend_model;
  double smoothing = ReferenceBigramModel::kDefaultSmoothing;
  std::size_t window = ReferenceBigramModel::kDefaultWindow;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

/// Resolves the active model: --backend-model, --model, --ref-corpus, or the
/// RANKSTEGO_MODEL environment variable (a saved model file), in that order
/// of precedence.  Every resolved model passes the determinism probe before
/// any coding happens.
std::shared_ptr<const Model> resolve_model(const GlobalOptions& g) {
  if (!g.model_path.empty() && !g.ref_corpus.empty()) {
    throw Error("choose exactly one of --model and --ref-corpus");
  }
  std::shared_ptr<const Model> model;
  if (!g.backend_model.empty()) {
    model = load_backend_model(BackendConfig{g.backend_model, ""});
  } else if (!g.model_path.empty()) {
    model = std::make_shared<ReferenceBigramModel>(
        ReferenceBigramModel::load(g.model_path, g.window));
  } else if (!g.ref_corpus.empty()) {
    model = std::make_shared<ReferenceBigramModel>(io::read_file(g.ref_corpus),
                                                   g.smoothing, g.window);
  } else if (const char* env = std::getenv(kModelEnvVar);
             env != nullptr && env[0] != '\0') {
    model = std::make_shared<ReferenceBigramModel>(
        ReferenceBigramModel::load(env, g.window));
  } else {
    throw Error(std::string("no model configured: pass --model or "
                            "--ref-corpus, or set ") +
                kModelEnvVar);
  }
  Session::determinism_probe(*model);
  return model;
}

/// Secret material comes from a file or an environment variable, never argv.
std::string read_secret(const std::string& file, const std::string& env_var,
                        const char* what) {
  if (!file.empty() && !env_var.empty()) {
    throw Error(std::string(what) + ": choose file or environment, not both");
  }
  if (!file.empty()) return io::read_file(file);
  if (!env_var.empty()) {
    const char* v = std::getenv(env_var.c_str());
    if (v == nullptr) {
      throw Error(std::string(what) + ": environment variable " + env_var +
                  " is not set");
    }
    return v;
  }
  return {};
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    io::write_file(out_path, content);
  }
}

std::vector<std::vector<TokenId>> tokenize_manifest(
    const Model& model, const std::string& list_path,
    std::vector<std::string>* ids = nullptr) {
  std::vector<std::vector<TokenId>> corpus;
  for (const auto& path : io::read_lines(list_path)) {
    const std::string text = io::read_file(path);
    io::require_utf8(text, path.c_str());
    corpus.push_back(model.tokenize_raw(text));
    if (ids != nullptr) ids->push_back(path);
  }
  return corpus;
}

std::vector<TokenId> load_context(const Model& model,
                                  const std::string& context_file) {
  if (context_file.empty()) return {};
  const std::string text = io::read_file(context_file);
  io::require_utf8(text, "context file");
  return model.tokenize_raw(text);
}

std::string fixed9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

// --- subcommand bodies --------------------------------------------------------

struct KeygenArgs {
  std::string out, k_file, k_env, k_prime_file, k_prime_env;
  std::uint32_t pad_len = codec::kDefaultPadLen;
  bool bos = false, token_transport = false, allow_empty_k = false;
  bool k_prime_given() const {
    return !k_prime_file.empty() || !k_prime_env.empty();
  }
};

int run_keygen(const GlobalOptions& g, const KeygenArgs& a) {
  const auto model = resolve_model(g);
  codec::StegoKey key;
  key.k = read_secret(a.k_file, a.k_env, "secret prompt");
  if (key.k.empty() && a.k_file.empty() && a.k_env.empty()) {
    // Fresh nonce prompt: deterministic under --seed, random otherwise.
    const std::uint64_t seed =
        g.seed_given ? g.seed : std::random_device{}();
    SplitMix64 rng(seed);
    key.k = rng.printable_ascii(32);
  }
  if (a.k_prime_given()) {
    key.k_prime = read_secret(a.k_prime_file, a.k_prime_env, "ranking prompt");
  }
  key.pad_len = a.pad_len;
  key.bos_policy = a.bos ? codec::BosPolicy::kPrepend : codec::BosPolicy::kNone;
  key.token_transport = a.token_transport;
  key.allow_empty_k = a.allow_empty_k;
  key.fingerprint = model->fingerprint();

  io::write_key(key, a.out);
  // Read back and verify immediately: a key that does not round-trip or does
  // not match the active model must never leave the machine.
  const codec::StegoKey readback = io::read_key(a.out);
  check_fingerprint(*model, readback.fingerprint, "generated key");
  if (io::key_to_json(readback) != io::key_to_json(key)) {
    throw Error("generated key failed its round-trip check");
  }
  std::cerr << "key written to " << a.out << " (fingerprint "
            << key.fingerprint.hex().substr(0, 12) << "...)\n";
  return kExitOk;
}

struct EncodeArgs {
  std::string key, in, out;
  bool stats = false;
  double warn_mean_rank = 0.0;  // 0 = auto (vocab/16)
};

int run_encode(const GlobalOptions& g, const EncodeArgs& a) {
  const auto model = resolve_model(g);
  const codec::StegoKey key = io::read_key(a.key);
  const std::string plaintext = io::read_file(a.in);
  io::require_utf8(plaintext, "plaintext input");

  codec::EncodeStats stats;
  const codec::StegoText stego = codec::encode(*model, plaintext, key, &stats);
  io::write_stego(stego, key, a.out);

  const double threshold = a.warn_mean_rank > 0.0
                               ? a.warn_mean_rank
                               : static_cast<double>(model->vocab_size()) / 16.0;
  if (stats.mean_rank > threshold) {
    std::cerr << "warning: mean emitted rank " << fixed9(stats.mean_rank)
              << " exceeds " << fixed9(threshold)
              << "; the ranking context explains the message poorly and the "
                 "stegotext will look improbable\n";
  }
  if (a.stats) {
    std::cerr << "tokens=" << stego.token_count()
              << " mean_rank=" << fixed9(stats.mean_rank)
              << " max_rank=" << stats.max_rank << "\n";
  }
  return kExitOk;
}

struct DecodeArgs {
  std::string key, in, out;
};

int run_decode(const GlobalOptions& g, const DecodeArgs& a) {
  const auto model = resolve_model(g);
  const codec::StegoKey key = io::read_key(a.key);
  const codec::StegoText stego = io::read_stego(a.in, key);
  const std::string plaintext = codec::decode(*model, stego, key);
  write_output(a.out, plaintext);
  return kExitOk;
}

struct AnalyzeArgs {
  std::string list, out, context_file;
  // report-only:
  std::string keys_manifest, originals_csv, wordlist, alt_model;
  std::size_t ascii_baselines = 20;
  std::size_t word_baselines = 20;
  std::size_t truncate = 0;
  unsigned jobs = 1;
};

int run_analyze_score(const GlobalOptions& g, const AnalyzeArgs& a) {
  const auto model = resolve_model(g);
  const auto context = load_context(*model, a.context_file);
  std::vector<std::string> ids;
  const auto corpus = tokenize_manifest(*model, a.list, &ids);
  std::string out = "id\ttoken_count\tlog_prob\n";
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto s = analyzer::score(*model, corpus[i], context);
    out += ids[i] + "\t" + std::to_string(s.token_count) + "\t" +
           fixed9(s.log_prob) + "\n";
  }
  write_output(a.out, out);
  return kExitOk;
}

int run_analyze_hist(const GlobalOptions& g, const AnalyzeArgs& a) {
  const auto model = resolve_model(g);
  const auto context = load_context(*model, a.context_file);
  const auto corpus = tokenize_manifest(*model, a.list);
  const auto h = analyzer::rank_histogram(*model, corpus, context);
  std::string out = "rank\tcount\tshare\n";
  for (Rank r = 1; r <= analyzer::RankHistogram::kExactLimit; ++r) {
    out += std::to_string(r) + "\t" + std::to_string(h.exact[r]) + "\t" +
           fixed9(h.share(r)) + "\n";
  }
  for (const auto& b : h.buckets) {
    out += std::to_string(b.lo) + "-" + std::to_string(b.hi) + "\t" +
           std::to_string(b.count) + "\t" +
           fixed9(h.total == 0 ? 0.0
                               : static_cast<double>(b.count) /
                                     static_cast<double>(h.total)) +
           "\n";
  }
  out += "# total\t" + std::to_string(h.total) + "\n";
  for (int i = 0; i < 3; ++i) {
    out += "# mean_prob\trank=" + std::to_string(i + 1) + "\t" +
           fixed9(h.mean_prob_top[i]) + "\n";
  }
  write_output(a.out, out);
  return kExitOk;
}

int run_analyze_profile(const GlobalOptions& g, const AnalyzeArgs& a) {
  const auto model = resolve_model(g);
  const auto context = load_context(*model, a.context_file);
  const auto corpus = tokenize_manifest(*model, a.list);
  const auto p = analyzer::positional_profile(*model, corpus, context);
  std::string out = "position\tp20\tp25\tmedian\tp75\tp80\tmean\n";
  for (std::size_t j = 0; j < p.positions.size(); ++j) {
    const auto& s = p.positions[j];
    out += std::to_string(j + 1) + "\t" + std::to_string(s.p20) + "\t" +
           std::to_string(s.p25) + "\t" + std::to_string(s.median) + "\t" +
           std::to_string(s.p75) + "\t" + std::to_string(s.p80) + "\t" +
           fixed9(s.mean) + "\n";
  }
  out += "# samples\t" + std::to_string(p.sample_count) + "\n";
  write_output(a.out, out);
  return kExitOk;
}

int run_analyze_distinguish(const GlobalOptions& g, const AnalyzeArgs& a) {
  const auto model = resolve_model(g);
  const auto context = load_context(*model, a.context_file);
  std::vector<std::string> ids;
  const auto corpus = tokenize_manifest(*model, a.list, &ids);
  const auto r = analyzer::distinguish(*model, corpus, context);
  std::string out = "id\ttoken_count\tlog_prob\n";
  for (std::size_t i = 0; i < r.scores.size(); ++i) {
    out += ids[i] + "\t" + std::to_string(r.scores[i].token_count) + "\t" +
           fixed9(r.scores[i].log_prob) + "\n";
  }
  out += "# best\t" + ids[r.best_index] + "\n";
  write_output(a.out, out);
  return kExitOk;
}

int run_analyze_report(const GlobalOptions& g, const AnalyzeArgs& a) {
  const auto model = resolve_model(g);
  std::vector<std::string> reals;
  for (const auto& path : io::read_lines(a.list)) {
    std::string text = io::read_file(path);
    io::require_utf8(text, path.c_str());
    if (a.truncate > 0) {
      text = analyzer::truncate_to_token_count(*model, text, a.truncate);
    }
    reals.push_back(std::move(text));
  }

  std::vector<codec::StegoKey> keys;
  if (!a.keys_manifest.empty()) {
    for (const auto& path : io::read_lines(a.keys_manifest)) {
      keys.push_back(io::read_key(path));
    }
  }

  std::vector<std::size_t> originals;
  if (a.originals_csv.empty()) {
    for (std::size_t i = 0; i < reals.size(); ++i) originals.push_back(i);
  } else {
    std::stringstream ss(a.originals_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) originals.push_back(std::stoul(item));
    }
  }

  analyzer::ReportOptions opts;
  opts.seed = g.seed;
  opts.ascii_baselines = a.ascii_baselines;
  opts.word_baselines = a.word_baselines;
  opts.jobs = a.jobs;
  if (a.word_baselines > 0) {
    if (a.wordlist.empty()) {
      throw Error("word baselines need --wordlist (or pass --words 0)");
    }
    opts.word_list = io::read_lines(a.wordlist);
  }
  std::shared_ptr<const Model> alt;
  if (!a.alt_model.empty()) {
    alt = std::make_shared<ReferenceBigramModel>(
        ReferenceBigramModel::load(a.alt_model, g.window));
    Session::determinism_probe(*alt);
    opts.alt_scorer = alt.get();
  }

  const auto report =
      analyzer::corpus_report(*model, reals, originals, keys, opts);
  write_output(a.out, io::report_to_tsv(report));
  return kExitOk;
}

struct BridgeArgs {
  std::uint32_t v_enc = 0, v_dec = 0;
  std::vector<std::uint32_t> ranks;
  std::string in, out, src_table, dst_table;
  bool inverse = false;
};

std::vector<Rank> bridge_input_ranks(const BridgeArgs& a) {
  if (!a.in.empty()) {
    if (!a.ranks.empty()) {
      throw Error("pass ranks positionally or via --in, not both");
    }
    return io::read_rank_stream(a.in);
  }
  return std::vector<Rank>(a.ranks.begin(), a.ranks.end());
}

void bridge_output_ranks(const BridgeArgs& a, std::span<const Rank> ranks) {
  if (!a.out.empty() && a.out != "-") {
    io::write_rank_stream(ranks, a.out);
    return;
  }
  std::string line;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (i > 0) line += ' ';
    line += std::to_string(ranks[i]);
  }
  line += '\n';
  std::cout << line;
}

int run_bridge_plan(const BridgeArgs& a) {
  const auto plan = bridge::plan_remap(a.v_enc, a.v_dec);
  std::cout << "v_enc=" << plan.v_enc << " v_dec=" << plan.v_dec
            << " direct_limit=" << plan.direct_limit
            << " block_size=" << plan.block_size
            << (plan.is_identity() ? " (identity)" : "") << "\n";
  return kExitOk;
}

int run_bridge_remap(const BridgeArgs& a, bool inverse) {
  const auto plan = bridge::plan_remap(a.v_enc, a.v_dec);
  const auto in = bridge_input_ranks(a);
  const auto out = inverse ? bridge::unremap_stream(plan, in)
                           : bridge::remap_stream(plan, in);
  bridge_output_ranks(a, out);
  return kExitOk;
}

int run_bridge_recode(const BridgeArgs& a) {
  const auto src = bridge::read_rank_table(a.src_table);
  const auto dst = bridge::read_rank_table(a.dst_table);
  const auto in = bridge_input_ranks(a);
  const auto out = a.inverse ? bridge::arithmetic_recode_inverse(in, src, dst)
                             : bridge::arithmetic_recode(in, src, dst);
  bridge_output_ranks(a, out);
  return kExitOk;
}

struct TableArgs {
  std::string list, out, context_file;
};

int run_bridge_table(const GlobalOptions& g, const TableArgs& a) {
  const auto model = resolve_model(g);
  const auto context = load_context(*model, a.context_file);
  const auto corpus = tokenize_manifest(*model, a.list);
  const auto table = bridge::build_rank_table(*model, corpus, context);
  bridge::write_rank_table(table, a.out);
  std::cerr << "rank table written to " << a.out << " (max_rank="
            << table.max_rank << " total=" << table.total << ")\n";
  return kExitOk;
}

struct RelayArgs {
  std::string c_file, t_file, t_env, u_file, in, out;
  std::uint32_t pad_len = codec::kDefaultPadLen;
};

int run_relay_pack(const GlobalOptions& g, const RelayArgs& a) {
  const auto model = resolve_model(g);
  const std::string c = io::read_file(a.c_file);
  io::require_utf8(c, "cover context");
  const std::string t = read_secret(a.t_file, a.t_env, "trigger");
  const std::string u = io::read_file(a.u_file);
  io::require_utf8(u, "hidden instruction");
  const auto env = relay::relay_pack(*model, c, t, u, a.pad_len);
  io::write_envelope(env, a.out);
  return kExitOk;
}

int run_relay_unpack(const GlobalOptions& g, const RelayArgs& a) {
  const auto model = resolve_model(g);
  const auto env = io::read_envelope(a.in);
  write_output(a.out, relay::relay_unpack(*model, env));
  return kExitOk;
}

struct ModelArgs {
  std::string corpus, out;
  double smoothing = ReferenceBigramModel::kDefaultSmoothing;
};

int run_model_build(const ModelArgs& a) {
  const ReferenceBigramModel model(io::read_file(a.corpus), a.smoothing);
  model.save(a.out);
  std::cerr << "model written to " << a.out << " (fingerprint "
            << model.fingerprint().hex().substr(0, 12) << "...)\n";
  return kExitOk;
}

int run_model_fingerprint(const GlobalOptions& g) {
  const auto model = resolve_model(g);
  std::cout << model->fingerprint().hex() << "\n";
  return kExitOk;
}

int run_selftest(const GlobalOptions& g, unsigned rounds) {
  const auto model = resolve_model(g);
  int failures = 0;
  const auto check = [&failures](bool ok, const std::string& name) {
    std::cout << (ok ? "[ OK ] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };

  // 1. Determinism probe, repeated: identical probe digests every round.
  bool stable = true;
  const Digest first = Session::probe_digest(*model);
  for (unsigned i = 1; i < std::max(2u, rounds); ++i) {
    try {
      Session::determinism_probe(*model);
    } catch (const NondeterminismDetected&) {
      stable = false;
      break;
    }
    if (Session::probe_digest(*model) != first) {
      stable = false;
      break;
    }
  }
  check(stable, "determinism probe (" + std::to_string(std::max(2u, rounds)) +
                    " rounds, digest " + to_hex(first).substr(0, 12) + "...)");

  // 2. Round-trip on a fixed sample.
  codec::StegoKey key;
  key.k = "selftest secret prompt";
  key.k_prime = "A text:";
  key.fingerprint = model->fingerprint();
  const std::string sample = "The self-test hides this sentence and expects "
                             "it back unchanged.";
  bool roundtrip = false;
  std::string roundtrip_name = "encode/decode round-trip";
  try {
    const auto stego = codec::encode(*model, sample, key);
    roundtrip = codec::decode(*model, stego, key) == sample;
  } catch (const RetokenizationUnstable&) {
    key.token_transport = true;
    const auto stego = codec::encode(*model, sample, key);
    roundtrip = codec::decode(*model, stego, key) == sample;
    roundtrip_name += " (token transport)";
  }
  check(roundtrip, roundtrip_name);

  // 3. A corrupted model file must be rejected with FingerprintMismatch.
  bool rejected = false;
  const fs::path tmp =
      fs::temp_directory_path() /
      ("rankstego-selftest-" + std::to_string(std::random_device{}()) +
       ".rsbg");
  try {
    const ReferenceBigramModel probe_model("selftest corpus: " + sample);
    probe_model.save(tmp);
    std::string bytes = io::read_file(tmp);
    bytes[bytes.size() / 2] ^= 0x01;  // flip one payload bit
    io::write_file(tmp, bytes);
    try {
      (void)ReferenceBigramModel::load(tmp);
    } catch (const FingerprintMismatch&) {
      rejected = true;
    }
  } catch (const Error&) {
    rejected = false;
  }
  std::error_code ec;
  fs::remove(tmp, ec);
  check(rejected, "corrupted model file rejected (FingerprintMismatch)");

  return failures == 0 ? kExitOk : kExitGenericError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"token-rank steganography codec"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--model", g.model_path,
                 "saved reference model file (default: $RANKSTEGO_MODEL)");
  app.add_option("--ref-corpus", g.ref_corpus,
                 "build the reference model from this corpus file");
  app.add_option("--backend-model", g.backend_model,
                 "native backend weights (unavailable in this build)");
  app.add_option("--smoothing", g.smoothing,
                 "reference model smoothing (with --ref-corpus)");
  app.add_option("--window", g.window, "context window override");
  app.add_option("--seed", g.seed, "seed for nonce and baseline sampling")
      ->each([&g](const std::string&) { g.seed_given = true; });

  // keygen ---------------------------------------------------------------
  KeygenArgs ka;
  auto* keygen = app.add_subcommand("keygen", "create a key file");
  keygen->add_option("--out", ka.out, "key file to write")->required();
  keygen->add_option("--k-file", ka.k_file, "secret prompt from a file");
  keygen->add_option("--k-env", ka.k_env,
                     "secret prompt from an environment variable");
  keygen->add_option("--k-prime-file", ka.k_prime_file,
                     "ranking prompt from a file");
  keygen->add_option("--k-prime-env", ka.k_prime_env,
                     "ranking prompt from an environment variable");
  keygen->add_option("--pad-len", ka.pad_len, "greedy pad length");
  keygen->add_flag("--bos", ka.bos, "prepend the model BOS token to contexts");
  keygen->add_flag("--token-transport", ka.token_transport,
                   "ship token ids instead of text");
  keygen->add_flag("--allow-empty-k", ka.allow_empty_k,
                   "permit an empty secret prompt");

  // encode / decode --------------------------------------------------------
  EncodeArgs ea;
  auto* encode = app.add_subcommand("encode", "plaintext -> stegotext");
  encode->add_option("--key", ea.key, "key file")->required();
  encode->add_option("--in", ea.in, "plaintext file")->required();
  encode->add_option("--out", ea.out, "stegotext file")->required();
  encode->add_flag("--stats", ea.stats, "print rank statistics to stderr");
  encode->add_option("--warn-mean-rank", ea.warn_mean_rank,
                     "mean-rank warning threshold (default vocab/16)");

  DecodeArgs da;
  auto* decode = app.add_subcommand("decode", "stegotext -> plaintext");
  decode->add_option("--key", da.key, "key file")->required();
  decode->add_option("--in", da.in, "stegotext file")->required();
  decode->add_option("--out", da.out, "plaintext file (default stdout)");

  // analyze ----------------------------------------------------------------
  auto* analyze = app.add_subcommand("analyze", "detection-side statistics");
  analyze->require_subcommand(1);
  AnalyzeArgs aa;
  auto add_common = [&aa](CLI::App* sub, bool with_out = true) {
    sub->add_option("--list", aa.list,
                    "manifest: one text file path per line")
        ->required();
    if (with_out) sub->add_option("--out", aa.out, "output file (default stdout)");
    sub->add_option("--context-file", aa.context_file,
                    "fixed context prepended before scoring");
  };
  add_common(analyze->add_subcommand("score", "log-probability per text"));
  add_common(analyze->add_subcommand("hist", "rank histogram over a corpus"));
  add_common(analyze->add_subcommand("profile",
                                     "per-position rank percentiles"));
  add_common(analyze->add_subcommand(
      "distinguish", "pick the most model-plausible candidate"));
  auto* report = analyze->add_subcommand(
      "report", "score reals, stego re-encodings, and baselines");
  report->add_option("--list", aa.list, "manifest of real text files")
      ->required();
  report->add_option("--out", aa.out, "output file (default stdout)");
  report->add_option("--keys", aa.keys_manifest, "manifest of key files");
  report->add_option("--originals", aa.originals_csv,
                     "comma-separated indices of reals to re-encode "
                     "(default: all)");
  report->add_option("--ascii", aa.ascii_baselines,
                     "number of random-ASCII baselines");
  report->add_option("--words", aa.word_baselines,
                     "number of word-salad baselines");
  report->add_option("--wordlist", aa.wordlist, "word list file");
  report->add_option("--alt-model", aa.alt_model,
                     "second model file for a log_prob_alt column");
  report->add_option("--truncate", aa.truncate,
                     "truncate each real text to this many tokens");
  report->add_option("--jobs", aa.jobs, "scoring threads (same output)");

  // bridge -----------------------------------------------------------------
  auto* bridge_cmd = app.add_subcommand("bridge", "vocabulary bridging");
  bridge_cmd->require_subcommand(1);
  BridgeArgs ba;
  auto* plan = bridge_cmd->add_subcommand("plan", "show the remap plan");
  plan->add_option("v_enc", ba.v_enc, "encoder vocabulary size")->required();
  plan->add_option("v_dec", ba.v_dec, "decoder vocabulary size")->required();
  auto* remap = bridge_cmd->add_subcommand(
      "remap", "encoder ranks -> decoder rank codes");
  auto* unremap = bridge_cmd->add_subcommand(
      "unremap", "decoder rank codes -> encoder ranks");
  for (auto* sub : {remap, unremap}) {
    sub->add_option("v_enc", ba.v_enc, "encoder vocabulary size")->required();
    sub->add_option("v_dec", ba.v_dec, "decoder vocabulary size")->required();
    sub->add_option("ranks", ba.ranks, "ranks to convert");
    sub->add_option("--in", ba.in, "rank stream file (one rank per line)");
    sub->add_option("--out", ba.out, "output rank stream file");
  }
  auto* recode = bridge_cmd->add_subcommand(
      "recode", "recode a rank stream between frequency tables");
  recode->add_option("--src-table", ba.src_table, "source rank table")
      ->required();
  recode->add_option("--dst-table", ba.dst_table, "destination rank table")
      ->required();
  recode->add_option("ranks", ba.ranks, "ranks to convert");
  recode->add_option("--in", ba.in, "rank stream file");
  recode->add_option("--out", ba.out, "output rank stream file");
  recode->add_flag("--inverse", ba.inverse, "invert a recoded stream");
  TableArgs ta;
  auto* table = bridge_cmd->add_subcommand(
      "table", "build a rank-frequency table from a corpus");
  table->add_option("--list", ta.list, "manifest of text files")->required();
  table->add_option("--out", ta.out, "table file to write")->required();
  table->add_option("--context-file", ta.context_file,
                    "fixed context for rank extraction");

  // relay ------------------------------------------------------------------
  auto* relay_cmd = app.add_subcommand("relay", "prompt-relay protocol");
  relay_cmd->require_subcommand(1);
  RelayArgs ra;
  auto* pack = relay_cmd->add_subcommand("pack", "hide an instruction");
  pack->add_option("--c-file", ra.c_file, "cover context file")->required();
  pack->add_option("--t-file", ra.t_file, "trigger file");
  pack->add_option("--t-env", ra.t_env, "trigger environment variable");
  pack->add_option("--u-file", ra.u_file, "hidden instruction file")
      ->required();
  pack->add_option("--pad-len", ra.pad_len, "greedy pad length");
  pack->add_option("--out", ra.out, "envelope file to write")->required();
  auto* unpack = relay_cmd->add_subcommand("unpack", "recover an instruction");
  unpack->add_option("--in", ra.in, "envelope file")->required();
  unpack->add_option("--out", ra.out, "instruction output (default stdout)");

  // model ------------------------------------------------------------------
  auto* model_cmd = app.add_subcommand("model", "reference model management");
  model_cmd->require_subcommand(1);
  ModelArgs ma;
  auto* build = model_cmd->add_subcommand("build", "train and save");
  build->add_option("--corpus", ma.corpus, "training corpus file")->required();
  build->add_option("--out", ma.out, "model file to write")->required();
  build->add_option("--smoothing", ma.smoothing, "additive smoothing");
  auto* fingerprint =
      model_cmd->add_subcommand("fingerprint", "print the model fingerprint");

  // selftest ------------------------------------------------------------------
  unsigned selftest_rounds = 10;
  auto* selftest = app.add_subcommand(
      "selftest", "probe determinism, round-trip, and integrity checks");
  selftest->add_option("--rounds", selftest_rounds, "probe repetitions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitGenericError;
  }

  try {
    if (keygen->parsed()) return run_keygen(g, ka);
    if (encode->parsed()) return run_encode(g, ea);
    if (decode->parsed()) return run_decode(g, da);
    if (analyze->parsed()) {
      if (analyze->get_subcommand("score")->parsed())
        return run_analyze_score(g, aa);
      if (analyze->get_subcommand("hist")->parsed())
        return run_analyze_hist(g, aa);
      if (analyze->get_subcommand("profile")->parsed())
        return run_analyze_profile(g, aa);
      if (analyze->get_subcommand("distinguish")->parsed())
        return run_analyze_distinguish(g, aa);
      if (report->parsed()) return run_analyze_report(g, aa);
    }
    if (bridge_cmd->parsed()) {
      if (plan->parsed()) return run_bridge_plan(ba);
      if (remap->parsed()) return run_bridge_remap(ba, false);
      if (unremap->parsed()) return run_bridge_remap(ba, true);
      if (recode->parsed()) return run_bridge_recode(ba);
      if (table->parsed()) return run_bridge_table(g, ta);
    }
    if (relay_cmd->parsed()) {
      if (pack->parsed()) return run_relay_pack(g, ra);
      if (unpack->parsed()) return run_relay_unpack(g, ra);
    }
    if (model_cmd->parsed()) {
      if (build->parsed()) return run_model_build(ma);
      if (fingerprint->parsed()) return run_model_fingerprint(g);
    }
    if (selftest->parsed()) return run_selftest(g, selftest_rounds);
    throw Error("no subcommand executed");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGenericError;
  }
}
