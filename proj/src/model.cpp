// SPDX-License-Identifier: Apache-2.0

#include "rankstego/model.hpp"

#include <bit>
#include <cstring>

#include "rankstego/errors.hpp"

namespace rankstego {

std::string Model::detokenize(const TokenSequence& seq) const {
  check_fingerprint(*this, seq.fingerprint, "token sequence");
  return detokenize_raw(seq.tokens);
}

void check_fingerprint(const Model& model, const ModelFingerprint& expected,
                       const char* what) {
  if (expected.is_null()) return;
  if (!(expected == model.fingerprint())) {
    throw FingerprintMismatch(std::string(what) + " was produced under model " +
                              expected.hex().substr(0, 12) +
                              "..., but the active model is " +
                              model.fingerprint().hex().substr(0, 12) + "...");
  }
}

namespace {

std::vector<TokenId> probe_context(const Model& model) {
  // Any fixed context works; tokenizing a fixed string keeps the probe
  // meaningful for models with arbitrary tokenizers.
  std::vector<TokenId> ctx =
      model.tokenize_raw("determinism probe 0123456789 the quick brown fox");
  const std::size_t cap = std::min<std::size_t>(
      ctx.size(), std::min<std::size_t>(model.context_window(), 32));
  ctx.resize(cap);
  return ctx;
}

bool bitwise_equal(const NextTokenRanking& a, const NextTokenRanking& b) {
  if (a.ordering != b.ordering) return false;
  if (a.rank_by_token != b.rank_by_token) return false;
  if (a.probs.size() != b.probs.size()) return false;
  for (std::size_t i = 0; i < a.probs.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a.probs[i]) !=
        std::bit_cast<std::uint64_t>(b.probs[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace

Session::Session(std::shared_ptr<const Model> model, bool run_probe)
    : model_(std::move(model)) {
  if (!model_) throw Error("session: null model");
  if (run_probe) determinism_probe(*model_);
}

void Session::determinism_probe(const Model& model) {
  const auto ctx = probe_context(model);
  const NextTokenRanking first = model.next_ranking(ctx);
  first.validate();
  const NextTokenRanking second = model.next_ranking(ctx);
  if (!bitwise_equal(first, second)) {
    throw NondeterminismDetected(
        "model returned two different rankings for the same probe context; "
        "rank coding requires bit-stable rankings");
  }
}

Digest Session::probe_digest(const Model& model) {
  const auto ctx = probe_context(model);
  const NextTokenRanking r = model.next_ranking(ctx);
  Sha256 h;
  for (TokenId t : r.ordering) h.update_u32le(t);
  for (double p : r.probs) h.update_f64le(p);
  return h.finish();
}

std::shared_ptr<const Model> load_backend_model(const BackendConfig& config) {
  throw BackendUnavailable(
      "no native inference backend is compiled into this build (requested "
      "weights: " +
      (config.weights_path.empty() ? std::string("<none>")
                                   : config.weights_path) +
      ")");
}

}  // namespace rankstego
