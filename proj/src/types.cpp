// SPDX-License-Identifier: Apache-2.0

#include "rankstego/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rankstego {

NextTokenRanking NextTokenRanking::from_probs(std::vector<double> probs) {
  NextTokenRanking r;
  const std::size_t v = probs.size();
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error("ranking: probabilities must be finite and non-negative");
    }
  }
  r.ordering.resize(v);
  std::iota(r.ordering.begin(), r.ordering.end(), TokenId{0});
  std::sort(r.ordering.begin(), r.ordering.end(),
            [&probs](TokenId a, TokenId b) {
              if (probs[a] != probs[b]) return probs[a] > probs[b];
              return a < b;
            });
  r.rank_by_token.resize(v);
  for (std::size_t i = 0; i < v; ++i) {
    r.rank_by_token[r.ordering[i]] = static_cast<Rank>(i + 1);
  }
  r.probs = std::move(probs);
  return r;
}

void NextTokenRanking::validate() const {
  const std::size_t v = ordering.size();
  if (v == 0) throw Error("ranking: empty vocabulary");
  if (probs.size() != v || rank_by_token.size() != v) {
    throw Error("ranking: field sizes disagree");
  }
  std::vector<bool> seen(v, false);
  for (TokenId t : ordering) {
    if (t >= v || seen[t]) throw Error("ranking: ordering is not a permutation");
    seen[t] = true;
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error("ranking: probabilities must be finite and non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error("ranking: probabilities sum to " + std::to_string(sum) +
                ", expected 1 within 1e-6");
  }
  for (std::size_t i = 0; i + 1 < v; ++i) {
    const TokenId a = ordering[i];
    const TokenId b = ordering[i + 1];
    const bool ok = probs[a] > probs[b] || (probs[a] == probs[b] && a < b);
    if (!ok) {
      throw Error("ranking: ordering violates (probability desc, id asc) at "
                  "position " +
                  std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < v; ++i) {
    if (rank_by_token[ordering[i]] != i + 1) {
      throw Error("ranking: rank_by_token is not the inverse of ordering");
    }
  }
}

Rank rank_of(const NextTokenRanking& ranking, TokenId token) {
  if (token >= ranking.vocab_size()) {
    throw TokenOutOfRange("token id " + std::to_string(token) +
                          " outside vocabulary of size " +
                          std::to_string(ranking.vocab_size()));
  }
  return ranking.rank_by_token[token];
}

TokenId token_at_rank(const NextTokenRanking& ranking, Rank rank) {
  if (rank < 1 || rank > ranking.vocab_size()) {
    throw RankOutOfRange(
        "rank " + std::to_string(rank) + " outside [1, " +
        std::to_string(ranking.vocab_size()) +
        "]; ranks above the vocabulary size must go through a remap plan "
        "before they reach this model");
  }
  return ranking.ordering[rank - 1];
}

NextTokenRanking ranking_from_logits(std::span<const double> logits) {
  if (logits.empty()) throw Error("ranking: empty logit vector");
  double mx = logits[0];
  for (double l : logits) {
    if (!std::isfinite(l)) throw Error("ranking: non-finite logit");
    mx = std::max(mx, l);
  }
  std::vector<double> probs(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - mx);
    z += probs[i];
  }
  for (double& p : probs) p /= z;
  return NextTokenRanking::from_probs(std::move(probs));
}

}  // namespace rankstego
