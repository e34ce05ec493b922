// Brute-force reference implementations shared by unit and acceptance tests.
// They follow the textbook definitions directly and share no code with the
// library beyond its value types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "simplesmt/decode.hpp"
#include "simplesmt/lm.hpp"
#include "simplesmt/phrases.hpp"

namespace oracle {

using simplesmt::AlignmentLinks;
using simplesmt::PhraseSpan;

// Every box with at least one link inside and no link with exactly one
// coordinate inside.
inline std::vector<PhraseSpan> phrases(std::size_t n, std::size_t m, const AlignmentLinks& a, std::size_t max_len) {
  std::vector<PhraseSpan> out;
  for (std::size_t s1 = 0; s1 < n; ++s1)
    for (std::size_t s2 = s1 + 1; s2 <= n && s2 - s1 <= max_len; ++s2)
      for (std::size_t t1 = 0; t1 < m; ++t1)
        for (std::size_t t2 = t1 + 1; t2 <= m && t2 - t1 <= max_len; ++t2) {
          bool inside = false, crossing = false;
          for (auto [i, j] : a.links) {
            bool si = i >= s1 && i < s2, tj = j >= t1 && j < t2;
            if (si && tj) inside = true;
            if (si != tj) crossing = true;
          }
          if (inside && !crossing) out.push_back({s1, s2, t1, t2});
        }
  std::sort(out.begin(), out.end());
  return out;
}

inline AlignmentLinks random_links(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  AlignmentLinks a;
  std::uniform_real_distribution<double> u(0, 1);
  double density = 0.1 + 0.4 * u(rng);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (u(rng) < density) a.links.emplace_back(i, j);
  return a;
}

// Best model score over every derivation: all segmentations into table
// phrases (plus copy options for words lacking a one-word entry), all target
// choices and all orderings.
inline double best_derivation_score(const simplesmt::Segment& src, const simplesmt::PhraseTable& table,
                                    const simplesmt::NGramModel& lm, const simplesmt::Weights& w) {
  const std::size_t n = src.size();
  struct Opt {
    std::size_t b, e;
    std::vector<std::string> tgt;
    double lp;
  };
  std::vector<Opt> opts;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t e = b + 1; e <= n; ++e) {
      std::vector<std::string> words(src.tokens.begin() + b, src.tokens.begin() + e);
      std::string key;
      for (const auto& x : words) key += (key.empty() ? "" : " ") + x;
      auto it = table.entries().find(key);
      if (it != table.entries().end())
        for (const auto& c : it->second) opts.push_back({b, e, c.tokens, c.log_fwd});
      if (e == b + 1 && it == table.entries().end()) opts.push_back({b, e, words, 0.0});
    }

  double best = -std::numeric_limits<double>::infinity();
  std::vector<bool> covered(n, false);
  std::vector<std::string> out;
  std::function<void(std::size_t, std::size_t, double, double)> rec = [&](std::size_t done, std::size_t prev_end,
                                                                          double phrase, double reorder) {
    if (done == n) {
      double lmv = lm.score_sequence(out);
      best = std::max(best, w.phrase * phrase + w.lm * lmv + w.reorder * reorder);
      return;
    }
    for (const auto& o : opts) {
      bool free = true;
      for (std::size_t i = o.b; i < o.e; ++i) free = free && !covered[i];
      if (!free) continue;
      for (std::size_t i = o.b; i < o.e; ++i) covered[i] = true;
      out.insert(out.end(), o.tgt.begin(), o.tgt.end());
      double jump = std::fabs(static_cast<double>(o.b) - static_cast<double>(prev_end));
      rec(done + (o.e - o.b), o.e, phrase + o.lp, reorder - jump);
      out.resize(out.size() - o.tgt.size());
      for (std::size_t i = o.b; i < o.e; ++i) covered[i] = false;
    }
  };
  rec(0, 0, 0, 0);
  return best;
}

// A small random decoding instance over a 4-word vocabulary.
struct DecodeInstance {
  simplesmt::Segment source;
  simplesmt::PhraseTable table;
  simplesmt::Weights weights;
};

inline DecodeInstance random_decode_instance(std::mt19937_64& rng) {
  static const std::vector<std::string> src_vocab{"a", "b", "c", "d"};
  static const std::vector<std::string> tgt_vocab{"w", "x", "y", "z"};
  std::uniform_int_distribution<std::size_t> len(1, 6), word(0, 3), plen(1, 3), tlen(1, 2), entries(1, 20);
  std::uniform_real_distribution<double> u(0, 1);
  DecodeInstance inst;
  std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) inst.source.tokens.push_back(src_vocab[word(rng)]);

  // Entries drawn from substrings of the source, so most get used.
  std::map<std::string, std::map<std::string, double>> raw;
  std::size_t count = entries(rng);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t b = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    std::size_t e = std::min(n, b + plen(rng));
    std::string s, t;
    for (std::size_t i = b; i < e; ++i) s += (s.empty() ? "" : " ") + inst.source.tokens[i];
    std::size_t tl = tlen(rng);
    for (std::size_t i = 0; i < tl; ++i) t += (t.empty() ? "" : " ") + tgt_vocab[word(rng)];
    raw[s][t] = 0.05 + u(rng);
  }
  for (auto& [s, row] : raw) {
    double z = 0;
    for (auto& [t, v] : row) z += v;
    for (auto& [t, v] : row) {
      simplesmt::PhraseCandidate c;
      c.target = t;
      c.tokens = simplesmt::split_whitespace(t);
      c.log_fwd = std::log(v / z);
      c.log_bwd = c.log_fwd;
      inst.table.add(s, c);
    }
  }
  inst.table.set_max_phrase_len(3);
  inst.table.finalize();
  inst.weights = {0.2 + u(rng), 0.2 + u(rng), 0.1 + u(rng)};
  return inst;
}

// Random target-side LM over the instance vocabulary.
inline simplesmt::NGramModel random_target_lm(std::mt19937_64& rng, int order) {
  static const std::vector<std::string> tgt_vocab{"w", "x", "y", "z"};
  std::uniform_int_distribution<std::size_t> len(1, 6), word(0, 3);
  std::vector<simplesmt::Segment> sents;
  for (int k = 0; k < 12; ++k) {
    simplesmt::Segment s;
    std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) s.tokens.push_back(tgt_vocab[word(rng)]);
    sents.push_back(s);
  }
  simplesmt::LMConfig cfg;
  cfg.order = order;
  return simplesmt::NGramModel::train(sents, cfg);
}

}  // namespace oracle
