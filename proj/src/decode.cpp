#include "simplesmt/decode.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "simplesmt/error.hpp"

namespace simplesmt {

std::string Weights::str() const {
  return format_double(phrase) + "," + format_double(lm) + "," + format_double(reorder);
}

void DecoderConfig::validate() const {
  if (beam_size < 1) throw ConfigError("beam size must be >= 1");
  if (distortion_limit < kUnlimited) throw ConfigError("distortion limit must be >= 0 or -1 (unlimited)");
  if (threshold < 0 || threshold >= 1) throw ConfigError("threshold ratio must lie in [0, 1)");
}

double distortion(std::size_t prev_end, std::size_t next_start) {
  return -std::abs(static_cast<double>(next_start) - static_cast<double>(prev_end));
}

Segment derivation_output(const Derivation& d) {
  Segment out;
  for (const auto& app : d) out.tokens.insert(out.tokens.end(), app.target.begin(), app.target.end());
  return out;
}

FeatureVector compute_features(const Derivation& d, const NGramModel& lm) {
  FeatureVector f;
  std::size_t prev_end = 0;
  for (const auto& app : d) {
    f.phrase += app.log_fwd;
    f.reorder += distortion(prev_end, app.src_begin);
    prev_end = app.src_end;
  }
  f.lm = lm.score_sequence(derivation_output(d));
  return f;
}

double rescore(const Derivation& d, const NGramModel& lm, const Weights& weights) {
  return compute_features(d, lm).dot(weights);
}

std::vector<TranslationOption> collect_options(const Segment& src, const PhraseTable& table,
                                               const DecoderConfig& config,
                                               std::vector<std::vector<std::string>>& copy_storage) {
  const std::size_t n = src.size();
  std::vector<TranslationOption> options;
  std::vector<bool> single(n, false), covered(n, false);
  const std::size_t max_len = std::max<std::size_t>(table.max_phrase_len(), 1);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t e = b + 1; e <= n && e - b <= max_len; ++e) {
      const auto& cands = table.query(src.tokens, b, e);
      if (cands.empty()) continue;
      if (e == b + 1) single[b] = true;
      for (std::size_t i = b; i < e; ++i) covered[i] = true;
      for (const auto& c : cands) options.push_back({b, e, &c.tokens, c.log_fwd, false});
    }
  }
  copy_storage.clear();
  copy_storage.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (single[i]) continue;
    if (config.oov_copy) {
      copy_storage.push_back({src[i]});
      options.push_back({i, i + 1, &copy_storage.back(), 0.0, true});
    } else if (!covered[i]) {
      throw DecodeError("no phrase option for source word '" + src[i] + "' at position " + std::to_string(i));
    }
  }
  std::stable_sort(options.begin(), options.end(), [](const auto& a, const auto& b) {
    return a.src_begin != b.src_begin ? a.src_begin < b.src_begin : a.src_end < b.src_end;
  });
  return options;
}

namespace {

class Coverage {
 public:
  explicit Coverage(std::size_t n = 0) : bits_((n + 63) / 64, 0) {}
  bool test(std::size_t i) const { return (bits_[i / 64] >> (i % 64)) & 1; }
  void set(std::size_t i) { bits_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool operator==(const Coverage&) const = default;
  std::size_t hash() const {
    std::size_t h = 0;
    for (auto w : bits_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

 private:
  std::vector<std::uint64_t> bits_;
};

struct Hypothesis {
  Coverage coverage;
  NGramModel::State lm_state;
  std::size_t last_end = 0;
  std::size_t covered = 0;
  double score = 0;
  double future = 0;
  int back = -1;
  const TranslationOption* option = nullptr;

  double total() const { return score + future; }
};

struct RecombinationKey {
  const Hypothesis* h;
  bool operator==(const RecombinationKey& o) const {
    return h->last_end == o.h->last_end && h->lm_state == o.h->lm_state && h->coverage == o.h->coverage;
  }
};

struct RecombinationHash {
  std::size_t operator()(const RecombinationKey& k) const {
    std::size_t seed = k.h->coverage.hash() ^ (k.h->last_end * 0x100000001b3ULL);
    for (auto id : k.h->lm_state) seed ^= id + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
  }
};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class StackDecoder {
 public:
  StackDecoder(const Segment& src, const PhraseTable& table, const NGramModel& lm, const Weights& w,
               const DecoderConfig& config)
      : src_(src), lm_(lm), w_(w), config_(config), n_(src.size()) {
    options_ = collect_options(src, table, config, copies_);
    target_ids_.reserve(options_.size());
    for (const auto& opt : options_) {
      std::vector<WordId> ids;
      for (const auto& t : *opt.target) ids.push_back(lm.index(t));
      target_ids_.push_back(std::move(ids));
    }
    by_start_.assign(n_, {});
    for (std::size_t k = 0; k < options_.size(); ++k) by_start_[options_[k].src_begin].push_back(k);
    build_future_costs();
  }

  DecodeResult run() {
    stacks_.assign(n_ + 1, {});
    Hypothesis root;
    root.coverage = Coverage(n_);
    root.lm_state = lm_.begin_state();
    root.future = future_of(root.coverage);
    hyps_.push_back(root);
    stacks_[0].push_back(0);

    std::vector<std::unordered_map<RecombinationKey, int, RecombinationHash>> recomb(n_ + 1);
    for (std::size_t k = 0; k < n_; ++k) {
      prune(stacks_[k]);
      for (int hi : stacks_[k]) expand(hi, recomb);
      recomb[k].clear();
    }

    int best = -1;
    double best_final = kNegInf;
    for (int hi : stacks_[n_]) {
      auto st = hyps_[hi].lm_state;
      double final = hyps_[hi].score + w_.lm * lm_.score_word(st, NGramModel::kEosId);
      if (best < 0 || final > best_final || (final == best_final && derivation_less(hi, best))) {
        best = hi;
        best_final = final;
      }
    }
    if (best < 0) throw DecodeError("no complete translation for: " + src_.str());

    DecodeResult result;
    result.derivation = derivation_of(best);
    result.translation = derivation_output(result.derivation);
    result.features = compute_features(result.derivation, lm_);
    result.score = result.features.dot(w_);
    return result;
  }

 private:
  void build_future_costs() {
    // Best weighted phrase + context-free LM estimate per span, then the
    // best tiling of every span.
    fc_.assign(n_ + 1, std::vector<double>(n_ + 1, kNegInf));
    for (std::size_t k = 0; k < options_.size(); ++k) {
      const auto& opt = options_[k];
      double est = w_.phrase * opt.log_fwd;
      for (auto id : target_ids_[k]) est += w_.lm * lm_.log_prob({}, id);
      fc_[opt.src_begin][opt.src_end] = std::max(fc_[opt.src_begin][opt.src_end], est);
    }
    for (std::size_t len = 2; len <= n_; ++len)
      for (std::size_t b = 0; b + len <= n_; ++b) {
        std::size_t e = b + len;
        for (std::size_t m = b + 1; m < e; ++m)
          if (fc_[b][m] > kNegInf && fc_[m][e] > kNegInf) fc_[b][e] = std::max(fc_[b][e], fc_[b][m] + fc_[m][e]);
      }
  }

  double future_of(const Coverage& cov) const {
    double total = 0;
    std::size_t i = 0;
    while (i < n_) {
      if (cov.test(i)) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < n_ && !cov.test(j)) ++j;
      total += fc_[i][j];
      i = j;
    }
    return total;
  }

  Derivation derivation_of(int hi) const {
    Derivation d;
    for (; hi >= 0 && hyps_[hi].option; hi = hyps_[hi].back) {
      const auto* opt = hyps_[hi].option;
      d.push_back({opt->src_begin, opt->src_end, *opt->target, opt->log_fwd});
    }
    std::reverse(d.begin(), d.end());
    return d;
  }

  // Lexicographic order on (source start, target phrase) sequences.
  bool derivation_less(int a, int b) const {
    auto da = derivation_of(a), db = derivation_of(b);
    return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end(), [](const auto& x, const auto& y) {
      if (x.src_begin != y.src_begin) return x.src_begin < y.src_begin;
      return x.target < y.target;
    });
  }

  bool better(int a, int b) const {
    double ta = hyps_[a].total(), tb = hyps_[b].total();
    if (ta != tb) return ta > tb;
    return derivation_less(a, b);
  }

  void prune(std::vector<int>& stack) {
    if (stack.empty()) return;
    std::sort(stack.begin(), stack.end(), [this](int a, int b) { return better(a, b); });
    if (stack.size() > config_.beam_size) stack.resize(config_.beam_size);
    if (config_.threshold > 0) {
      double cutoff = hyps_[stack.front()].total() + std::log(config_.threshold);
      while (stack.size() > 1 && hyps_[stack.back()].total() < cutoff) stack.pop_back();
    }
  }

  bool distortion_ok(const Coverage& cov, std::size_t last_end, std::size_t b, std::size_t e) const {
    if (config_.distortion_limit == DecoderConfig::kUnlimited) return true;
    const auto limit = static_cast<double>(config_.distortion_limit);
    if (-distortion(last_end, b) > limit) return false;
    // The leftmost gap must stay reachable from the new phrase end.
    for (std::size_t g = 0; g < b; ++g)
      if (!cov.test(g)) return static_cast<double>(e - g) <= limit;
    return true;
  }

  void expand(int hi, std::vector<std::unordered_map<RecombinationKey, int, RecombinationHash>>& recomb) {
    for (std::size_t b = 0; b < n_; ++b) {
      if (hyps_[hi].coverage.test(b)) continue;
      for (std::size_t k : by_start_[b]) {
        const auto& opt = options_[k];
        bool free = true;
        for (std::size_t i = b; i < opt.src_end && free; ++i) free = !hyps_[hi].coverage.test(i);
        if (!free) continue;
        if (!distortion_ok(hyps_[hi].coverage, hyps_[hi].last_end, b, opt.src_end)) continue;

        Hypothesis h;
        const Hypothesis& parent = hyps_[hi];
        h.coverage = parent.coverage;
        for (std::size_t i = b; i < opt.src_end; ++i) h.coverage.set(i);
        h.future = future_of(h.coverage);
        if (h.future == kNegInf) continue;
        h.covered = parent.covered + (opt.src_end - b);
        h.last_end = opt.src_end;
        h.lm_state = parent.lm_state;
        double lm_score = 0;
        for (auto id : target_ids_[k]) lm_score += lm_.score_word(h.lm_state, id);
        h.score = parent.score + w_.phrase * opt.log_fwd + w_.lm * lm_score +
                  w_.reorder * distortion(parent.last_end, b);
        h.back = hi;
        h.option = &opt;
        insert(std::move(h), recomb);
      }
    }
  }

  void insert(Hypothesis&& h, std::vector<std::unordered_map<RecombinationKey, int, RecombinationHash>>& recomb) {
    const std::size_t level = h.covered;
    int idx = static_cast<int>(hyps_.size());
    hyps_.push_back(std::move(h));
    auto& table = recomb[level];
    auto [it, inserted] = table.try_emplace(RecombinationKey{&hyps_[idx]}, idx);
    if (inserted) {
      stacks_[level].push_back(idx);
      return;
    }
    int old = it->second;
    const double s_new = hyps_[idx].score, s_old = hyps_[old].score;
    if (s_new > s_old || (s_new == s_old && derivation_less(idx, old))) {
      // Same state, so same future; swap the stack slot over to the winner.
      auto pos = std::find(stacks_[level].begin(), stacks_[level].end(), old);
      *pos = idx;
      table.erase(it);
      table.emplace(RecombinationKey{&hyps_[idx]}, idx);
    }
  }

  const Segment& src_;
  const NGramModel& lm_;
  Weights w_;
  DecoderConfig config_;
  std::size_t n_;
  std::vector<std::vector<std::string>> copies_;
  std::vector<TranslationOption> options_;
  std::vector<std::vector<WordId>> target_ids_;
  std::vector<std::vector<std::size_t>> by_start_;
  std::vector<std::vector<double>> fc_;
  std::deque<Hypothesis> hyps_;
  std::vector<std::vector<int>> stacks_;
};

}  // namespace

DecodeResult decode(const Segment& src, const PhraseTable& table, const NGramModel& lm, const Weights& weights,
                    const DecoderConfig& config) {
  config.validate();
  if (src.empty()) throw DecodeError("cannot decode an empty segment");
  return StackDecoder(src, table, lm, weights, config).run();
}

std::vector<DecodeResult> decode_all(const std::vector<Segment>& sources, const PhraseTable& table,
                                     const NGramModel& lm, const Weights& weights, const DecoderConfig& config) {
  config.validate();
  std::vector<DecodeResult> out(sources.size());
  parallel_for(sources.size(), config.threads, [&](std::size_t k) {
    try {
      out[k] = decode(sources[k], table, lm, weights, config);
    } catch (const DecodeError& e) {
      throw DecodeError("segment " + std::to_string(k + 1) + ": " + e.what());
    }
  });
  return out;
}

std::string feature_lines(const std::vector<DecodeResult>& results) {
  std::string out;
  for (const auto& r : results) {
    out += format_double(r.features.phrase) + '\t' + format_double(r.features.lm) + '\t' +
           format_double(r.features.reorder) + '\t' + format_double(r.score) + '\n';
  }
  return out;
}

}  // namespace simplesmt
