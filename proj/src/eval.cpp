#include "simplesmt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "simplesmt/error.hpp"
#include "simplesmt/util.hpp"

namespace simplesmt {

// ---------------------------------------------------------------------------
// BLEU

namespace {

using NGramCounts = std::unordered_map<std::string, std::size_t>;

NGramCounts ngram_counts(const std::vector<std::string>& toks, std::size_t n) {
  NGramCounts counts;
  if (toks.size() < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) {
    std::string key;
    for (std::size_t k = i; k < i + n; ++k) {
      key += toks[k];
      key += '\x1f';
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

BleuReport bleu_corpus(const std::vector<Segment>& candidates, const std::vector<Segment>& references) {
  if (candidates.size() != references.size())
    throw DataError("BLEU needs one reference per candidate (" + std::to_string(candidates.size()) + " vs " +
                    std::to_string(references.size()) + ")");
  if (candidates.empty()) throw DataError("BLEU of an empty candidate set");

  BleuReport rep;
  for (std::size_t s = 0; s < candidates.size(); ++s) {
    const auto& c = candidates[s].tokens;
    const auto& r = references[s].tokens;
    rep.candidate_length += c.size();
    rep.reference_length += r.size();
    for (int n = 1; n <= BleuReport::kMaxOrder; ++n) {
      auto cc = ngram_counts(c, static_cast<std::size_t>(n));
      auto rc = ngram_counts(r, static_cast<std::size_t>(n));
      for (const auto& [g, k] : cc) {
        auto it = rc.find(g);
        rep.matches[n - 1] += std::min(k, it == rc.end() ? std::size_t{0} : it->second);
        rep.totals[n - 1] += k;
      }
    }
  }

  // Orders with no candidate n-grams anywhere drop out of the mean.
  int orders = 0;
  double log_sum = 0;
  bool zero = false;
  for (int n = 0; n < BleuReport::kMaxOrder; ++n) {
    if (rep.totals[n] == 0) continue;
    rep.precisions[n] = static_cast<double>(rep.matches[n]) / static_cast<double>(rep.totals[n]);
    ++orders;
    if (rep.matches[n] == 0)
      zero = true;
    else
      log_sum += std::log(rep.precisions[n]);
  }
  if (rep.candidate_length == 0) {
    rep.brevity_penalty = 0;
    rep.score = 0;
    return rep;
  }
  const double c = static_cast<double>(rep.candidate_length), r = static_cast<double>(rep.reference_length);
  rep.brevity_penalty = c > r ? 1.0 : std::exp(1.0 - r / c);
  rep.score = zero || orders == 0 ? 0.0 : rep.brevity_penalty * std::exp(log_sum / orders);
  return rep;
}

// ---------------------------------------------------------------------------
// METEOR

void MatchStageConfig::validate() const {
  if (stages.empty()) throw ConfigError("METEOR needs at least one matching stage");
  if (!(gamma >= 0 && gamma <= 1)) throw ConfigError("METEOR gamma must lie in [0, 1]");
  if (!(alpha >= 0 && alpha <= 1)) throw ConfigError("METEOR alpha must lie in [0, 1]");
}

namespace {

std::size_t count_chunks(std::vector<std::pair<std::size_t, std::size_t>> align) {
  if (align.empty()) return 0;
  std::sort(align.begin(), align.end());
  std::size_t chunks = 1;
  for (std::size_t k = 1; k < align.size(); ++k)
    if (align[k].first != align[k - 1].first + 1 || align[k].second != align[k - 1].second + 1) ++chunks;
  return chunks;
}


// One matching stage: among the maximum-cardinality matchings of equal keys
// over the still-free tokens, pick the one with the fewest total chunks.
// The first optimum in leftmost-first search order wins ties.
class StageMatcher {
 public:
  StageMatcher(const std::vector<std::string>& cand_keys, const std::vector<std::string>& ref_keys,
               std::vector<long>& cand_match, std::vector<bool>& ref_used, std::size_t cap)
      : ck_(cand_keys), rk_(ref_keys), cand_match_(cand_match), ref_used_(ref_used), cap_(cap),
        taken_(ref_keys.size(), false) {}

  // Returns false when the node cap forced the greedy fallback.
  bool run() {
    for (std::size_t i = 0; i < ck_.size(); ++i) {
      if (cand_match_[i] >= 0) continue;
      std::vector<std::size_t> refs;
      for (std::size_t j = 0; j < rk_.size(); ++j)
        if (!ref_used_[j] && rk_[j] == ck_[i]) refs.push_back(j);
      if (!refs.empty()) {
        positions_.push_back(i);
        options_.push_back(std::move(refs));
        ++remaining_[ck_[i]];
      }
    }
    if (positions_.empty()) return true;
    for (std::size_t j = 0; j < rk_.size(); ++j)
      if (!ref_used_[j] && remaining_.count(rk_[j])) ++free_refs_[rk_[j]];
    target_ = upper_bound();

    for (std::size_t i = 0; i < cand_match_.size(); ++i)
      if (cand_match_[i] >= 0) fixed_.emplace_back(i, static_cast<std::size_t>(cand_match_[i]));
    current_ = fixed_;
    search(0, 0);
    if (nodes_ > cap_) {
      greedy();
      return false;
    }
    for (const auto& [i, j] : best_) {
      cand_match_[i] = static_cast<long>(j);
      ref_used_[j] = true;
    }
    return true;
  }

 private:
  std::size_t upper_bound() const {
    std::size_t ub = 0;
    for (const auto& [key, n] : remaining_) {
      auto it = free_refs_.find(key);
      ub += std::min(n, it == free_refs_.end() ? std::size_t{0} : it->second);
    }
    return ub;
  }

  void search(std::size_t p, std::size_t matched) {
    if (++nodes_ > cap_) return;
    if (matched + upper_bound() < target_) return;
    if (p == positions_.size()) {
      std::size_t ch = count_chunks(current_);
      if (!found_ || ch < best_chunks_) {
        found_ = true;
        best_chunks_ = ch;
        best_.assign(current_.begin() + static_cast<std::ptrdiff_t>(fixed_.size()), current_.end());
      }
      return;
    }
    const std::size_t i = positions_[p];
    const auto& key = ck_[i];
    --remaining_[key];
    for (std::size_t j : options_[p]) {
      if (taken_[j]) continue;
      taken_[j] = true;
      --free_refs_[key];
      current_.emplace_back(i, j);
      search(p + 1, matched + 1);
      current_.pop_back();
      ++free_refs_[key];
      taken_[j] = false;
      if (nodes_ > cap_) break;
    }
    if (nodes_ <= cap_) search(p + 1, matched);
    ++remaining_[key];
  }

  void greedy() {
    for (std::size_t p = 0; p < positions_.size(); ++p)
      for (std::size_t j : options_[p])
        if (!ref_used_[j]) {
          cand_match_[positions_[p]] = static_cast<long>(j);
          ref_used_[j] = true;
          break;
        }
  }

  const std::vector<std::string>& ck_;
  const std::vector<std::string>& rk_;
  std::vector<long>& cand_match_;
  std::vector<bool>& ref_used_;
  std::size_t cap_;
  std::vector<bool> taken_;

  std::vector<std::size_t> positions_;
  std::vector<std::vector<std::size_t>> options_;
  std::map<std::string, std::size_t> remaining_, free_refs_;
  std::size_t target_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> fixed_, current_, best_;
  std::size_t nodes_ = 0;
  bool found_ = false;
  std::size_t best_chunks_ = 0;
};

std::vector<std::string> stage_keys(const std::vector<std::string>& toks, MatchStage stage) {
  std::vector<std::string> keys;
  keys.reserve(toks.size());
  for (const auto& t : toks) keys.push_back(stage == MatchStage::kExact ? ascii_lower(t) : porter_stem(t));
  return keys;
}

void finish_meteor(MeteorReport& rep, const MatchStageConfig& config);

}  // namespace

MeteorReport meteor_sentence(const Segment& candidate, const Segment& reference, const MatchStageConfig& config) {
  config.validate();
  MeteorReport rep;
  rep.candidate_length = candidate.size();
  rep.reference_length = reference.size();

  std::vector<long> cand_match(candidate.size(), -1);
  std::vector<bool> ref_used(reference.size(), false);
  for (MatchStage stage : config.stages) {
    auto ck = stage_keys(candidate.tokens, stage);
    auto rk = stage_keys(reference.tokens, stage);
    StageMatcher matcher(ck, rk, cand_match, ref_used, config.ambiguity_cap);
    if (!matcher.run()) rep.greedy_fallback = true;
  }
  for (std::size_t i = 0; i < cand_match.size(); ++i)
    if (cand_match[i] >= 0) rep.alignment.emplace_back(i, static_cast<std::size_t>(cand_match[i]));

  rep.matches = rep.alignment.size();
  rep.chunks = count_chunks(rep.alignment);
  finish_meteor(rep, config);
  return rep;
}

MeteorCorpusReport meteor_corpus(const std::vector<Segment>& candidates, const std::vector<Segment>& references,
                                 const MatchStageConfig& config) {
  if (candidates.size() != references.size())
    throw DataError("METEOR needs one reference per candidate (" + std::to_string(candidates.size()) + " vs " +
                    std::to_string(references.size()) + ")");
  if (candidates.empty()) throw DataError("METEOR of an empty candidate set");
  MeteorCorpusReport out;
  out.segments.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out.segments.push_back(meteor_sentence(candidates[i], references[i], config));
    const auto& s = out.segments.back();
    out.pooled.matches += s.matches;
    out.pooled.candidate_length += s.candidate_length;
    out.pooled.reference_length += s.reference_length;
    out.pooled.chunks += s.chunks;
    out.pooled.greedy_fallback = out.pooled.greedy_fallback || s.greedy_fallback;
  }
  finish_meteor(out.pooled, config);
  return out;
}

namespace {

void finish_meteor(MeteorReport& rep, const MatchStageConfig& config) {
  if (rep.matches == 0) return;
  const double m = static_cast<double>(rep.matches);
  rep.precision = m / static_cast<double>(rep.candidate_length);
  rep.recall = m / static_cast<double>(rep.reference_length);
  rep.fmean = rep.precision * rep.recall / (config.alpha * rep.precision + (1 - config.alpha) * rep.recall);
  rep.fragmentation = static_cast<double>(rep.chunks) / m;
  rep.penalty = config.gamma * std::pow(rep.fragmentation, config.beta);
  rep.score = rep.fmean * (1 - rep.penalty);
}

}  // namespace

// ---------------------------------------------------------------------------
// Porter stemmer

namespace {

class Porter {
 public:
  explicit Porter(std::string w) : b_(std::move(w)), k_(static_cast<std::ptrdiff_t>(b_.size()) - 1) {}

  std::string run() {
    if (b_.size() <= 2) return b_;
    step1ab();
    if (k_ > 0) {
      step1c();
      step2();
      step3();
      step4();
      step5();
    }
    return b_.substr(0, static_cast<std::size_t>(k_ + 1));
  }

 private:
  char at(std::ptrdiff_t i) const { return b_[static_cast<std::size_t>(i)]; }

  bool cons(std::ptrdiff_t i) const {
    switch (at(i)) {
      case 'a': case 'e': case 'i': case 'o': case 'u': return false;
      case 'y': return i == 0 ? true : !cons(i - 1);
      default: return true;
    }
  }

  // Number of VC sequences in b[0..j].
  int measure() const {
    int n = 0;
    std::ptrdiff_t i = 0;
    while (true) {
      if (i > j_) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (std::ptrdiff_t i = 0; i <= j_; ++i)
      if (!cons(i)) return true;
    return false;
  }

  bool double_cons(std::ptrdiff_t j) const { return j >= 1 && at(j) == at(j - 1) && cons(j); }

  bool cvc(std::ptrdiff_t i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    char ch = at(i);
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool ends(std::string_view s) {
    auto len = static_cast<std::ptrdiff_t>(s.size());
    if (len > k_ + 1) return false;
    if (std::string_view(b_).substr(static_cast<std::size_t>(k_ - len + 1), s.size()) != s) return false;
    j_ = k_ - len;
    return true;
  }

  void set_to(std::string_view s) {
    b_.resize(static_cast<std::size_t>(j_ + 1));
    b_ += s;
    k_ = static_cast<std::ptrdiff_t>(b_.size()) - 1;
  }

  void replace_if_measured(std::string_view s) {
    if (measure() > 0) set_to(s);
  }

  void step1ab() {
    if (at(k_) == 's') {
      if (ends("sses"))
        k_ -= 2;
      else if (ends("ies"))
        set_to("i");
      else if (at(k_ - 1) != 's')
        --k_;
    }
    if (ends("eed")) {
      if (measure() > 0) --k_;
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      k_ = j_;
      if (ends("at"))
        set_to("ate");
      else if (ends("bl"))
        set_to("ble");
      else if (ends("iz"))
        set_to("ize");
      else if (double_cons(k_)) {
        --k_;
        char ch = at(k_);
        if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
      } else {
        j_ = k_;
        if (measure() == 1 && cvc(k_)) set_to("e");
      }
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
  }

  // First matching suffix decides; its condition is checked afterwards.
  bool rule(std::string_view suffix, std::string_view repl) {
    if (!ends(suffix)) return false;
    replace_if_measured(repl);
    return true;
  }

  void step2() {
    switch (at(k_ - 1)) {
      case 'a': rule("ational", "ate") || rule("tional", "tion"); break;
      case 'c': rule("enci", "ence") || rule("anci", "ance"); break;
      case 'e': rule("izer", "ize"); break;
      case 'l':
        rule("abli", "able") || rule("alli", "al") || rule("entli", "ent") || rule("eli", "e") ||
            rule("ousli", "ous");
        break;
      case 'o': rule("ization", "ize") || rule("ation", "ate") || rule("ator", "ate"); break;
      case 's':
        rule("alism", "al") || rule("iveness", "ive") || rule("fulness", "ful") || rule("ousness", "ous");
        break;
      case 't': rule("aliti", "al") || rule("iviti", "ive") || rule("biliti", "ble"); break;
      default: break;
    }
  }

  void step3() {
    switch (at(k_)) {
      case 'e': rule("icate", "ic") || rule("ative", "") || rule("alize", "al"); break;
      case 'i': rule("iciti", "ic"); break;
      case 'l': rule("ical", "ic") || rule("ful", ""); break;
      case 's': rule("ness", ""); break;
      default: break;
    }
  }

  void step4() {
    if (k_ < 1) return;
    bool hit = false;
    switch (at(k_ - 1)) {
      case 'a': hit = ends("al"); break;
      case 'c': hit = ends("ance") || ends("ence"); break;
      case 'e': hit = ends("er"); break;
      case 'i': hit = ends("ic"); break;
      case 'l': hit = ends("able") || ends("ible"); break;
      case 'n': hit = ends("ant") || ends("ement") || ends("ment") || ends("ent"); break;
      case 'o':
        hit = (ends("ion") && j_ >= 0 && (at(j_) == 's' || at(j_) == 't')) || ends("ou");
        break;
      case 's': hit = ends("ism"); break;
      case 't': hit = ends("ate") || ends("iti"); break;
      case 'u': hit = ends("ous"); break;
      case 'v': hit = ends("ive"); break;
      case 'z': hit = ends("ize"); break;
      default: break;
    }
    if (hit && measure() > 1) k_ = j_;
  }

  void step5() {
    j_ = k_;
    if (at(k_) == 'e') {
      int a = measure();
      if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
    }
    j_ = k_;
    if (at(k_) == 'l' && double_cons(k_) && measure() > 1) --k_;
  }

  std::string b_;
  std::ptrdiff_t k_;
  std::ptrdiff_t j_ = 0;
};

}  // namespace

std::string porter_stem(std::string_view token) { return Porter(ascii_lower(token)).run(); }

// ---------------------------------------------------------------------------
// Edit distance and summaries

std::size_t token_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

QuartileSummary quartiles(std::vector<double> values) {
  QuartileSummary q;
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  auto at = [&](double f) {
    double pos = f * static_cast<double>(values.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  q.min = values.front();
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  q.max = values.back();
  return q;
}

LengthRatioStats length_ratio_stats(const std::vector<Segment>& outputs, const std::vector<Segment>& normals) {
  if (outputs.size() != normals.size())
    throw DataError("length ratios need aligned segment lists (" + std::to_string(outputs.size()) + " vs " +
                    std::to_string(normals.size()) + ")");
  LengthRatioStats st;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (normals[i].empty()) {
      st.skipped.push_back(i);
      continue;
    }
    st.ratios.push_back(static_cast<double>(outputs[i].size()) / static_cast<double>(normals[i].size()));
  }
  st.summary = quartiles(st.ratios);
  return st;
}

}  // namespace simplesmt
