#include "simplesmt/phrases.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "simplesmt/error.hpp"

namespace simplesmt {

std::vector<PhraseSpan> extract_phrases(std::size_t src_len, std::size_t tgt_len,
                                        const AlignmentLinks& links, std::size_t max_len) {
  std::vector<PhraseSpan> out;
  if (links.links.empty() || max_len == 0) return out;
  std::vector<std::vector<std::size_t>> src_of_tgt(tgt_len), tgt_of_src(src_len);
  for (const auto& [i, j] : links.links) {
    if (i >= src_len || j >= tgt_len) throw DataError("alignment link out of segment bounds");
    src_of_tgt[j].push_back(i);
    tgt_of_src[i].push_back(j);
  }

  for (std::size_t s1 = 0; s1 < src_len; ++s1) {
    for (std::size_t s2 = s1; s2 < src_len && s2 - s1 < max_len; ++s2) {
      // Target extent of the links from [s1, s2].
      std::size_t t1 = tgt_len, t2 = 0;
      for (std::size_t i = s1; i <= s2; ++i)
        for (auto j : tgt_of_src[i]) {
          t1 = std::min(t1, j);
          t2 = std::max(t2, j);
        }
      if (t1 == tgt_len || t2 - t1 >= max_len) continue;
      bool consistent = true;
      for (std::size_t j = t1; j <= t2 && consistent; ++j)
        for (auto i : src_of_tgt[j])
          if (i < s1 || i > s2) {
            consistent = false;
            break;
          }
      if (!consistent) continue;
      // Grow the target side over unaligned neighbours.
      for (std::size_t ts = t1 + 1; ts-- > 0;) {
        if (ts < t1 && !src_of_tgt[ts].empty()) break;
        if (t2 - ts >= max_len) break;
        for (std::size_t te = t2; te < tgt_len; ++te) {
          if (te > t2 && !src_of_tgt[te].empty()) break;
          if (te - ts >= max_len) break;
          out.push_back({s1, s2 + 1, ts, te + 1});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

PhraseCounts count_phrases(const std::vector<Segment>& source, const std::vector<Segment>& target,
                           const std::vector<AlignmentLinks>& alignments, std::size_t max_len,
                           unsigned threads) {
  if (source.size() != target.size() || source.size() != alignments.size())
    throw AlignmentError("segment and alignment counts differ");
  std::vector<std::vector<PhraseSpan>> spans(source.size());
  parallel_for(source.size(), threads, [&](std::size_t k) {
    spans[k] = extract_phrases(source[k].size(), target[k].size(), alignments[k], max_len);
  });
  PhraseCounts counts;
  auto slice = [](const Segment& s, std::size_t b, std::size_t e) {
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
      if (i > b) out += ' ';
      out += s[i];
    }
    return out;
  };
  for (std::size_t k = 0; k < source.size(); ++k)
    for (const auto& sp : spans[k])
      ++counts[{slice(source[k], sp.src_begin, sp.src_end), slice(target[k], sp.tgt_begin, sp.tgt_end)}];
  return counts;
}

// ---------------------------------------------------------------------------

PhraseTable PhraseTable::estimate(const PhraseCounts& counts, std::size_t max_len) {
  if (counts.empty()) throw DataError("no phrase pairs to estimate a table from");
  std::unordered_map<std::string, std::uint64_t> src_total, tgt_total;
  for (const auto& [key, c] : counts) {
    src_total[key.first] += c;
    tgt_total[key.second] += c;
  }
  PhraseTable table;
  table.max_len_ = max_len;
  for (const auto& [key, c] : counts) {
    PhraseCandidate cand;
    cand.target = key.second;
    cand.tokens = split_whitespace(key.second);
    double n = static_cast<double>(c);
    cand.log_fwd = std::log(n / static_cast<double>(src_total[key.first]));
    cand.log_bwd = std::log(n / static_cast<double>(tgt_total[key.second]));
    table.entries_[key.first].push_back(std::move(cand));
  }
  table.finalize();
  return table;
}

void PhraseTable::add(const std::string& source, PhraseCandidate cand) {
  if (cand.tokens.empty()) cand.tokens = split_whitespace(cand.target);
  entries_[source].push_back(std::move(cand));
}

void PhraseTable::finalize() {
  for (auto& [src, cands] : entries_)
    std::sort(cands.begin(), cands.end(), [](const PhraseCandidate& a, const PhraseCandidate& b) {
      if (a.log_fwd != b.log_fwd) return a.log_fwd > b.log_fwd;
      return a.target < b.target;
    });
}

const std::vector<PhraseCandidate>& PhraseTable::query(const std::string& source) const {
  static const std::vector<PhraseCandidate> kEmpty;
  auto it = entries_.find(source);
  return it == entries_.end() ? kEmpty : it->second;
}

const std::vector<PhraseCandidate>& PhraseTable::query(const std::vector<std::string>& tokens,
                                                       std::size_t begin, std::size_t end) const {
  std::string key;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) key += ' ';
    key += tokens[i];
  }
  return query(key);
}

std::size_t PhraseTable::entry_count() const {
  std::size_t n = 0;
  for (const auto& [src, cands] : entries_) n += cands.size();
  return n;
}

std::string PhraseTable::serialize() const {
  std::string out;
  for (const auto& [src, cands] : entries_) {
    std::vector<const PhraseCandidate*> sorted;
    for (const auto& c : cands) sorted.push_back(&c);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->target < b->target; });
    for (const auto* c : sorted) {
      out += src;
      out += " ||| ";
      out += c->target;
      out += " ||| ";
      out += format_double(c->log_fwd);
      out += ' ';
      out += format_double(c->log_bwd);
      out += '\n';
    }
  }
  return out;
}

PhraseTable PhraseTable::parse(std::string_view text, const std::string& where) {
  PhraseTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::size_t longest = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto a = line.find(" ||| ");
    auto b = a == std::string::npos ? a : line.find(" ||| ", a + 5);
    if (b == std::string::npos) throw ParseError(where, line_no, "expected 'src ||| tgt ||| scores'");
    std::string src = line.substr(0, a);
    PhraseCandidate cand;
    cand.target = line.substr(a + 5, b - a - 5);
    cand.tokens = split_whitespace(cand.target);
    auto scores = split_whitespace(std::string_view(line).substr(b + 5));
    if (src.empty() || cand.tokens.empty() || scores.size() != 2)
      throw ParseError(where, line_no, "expected non-empty phrases and two scores");
    try {
      cand.log_fwd = parse_double(scores[0]);
      cand.log_bwd = parse_double(scores[1]);
    } catch (const DataError&) {
      throw ParseError(where, line_no, "bad score");
    }
    longest = std::max({longest, split_whitespace(src).size(), cand.tokens.size()});
    table.entries_[src].push_back(std::move(cand));
  }
  table.max_len_ = std::max<std::size_t>(longest, 1);
  table.finalize();
  return table;
}

}  // namespace simplesmt
