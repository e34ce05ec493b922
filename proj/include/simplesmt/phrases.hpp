#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "simplesmt/align.hpp"
#include "simplesmt/corpus.hpp"

namespace simplesmt {

// Half-open spans [begin, end) over the source and target segments.
struct PhraseSpan {
  std::size_t src_begin, src_end, tgt_begin, tgt_end;

  auto operator<=>(const PhraseSpan&) const = default;
};

// All span pairs of length <= max_len on both sides that contain at least
// one link and have no link leaving the box. Unaligned boundary words may be
// included. Sorted ascending.
std::vector<PhraseSpan> extract_phrases(std::size_t src_len, std::size_t tgt_len,
                                        const AlignmentLinks& links, std::size_t max_len);

// (source phrase, target phrase) -> extraction count; phrases are space-joined.
using PhraseCounts = std::map<std::pair<std::string, std::string>, std::uint64_t>;

PhraseCounts count_phrases(const std::vector<Segment>& source, const std::vector<Segment>& target,
                           const std::vector<AlignmentLinks>& alignments, std::size_t max_len,
                           unsigned threads = 1);

struct PhraseCandidate {
  std::string target;          // space-joined
  std::vector<std::string> tokens;
  double log_fwd = 0;          // ln phi(target | source)
  double log_bwd = 0;          // ln phi(source | target), reporting only
};

class PhraseTable {
 public:
  static constexpr std::size_t kDefaultMaxLen = 7;

  // Relative-frequency estimates in both directions.
  static PhraseTable estimate(const PhraseCounts& counts, std::size_t max_len = kDefaultMaxLen);

  // Candidates best first (log_fwd descending, then target text ascending).
  // Empty for unknown phrases.
  const std::vector<PhraseCandidate>& query(const std::string& source) const;
  const std::vector<PhraseCandidate>& query(const std::vector<std::string>& tokens, std::size_t begin,
                                            std::size_t end) const;

  void add(const std::string& source, PhraseCandidate cand);
  // Re-sorts candidate lists; call after add().
  void finalize();

  std::size_t max_phrase_len() const { return max_len_; }
  void set_max_phrase_len(std::size_t n) { max_len_ = n; }
  std::size_t source_count() const { return entries_.size(); }
  std::size_t entry_count() const;
  const std::map<std::string, std::vector<PhraseCandidate>>& entries() const { return entries_; }

  // `src ||| tgt ||| log_fwd log_bwd`, sorted by source then target.
  std::string serialize() const;
  static PhraseTable parse(std::string_view text, const std::string& where = "phrase-table");

 private:
  std::map<std::string, std::vector<PhraseCandidate>> entries_;
  std::size_t max_len_ = kDefaultMaxLen;
};

}  // namespace simplesmt
