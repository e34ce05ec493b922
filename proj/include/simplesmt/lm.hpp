#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "simplesmt/corpus.hpp"
#include "simplesmt/util.hpp"
#include "simplesmt/vocab.hpp"

namespace simplesmt {

struct LMConfig {
  int order = 5;
  double discount = 0.75;
  // Training tokens seen fewer than this many times become <unk>.
  std::uint64_t unk_threshold = 1;

  void validate() const;
};

// Back-off n-gram model holding ARPA-style entries: log10 p and log10 backoff
// per stored n-gram. Queries back off exactly the way ARPA consumers do.
class NGramModel {
 public:
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";
  static constexpr const char* kUnk = "<unk>";
  static constexpr WordId kUnkId = 0;
  static constexpr WordId kBosId = 1;
  static constexpr WordId kEosId = 2;
  // log10 value ARPA files use for the never-predicted <s>.
  static constexpr double kNoProb = -99.0;

  using State = std::vector<WordId>;  // at most order-1 most recent words

  NGramModel();

  // Interpolated Kneser-Ney with one absolute discount.
  static NGramModel train(const std::vector<Segment>& sentences, const LMConfig& config);

  int order() const { return order_; }
  const Vocab& vocab() const { return vocab_; }
  WordId index(const std::string& word) const { return vocab_.find(word, kUnkId); }

  // Natural-log conditional probability of `word` after `context` (oldest
  // first; only the last order-1 words matter).
  double log_prob(const std::vector<WordId>& context, WordId word) const;
  double log10_prob(const std::vector<WordId>& context, WordId word) const;

  State begin_state() const { return order_ > 1 ? State{kBosId} : State{}; }
  // Returns ln p(word | state) and advances the state.
  double score_word(State& state, WordId word) const;

  // Natural-log probability including the end marker; never -inf.
  double score_sequence(const std::vector<std::string>& tokens) const;
  double score_sequence(const Segment& seg) const { return score_sequence(seg.tokens); }

  // Model with only orders <= n and no backoff weights on the new top order.
  NGramModel truncated(int n) const;

  std::size_t ngram_count(int k) const { return tables_[k - 1].size(); }

  std::string to_arpa() const;
  static NGramModel from_arpa(std::string_view text, const std::string& where = "arpa");
  void write_arpa(const fs::path& path) const;
  static NGramModel read_arpa(const fs::path& path);

 private:
  struct Entry {
    double log10_prob = 0;
    double log10_backoff = 0;
  };
  using Table = std::unordered_map<std::vector<WordId>, Entry, IdSequenceHash>;

  const Entry* find(const std::vector<WordId>& gram) const;

  int order_ = 1;
  Vocab vocab_;
  std::vector<Table> tables_;  // tables_[k-1] holds k-grams
};

}  // namespace simplesmt
