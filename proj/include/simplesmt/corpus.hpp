#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "simplesmt/util.hpp"

namespace simplesmt {

// A tokenized sentence. Tokens are non-empty and contain no whitespace.
struct Segment {
  std::vector<std::string> tokens;

  Segment() = default;
  explicit Segment(std::vector<std::string> t) : tokens(std::move(t)) {}

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  const std::string& operator[](std::size_t i) const { return tokens[i]; }
  std::string str() const { return join(tokens); }

  // Whitespace split; the inverse of str().
  static Segment from_string(std::string_view line) { return Segment(split_whitespace(line)); }

  friend bool operator==(const Segment&, const Segment&) = default;
};

enum class Side { kNormal = 0, kSimple = 1 };

inline Side other(Side s) { return s == Side::kNormal ? Side::kSimple : Side::kNormal; }
std::string_view side_name(Side s);
Side parse_side(std::string_view name);

struct SentencePair {
  Segment normal;
  Segment simple;

  const Segment& side(Side s) const { return s == Side::kNormal ? normal : simple; }
  Segment& side(Side s) { return s == Side::kNormal ? normal : simple; }
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;
  std::array<std::string, 2> side_labels{"normal", "simple"};

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  std::vector<Segment> side(Side s) const;
};

// Pairs line i of each file. Tokens are whitespace-split only.
ParallelCorpus load_parallel(const fs::path& normal_path, const fs::path& simple_path);
void write_side(const ParallelCorpus& corpus, Side side, const fs::path& path);

// Splits punctuation off words and detaches English contractions so the
// suffix keeps its apostrophe ("wasn't" -> "was" "n't", "men's" -> "men" "'s").
// Periods and commas between digits and hyphens between word characters stay
// inside the word. Treebank bracket escapes (-LRB- ...) pass through.
Segment tokenize(std::string_view raw);

// Replaces -LRB- / -RRB- / -LSB- / -RSB- / -LCB- / -RCB- with the bracket itself.
Segment unescape_brackets(const Segment& seg);

struct ScrubWarning {
  std::size_t position;  // byte offset into the quote-free text
  char character;
};

// Removes double quotes, balanced parenthesized spans (outermost span, with
// the parentheses), and asterisks, then collapses whitespace. Unbalanced
// parentheses are kept and reported.
std::string scrub_simple_side(std::string_view raw, std::vector<ScrubWarning>* warnings = nullptr);

class TruecaseModel {
 public:
  TruecaseModel() = default;

  // Counts surface forms at non-initial positions of one side.
  static TruecaseModel train(const ParallelCorpus& corpus, Side side);
  static TruecaseModel train(const std::vector<Segment>& segments);

  // Only the first token may change, and only in letter case.
  Segment apply(const Segment& seg) const;

  // Preferred surface form for a lowercased key, or nullptr if unseen.
  const std::string* preferred_form(const std::string& lowered) const;

  bool empty() const { return counts_.empty(); }
  const std::map<std::string, std::uint64_t>& counts() const { return counts_; }

  // `surface_form<TAB>count` lines sorted by surface form.
  std::string serialize() const;
  static TruecaseModel parse(std::string_view text, const std::string& where = "truecase");

 private:
  void add(const std::string& form, std::uint64_t n);
  void finalize();

  std::map<std::string, std::uint64_t> counts_;
  std::map<std::string, std::string> preferred_;
};

struct CleanBounds {
  std::size_t min_len = 1;
  std::size_t max_len = 70;
};

// Keep iff both sides have token counts within [min_len, max_len].
bool clean_pair(const SentencePair& pair, const CleanBounds& bounds = {});

struct SplitSpec {
  double train_fraction = 0.8;
  double dev_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

enum class SplitPart { kTrain, kDev, kTest };
std::string_view split_part_name(SplitPart p);

struct CorpusSplit {
  ParallelCorpus train, dev, test;
  std::vector<SplitPart> assignment;  // per original pair index

  // "index<TAB>part" lines.
  std::string manifest_text() const;
};

// Seeded Fisher-Yates permutation sliced into dev and test of floor(n*f)
// pairs each; train gets the rest. Each part keeps the original pair order.
CorpusSplit split_corpus(const ParallelCorpus& corpus, const SplitSpec& spec);

struct SideStats {
  double mean_tokens = 0;
  double sd_tokens = 0;  // population SD
};

struct CorpusStats {
  std::size_t pair_count = 0;
  SideStats normal, simple;
  double identical_pair_fraction = 0;
};

CorpusStats compute_stats(const ParallelCorpus& corpus);

}  // namespace simplesmt
