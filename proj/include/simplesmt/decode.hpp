#pragma once

#include <limits>
#include <string>
#include <vector>

#include "simplesmt/corpus.hpp"
#include "simplesmt/lm.hpp"
#include "simplesmt/phrases.hpp"

namespace simplesmt {

// score = phrase * f_phrase + lm * f_lm + reorder * f_reorder
struct Weights {
  double phrase = 1.0;
  double lm = 1.0;
  double reorder = 1.0;

  auto operator<=>(const Weights&) const = default;
  std::string str() const;
};

struct FeatureVector {
  double phrase = 0;   // sum of ln phi(target | source) over applied phrases
  double lm = 0;       // ln p_LM(output)
  double reorder = 0;  // minus the total jump distance

  double dot(const Weights& w) const { return w.phrase * phrase + w.lm * lm + w.reorder * reorder; }
};

struct DecoderConfig {
  static constexpr int kUnlimited = -1;

  std::size_t beam_size = 100;
  int distortion_limit = 6;  // kUnlimited disables the limit
  double threshold = 0;      // keep hypotheses within ln(threshold) of the best; 0 disables
  bool oov_copy = true;
  unsigned threads = 1;

  void validate() const;
};

struct PhraseApplication {
  std::size_t src_begin = 0, src_end = 0;
  std::vector<std::string> target;
  double log_fwd = 0;

  friend bool operator==(const PhraseApplication&, const PhraseApplication&) = default;
};

// Phrase applications in the order they were applied.
using Derivation = std::vector<PhraseApplication>;

struct DecodeResult {
  Segment translation;
  FeatureVector features;
  double score = 0;
  Derivation derivation;
};

// Penalty for starting a phrase at next_start when the previous one ended
// just before prev_end: -|next_start - prev_end|.
double distortion(std::size_t prev_end, std::size_t next_start);

Segment derivation_output(const Derivation& d);
FeatureVector compute_features(const Derivation& d, const NGramModel& lm);
double rescore(const Derivation& d, const NGramModel& lm, const Weights& weights);

// A phrase option available while decoding one sentence.
struct TranslationOption {
  std::size_t src_begin, src_end;
  const std::vector<std::string>* target;
  double log_fwd;
  bool copied;  // synthesized copy of an unknown word
};

// Every table match over spans of `src` up to the table's phrase length, plus
// copy-through options for words with no single-word entry when oov_copy is
// set. Throws DecodeError naming an uncoverable word otherwise.
std::vector<TranslationOption> collect_options(const Segment& src, const PhraseTable& table,
                                               const DecoderConfig& config,
                                               std::vector<std::vector<std::string>>& copy_storage);

DecodeResult decode(const Segment& src, const PhraseTable& table, const NGramModel& lm, const Weights& weights,
                    const DecoderConfig& config = {});

// Decodes each segment independently; results keep input order.
std::vector<DecodeResult> decode_all(const std::vector<Segment>& sources, const PhraseTable& table,
                                     const NGramModel& lm, const Weights& weights, const DecoderConfig& config);

// `f_phrase<TAB>f_lm<TAB>f_reorder<TAB>score` per result.
std::string feature_lines(const std::vector<DecodeResult>& results);

}  // namespace simplesmt
