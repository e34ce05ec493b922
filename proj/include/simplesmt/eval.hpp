#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "simplesmt/corpus.hpp"

namespace simplesmt {

struct BleuReport {
  static constexpr int kMaxOrder = 4;
  std::array<double, kMaxOrder> precisions{};  // clipped matches / candidate n-grams
  std::array<std::size_t, kMaxOrder> matches{};
  std::array<std::size_t, kMaxOrder> totals{};
  double brevity_penalty = 0;
  double score = 0;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
};

// Corpus BLEU: n-gram counts pooled over all segments, one reference each.
BleuReport bleu_corpus(const std::vector<Segment>& candidates, const std::vector<Segment>& references);

enum class MatchStage { kExact, kStem };

struct MatchStageConfig {
  std::vector<MatchStage> stages{MatchStage::kExact, MatchStage::kStem};
  double alpha = 0.9;  // Fmean recall weight
  double beta = 3.0;   // penalty exponent
  double gamma = 0.5;  // penalty weight
  // Upper bound on search nodes per stage before falling back to greedy.
  std::size_t ambiguity_cap = 200000;

  void validate() const;
};

struct MeteorReport {
  std::size_t matches = 0;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
  double precision = 0;
  double recall = 0;
  std::size_t chunks = 0;
  double fmean = 0;
  double fragmentation = 0;  // chunks / matches
  double penalty = 0;
  double score = 0;
  bool greedy_fallback = false;
  // (candidate index, reference index), ascending by candidate index.
  std::vector<std::pair<std::size_t, std::size_t>> alignment;
};

MeteorReport meteor_sentence(const Segment& candidate, const Segment& reference, const MatchStageConfig& config = {});

struct MeteorCorpusReport {
  MeteorReport pooled;  // no alignment; greedy_fallback if any segment fell back
  std::vector<MeteorReport> segments;
};

// Matches, lengths and chunks summed over segments, then scored once.
MeteorCorpusReport meteor_corpus(const std::vector<Segment>& candidates, const std::vector<Segment>& references,
                                 const MatchStageConfig& config = {});

// Porter (1980) suffix stripping on the ASCII-lowercased token.
std::string porter_stem(std::string_view token);

std::size_t token_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);
inline std::size_t token_edit_distance(const Segment& a, const Segment& b) {
  return token_edit_distance(a.tokens, b.tokens);
}

struct QuartileSummary {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

// Inclusive linear interpolation between order statistics. Empty input
// yields all zeros.
QuartileSummary quartiles(std::vector<double> values);

struct LengthRatioStats {
  std::vector<double> ratios;  // |output| / |normal| for non-empty normals
  std::vector<std::size_t> skipped;  // indices with an empty normal segment
  QuartileSummary summary;
};

LengthRatioStats length_ratio_stats(const std::vector<Segment>& outputs, const std::vector<Segment>& normals);

}  // namespace simplesmt
