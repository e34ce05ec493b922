#pragma once

#include <map>
#include <string>
#include <vector>

#include "simplesmt/decode.hpp"
#include "simplesmt/eval.hpp"

namespace simplesmt {

enum class Component { kPhrase, kLm, kReorder };
std::string_view component_name(Component c);
Component parse_component(std::string_view name);

enum class Metric { kMeteor, kBleu };
std::string_view metric_name(Metric m);
Metric parse_metric(std::string_view name);

struct SweepGrid {
  std::vector<double> phrase{0.2, 1.0};
  std::vector<double> lm{0.5, 1.0};
  std::vector<double> reorder{0.3, 1.0};

  const std::vector<double>& values(Component c) const;
  std::size_t size() const { return phrase.size() * lm.size() * reorder.size(); }
  // Every combination, ascending by (phrase, lm, reorder). Duplicate values
  // within a list are ignored.
  std::vector<Weights> points() const;
  void validate() const;
};

struct MetricPair {
  double meteor = 0;
  double bleu = 0;

  double get(Metric m) const { return m == Metric::kMeteor ? meteor : bleu; }
  friend bool operator==(const MetricPair&, const MetricPair&) = default;
};

struct SweepResult {
  SweepGrid grid;
  std::map<Weights, MetricPair> scores;
  std::string corpus_id;      // digest of the dev data
  std::string config_digest;  // digest of the decoder and model settings
};

// Decodes `sources` once per grid point and scores against `references`.
SweepResult run_sweep(const std::vector<Segment>& sources, const std::vector<Segment>& references,
                      const PhraseTable& table, const NGramModel& lm, const SweepGrid& grid,
                      const DecoderConfig& config, const MatchStageConfig& meteor = {});

struct ComponentEffect {
  Component component;
  struct Row {
    double weight;
    MetricPair mean;
    std::size_t count;  // grid points averaged
  };
  std::vector<Row> rows;  // ascending by weight
};

// Mean of both metrics over all grid points sharing each candidate weight of
// `component`. Throws DataError listing missing grid points.
ComponentEffect average_out(const SweepResult& result, Component component);

// Highest score under `metric`; ties go to the smallest weight triple.
Weights select_best(const SweepResult& result, Metric metric = Metric::kMeteor);

struct SystemScores {
  BleuReport bleu;
  MeteorCorpusReport meteor;
};

struct EditDistanceHistogram {
  std::vector<std::size_t> distances;  // per segment
  std::vector<std::size_t> counts;     // counts[d] = segments at distance d
  double mean = 0;
  double median = 0;
};

EditDistanceHistogram edit_distance_histogram(const std::vector<Segment>& outputs,
                                              const std::vector<Segment>& sources);

struct TestReport {
  Weights weights;
  std::vector<DecodeResult> decoded;
  SystemScores system;
  SystemScores original;  // untouched source text scored against the references
  LengthRatioStats system_lengths, reference_lengths;
  EditDistanceHistogram system_edits, reference_edits;
};

// Scores already-decoded outputs. The Original baseline is a pure copy of
// `sources`; no decoding happens here.
TestReport evaluate_outputs(const std::vector<Segment>& sources, const std::vector<Segment>& references,
                            const std::vector<Segment>& outputs, const MatchStageConfig& meteor = {});

TestReport evaluate_test(const std::vector<Segment>& sources, const std::vector<Segment>& references,
                         const PhraseTable& table, const NGramModel& lm, const Weights& weights,
                         const DecoderConfig& config, const MatchStageConfig& meteor = {});

// Serialization. JSON texts are pretty-printed with sorted keys.
std::string sweep_json(const SweepResult& result, Metric selection);
std::string effects_csv(const std::vector<ComponentEffect>& effects);
std::string test_report_json(const TestReport& report, const std::string& reference_side,
                             const std::string& source_side);
// Per-segment METEOR panels: candidate, reference and P/R/Frag/Score lines.
std::string xray_text(const std::vector<Segment>& outputs, const std::vector<Segment>& references,
                      const MeteorCorpusReport& meteor);

}  // namespace simplesmt
