#include "simplesmt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "simplesmt/error.hpp"
#include "simplesmt/util.hpp"

namespace simplesmt {

using nlohmann::json;

std::string_view component_name(Component c) {
  switch (c) {
    case Component::kPhrase: return "phrase";
    case Component::kLm: return "lm";
    case Component::kReorder: return "reorder";
  }
  return "?";
}

Component parse_component(std::string_view name) {
  if (name == "phrase") return Component::kPhrase;
  if (name == "lm") return Component::kLm;
  if (name == "reorder") return Component::kReorder;
  throw ConfigError("unknown component '" + std::string(name) + "' (phrase, lm, reorder)");
}

std::string_view metric_name(Metric m) { return m == Metric::kMeteor ? "meteor" : "bleu"; }

Metric parse_metric(std::string_view name) {
  if (name == "meteor") return Metric::kMeteor;
  if (name == "bleu") return Metric::kBleu;
  throw ConfigError("unknown metric '" + std::string(name) + "' (meteor, bleu)");
}

namespace {

double component_of(const Weights& w, Component c) {
  switch (c) {
    case Component::kPhrase: return w.phrase;
    case Component::kLm: return w.lm;
    case Component::kReorder: return w.reorder;
  }
  return 0;
}

std::vector<double> distinct(const std::vector<double>& v) {
  std::set<double> s(v.begin(), v.end());
  return {s.begin(), s.end()};
}

}  // namespace

const std::vector<double>& SweepGrid::values(Component c) const {
  switch (c) {
    case Component::kPhrase: return phrase;
    case Component::kLm: return lm;
    case Component::kReorder: return reorder;
  }
  return phrase;
}

void SweepGrid::validate() const {
  for (Component c : {Component::kPhrase, Component::kLm, Component::kReorder}) {
    const auto& v = values(c);
    if (v.empty()) throw ConfigError("sweep grid list for " + std::string(component_name(c)) + " is empty");
    for (double x : v)
      if (!std::isfinite(x)) throw ConfigError("sweep grid weights must be finite");
  }
}

std::vector<Weights> SweepGrid::points() const {
  std::vector<Weights> pts;
  for (double p : distinct(phrase))
    for (double l : distinct(lm))
      for (double r : distinct(reorder)) pts.push_back({p, l, r});
  return pts;
}

SweepResult run_sweep(const std::vector<Segment>& sources, const std::vector<Segment>& references,
                      const PhraseTable& table, const NGramModel& lm, const SweepGrid& grid,
                      const DecoderConfig& config, const MatchStageConfig& meteor) {
  grid.validate();
  config.validate();
  if (sources.size() != references.size())
    throw DataError("sweep needs one reference per source segment");
  if (sources.empty()) throw DataError("sweep over an empty dev set");

  SweepResult result;
  result.grid = grid;
  std::string corpus;
  for (std::size_t i = 0; i < sources.size(); ++i) corpus += sources[i].str() + "\t" + references[i].str() + "\n";
  result.corpus_id = sha256_hex(corpus);
  result.config_digest = sha256_hex("beam=" + std::to_string(config.beam_size) +
                                    " distortion=" + std::to_string(config.distortion_limit) +
                                    " threshold=" + format_double(config.threshold) +
                                    " oov_copy=" + std::to_string(config.oov_copy) + "\n" + table.serialize() +
                                    lm.to_arpa());

  for (const Weights& w : grid.points()) {
    auto decoded = decode_all(sources, table, lm, w, config);
    std::vector<Segment> outputs;
    outputs.reserve(decoded.size());
    for (auto& d : decoded) outputs.push_back(std::move(d.translation));
    MetricPair mp;
    mp.bleu = bleu_corpus(outputs, references).score;
    mp.meteor = meteor_corpus(outputs, references, meteor).pooled.score;
    result.scores[w] = mp;
  }
  return result;
}

ComponentEffect average_out(const SweepResult& result, Component component) {
  std::vector<std::string> missing;
  for (const Weights& w : result.grid.points())
    if (!result.scores.count(w)) missing.push_back(w.str());
  if (!missing.empty()) throw DataError("sweep result is missing grid points: " + join(missing, "; "));

  ComponentEffect eff{component, {}};
  for (double v : distinct(result.grid.values(component))) {
    ComponentEffect::Row row{v, {}, 0};
    for (const Weights& w : result.grid.points()) {
      if (component_of(w, component) != v) continue;
      const auto& s = result.scores.at(w);
      row.mean.meteor += s.meteor;
      row.mean.bleu += s.bleu;
      ++row.count;
    }
    row.mean.meteor /= static_cast<double>(row.count);
    row.mean.bleu /= static_cast<double>(row.count);
    eff.rows.push_back(row);
  }
  return eff;
}

Weights select_best(const SweepResult& result, Metric metric) {
  if (result.scores.empty()) throw DataError("cannot select weights from an empty sweep");
  auto best = result.scores.begin();
  for (auto it = result.scores.begin(); it != result.scores.end(); ++it)
    if (it->second.get(metric) > best->second.get(metric)) best = it;
  return best->first;
}

EditDistanceHistogram edit_distance_histogram(const std::vector<Segment>& outputs,
                                              const std::vector<Segment>& sources) {
  if (outputs.size() != sources.size()) throw DataError("edit distances need aligned segment lists");
  EditDistanceHistogram h;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    std::size_t d = token_edit_distance(outputs[i], sources[i]);
    h.distances.push_back(d);
    if (h.counts.size() <= d) h.counts.resize(d + 1, 0);
    ++h.counts[d];
  }
  if (h.distances.empty()) return h;
  double sum = 0;
  std::vector<double> vals;
  for (auto d : h.distances) {
    sum += static_cast<double>(d);
    vals.push_back(static_cast<double>(d));
  }
  h.mean = sum / static_cast<double>(vals.size());
  h.median = quartiles(vals).median;
  return h;
}

TestReport evaluate_outputs(const std::vector<Segment>& sources, const std::vector<Segment>& references,
                            const std::vector<Segment>& outputs, const MatchStageConfig& meteor) {
  if (sources.size() != references.size() || sources.size() != outputs.size())
    throw DataError("evaluation needs equally many sources, references and outputs (" +
                    std::to_string(sources.size()) + ", " + std::to_string(references.size()) + ", " +
                    std::to_string(outputs.size()) + ")");
  TestReport rep;
  rep.system.bleu = bleu_corpus(outputs, references);
  rep.system.meteor = meteor_corpus(outputs, references, meteor);
  rep.original.bleu = bleu_corpus(sources, references);
  rep.original.meteor = meteor_corpus(sources, references, meteor);
  rep.system_lengths = length_ratio_stats(outputs, sources);
  rep.reference_lengths = length_ratio_stats(references, sources);
  rep.system_edits = edit_distance_histogram(outputs, sources);
  rep.reference_edits = edit_distance_histogram(references, sources);
  return rep;
}

TestReport evaluate_test(const std::vector<Segment>& sources, const std::vector<Segment>& references,
                         const PhraseTable& table, const NGramModel& lm, const Weights& weights,
                         const DecoderConfig& config, const MatchStageConfig& meteor) {
  auto decoded = decode_all(sources, table, lm, weights, config);
  std::vector<Segment> outputs;
  outputs.reserve(decoded.size());
  for (const auto& d : decoded) outputs.push_back(d.translation);
  TestReport rep = evaluate_outputs(sources, references, outputs, meteor);
  rep.weights = weights;
  rep.decoded = std::move(decoded);
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json weights_json(const Weights& w) { return {{"phrase", w.phrase}, {"lm", w.lm}, {"reorder", w.reorder}}; }

json bleu_json(const BleuReport& b) {
  return {{"precisions", b.precisions},       {"matches", b.matches},
          {"totals", b.totals},               {"brevity_penalty", b.brevity_penalty},
          {"score", b.score},                 {"candidate_length", b.candidate_length},
          {"reference_length", b.reference_length}};
}

json meteor_json(const MeteorReport& m) {
  return {{"matches", m.matches},
          {"candidate_length", m.candidate_length},
          {"reference_length", m.reference_length},
          {"precision", m.precision},
          {"recall", m.recall},
          {"chunks", m.chunks},
          {"fmean", m.fmean},
          {"fragmentation", m.fragmentation},
          {"penalty", m.penalty},
          {"score", m.score},
          {"greedy_fallback", m.greedy_fallback}};
}

json scores_json(const SystemScores& s) {
  return {{"bleu", bleu_json(s.bleu)}, {"meteor", meteor_json(s.meteor.pooled)}};
}

json lengths_json(const LengthRatioStats& l) {
  const auto& q = l.summary;
  return {{"min", q.min},       {"q1", q.q1},
          {"median", q.median}, {"q3", q.q3},
          {"max", q.max},       {"count", l.ratios.size()},
          {"skipped", l.skipped}};
}

json edits_json(const EditDistanceHistogram& h) {
  return {{"bucket_width", 1}, {"histogram", h.counts}, {"mean", h.mean}, {"median", h.median}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string sweep_json(const SweepResult& result, Metric selection) {
  json j;
  j["grid"] = {{"phrase", distinct(result.grid.phrase)},
               {"lm", distinct(result.grid.lm)},
               {"reorder", distinct(result.grid.reorder)}};
  json scores = json::object();
  json runs = json::array();
  for (const auto& [w, s] : result.scores) {
    scores[w.str()] = {{"meteor", s.meteor}, {"bleu", s.bleu}};
    runs.push_back({{"weights", weights_json(w)}, {"meteor", s.meteor}, {"bleu", s.bleu}});
  }
  j["scores"] = scores;
  j["runs"] = runs;
  j["run_count"] = result.scores.size();
  j["corpus_id"] = result.corpus_id;
  j["config_digest"] = result.config_digest;
  j["selection_metric"] = metric_name(selection);
  if (!result.scores.empty()) j["best"] = weights_json(select_best(result, selection));
  return dump(j);
}

std::string effects_csv(const std::vector<ComponentEffect>& effects) {
  std::string out = "component,weight,mean_meteor,mean_bleu\n";
  for (const auto& e : effects)
    for (const auto& r : e.rows)
      out += std::string(component_name(e.component)) + "," + format_double(r.weight) + "," +
             format_double(r.mean.meteor) + "," + format_double(r.mean.bleu) + "\n";
  return out;
}

std::string test_report_json(const TestReport& report, const std::string& reference_side,
                             const std::string& source_side) {
  json j;
  j["weights"] = weights_json(report.weights);
  j["source_side"] = source_side;
  j["reference_side"] = reference_side;
  j["segments"] = report.system_lengths.ratios.size() + report.system_lengths.skipped.size();
  j["system"] = scores_json(report.system);
  j["original"] = scores_json(report.original);
  j["length_ratio"] = {{"system", lengths_json(report.system_lengths)},
                       {"reference", lengths_json(report.reference_lengths)}};
  j["edit_distance"] = {{"system", edits_json(report.system_edits)},
                        {"reference", edits_json(report.reference_edits)}};
  return dump(j);
}

std::string xray_text(const std::vector<Segment>& outputs, const std::vector<Segment>& references,
                      const MeteorCorpusReport& meteor) {
  std::string out;
  char buf[160];
  for (std::size_t i = 0; i < meteor.segments.size(); ++i) {
    const auto& m = meteor.segments[i];
    out += "Segment " + std::to_string(i + 1) + "\n";
    out += "Candidate: " + outputs.at(i).str() + "\n";
    out += "Reference: " + references.at(i).str() + "\n";
    std::string links;
    for (const auto& [c, r] : m.alignment) links += (links.empty() ? "" : " ") + std::to_string(c) + "-" + std::to_string(r);
    out += "Alignment: " + links + "\n";
    std::snprintf(buf, sizeof buf, "P: %.4f\nR: %.4f\nFrag: %.4f\nScore: %.4f\n\n", m.precision, m.recall,
                  m.fragmentation, m.score);
    out += buf;
  }
  return out;
}

}  // namespace simplesmt
