#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simplesmt/align.hpp"
#include "simplesmt/corpus.hpp"
#include "simplesmt/decode.hpp"
#include "simplesmt/error.hpp"
#include "simplesmt/experiment.hpp"
#include "simplesmt/lm.hpp"

namespace simplesmt {

// Forward: normal -> simple. Reverse: simple -> normal.
enum class Direction { kForward, kReverse };
enum class ScrubMode { kNone, kBible };

// Flat key=value configuration of a whole pipeline run.
struct PipelineConfig {
  fs::path normal = "normal.txt";
  fs::path simple = "simple.txt";
  fs::path workdir = "work";
  Direction direction = Direction::kForward;

  SplitSpec split;
  ScrubMode scrub = ScrubMode::kNone;  // applies to the simple-side file
  bool unescape_brackets = false;
  bool truecase = true;
  CleanBounds clean;

  AlignConfig align;
  std::size_t phrase_max_len = PhraseTable::kDefaultMaxLen;
  LMConfig lm;
  DecoderConfig decoder;
  std::optional<Weights> weights;  // unset: sweep winner if available, else defaults
  SweepGrid grid;
  Metric select_metric = Metric::kMeteor;
  MatchStageConfig meteor;
  unsigned threads = 0;  // 0 = all cores

  Side source_side() const { return direction == Direction::kForward ? Side::kNormal : Side::kSimple; }
  Side target_side() const { return other(source_side()); }

  // Canonical (key, value) list in fixed key order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  static const std::vector<std::string>& keys();
  // Throws ConfigError for unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  // `key = value` lines in canonical order.
  std::string serialize() const;
  // Starts from defaults; `#` starts a comment.
  static PipelineConfig parse(std::string_view text, const std::string& where = "config");
  static PipelineConfig load(const fs::path& path);
  // Rebuilds the configuration recorded in a run manifest.
  static PipelineConfig from_manifest(const fs::path& manifest_path);
};

std::string_view direction_name(Direction d);
PipelineConfig reverse_direction(const PipelineConfig& config);

// Raised when a stage's input has not been produced yet.
class MissingArtifactError : public DataError {
 public:
  MissingArtifactError(const fs::path& path, const std::string& producer);
};

// Fixed workdir layout.
struct Workdir {
  fs::path root;

  fs::path corpus(std::string_view part, Side side) const;
  fs::path split_manifest() const { return root / "corpus" / "split.tsv"; }
  fs::path truecase_model(Side side) const;
  fs::path alignments() const { return root / "align" / "train.align"; }
  fs::path ttable() const { return root / "align" / "ttable.tsv"; }
  fs::path loglik() const { return root / "align" / "loglik.txt"; }
  fs::path phrase_table() const { return root / "model" / "phrase-table.txt"; }
  fs::path lm() const { return root / "model" / "lm.arpa"; }
  fs::path output(std::string_view part) const;
  fs::path features(std::string_view part) const;
  fs::path eval_report(std::string_view part) const;
  fs::path xray(std::string_view part) const;
  fs::path sweep_report() const { return root / "reports" / "sweep.json"; }
  fs::path effects() const { return root / "reports" / "effects.csv"; }
  fs::path report() const { return root / "reports" / "report.json"; }
  fs::path manifest() const { return root / "manifest.json"; }
  fs::path lockfile() const { return root / ".lock"; }
};

// Exclusive guard against concurrent invocations on one workdir.
class WorkdirLock {
 public:
  explicit WorkdirLock(const fs::path& workdir);
  ~WorkdirLock();
  WorkdirLock(const WorkdirLock&) = delete;
  WorkdirLock& operator=(const WorkdirLock&) = delete;

 private:
  fs::path path_;
};

// Pipeline stages. Each reads earlier artifacts from the workdir, writes its
// own, and records configuration and output digests in manifest.json.
void run_prepare(const PipelineConfig& config, std::ostream& log);
void run_align(const PipelineConfig& config, std::ostream& log);
void run_phrases(const PipelineConfig& config, std::ostream& log);
void run_lm(const PipelineConfig& config, std::ostream& log);
void run_decode(const PipelineConfig& config, std::string_view part, std::ostream& log);
void run_eval(const PipelineConfig& config, std::string_view part, std::ostream& log);
void run_sweep_stage(const PipelineConfig& config, std::ostream& log);
// Decodes and evaluates the test split with the resolved weights, then writes
// a combined report next to the per-split files.
void run_report(const PipelineConfig& config, std::ostream& log);

// Weights a decode would use: explicit config, else the sweep winner, else
// the Weights defaults. The second member names the source.
std::pair<Weights, std::string> resolve_weights(const PipelineConfig& config);

}  // namespace simplesmt
