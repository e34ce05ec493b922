#include "simplesmt/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <ostream>

#include <json.hpp>

#include "simplesmt/phrases.hpp"
#include "simplesmt/util.hpp"

namespace simplesmt {

using nlohmann::json;

std::string_view direction_name(Direction d) { return d == Direction::kForward ? "forward" : "reverse"; }

PipelineConfig reverse_direction(const PipelineConfig& config) {
  PipelineConfig r = config;
  r.direction = config.direction == Direction::kForward ? Direction::kReverse : Direction::kForward;
  return r;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::string list_text(const std::vector<double>& v) {
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(format_double(x));
  return join(parts, ",");
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string s = ascii_lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const DataError&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
  long long n = parse_integer(key, v);
  if (n < 0) throw ConfigError(key + ": must not be negative");
  return static_cast<std::uint64_t>(n);
}

std::vector<std::string> split_commas(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& p : split_commas(v)) out.push_back(parse_real(key, p));
  return out;
}

std::string stage_list_text(const std::vector<MatchStage>& stages) {
  std::vector<std::string> names;
  for (auto s : stages) names.emplace_back(s == MatchStage::kExact ? "exact" : "stem");
  return join(names, ",");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> PipelineConfig::entries() const {
  return {
      {"normal", normal.string()},
      {"simple", simple.string()},
      {"workdir", workdir.string()},
      {"direction", std::string(direction_name(direction))},
      {"seed", std::to_string(split.seed)},
      {"train_fraction", format_double(split.train_fraction)},
      {"dev_fraction", format_double(split.dev_fraction)},
      {"test_fraction", format_double(split.test_fraction)},
      {"scrub", scrub == ScrubMode::kBible ? "bible" : "none"},
      {"unescape_brackets", bool_text(unescape_brackets)},
      {"truecase", bool_text(truecase)},
      {"min_len", std::to_string(clean.min_len)},
      {"max_len", std::to_string(clean.max_len)},
      {"align_iterations", std::to_string(align.iterations)},
      {"align_diagonal", bool_text(align.diagonal)},
      {"align_tension", format_double(align.tension)},
      {"align_optimize_tension", bool_text(align.optimize_tension)},
      {"align_tension_steps", std::to_string(align.tension_steps)},
      {"align_null_prob", format_double(align.null_prob)},
      {"align_variational_bayes", bool_text(align.variational_bayes)},
      {"align_alpha", format_double(align.alpha)},
      {"phrase_max_len", std::to_string(phrase_max_len)},
      {"lm_order", std::to_string(lm.order)},
      {"lm_discount", format_double(lm.discount)},
      {"lm_unk_threshold", std::to_string(lm.unk_threshold)},
      {"beam_size", std::to_string(decoder.beam_size)},
      {"distortion_limit", std::to_string(decoder.distortion_limit)},
      {"threshold", format_double(decoder.threshold)},
      {"oov_copy", bool_text(decoder.oov_copy)},
      {"weights", weights ? weights->str() : "auto"},
      {"grid_phrase", list_text(grid.phrase)},
      {"grid_lm", list_text(grid.lm)},
      {"grid_reorder", list_text(grid.reorder)},
      {"select_metric", std::string(metric_name(select_metric))},
      {"meteor_stages", stage_list_text(meteor.stages)},
      {"meteor_alpha", format_double(meteor.alpha)},
      {"meteor_beta", format_double(meteor.beta)},
      {"meteor_gamma", format_double(meteor.gamma)},
      {"threads", std::to_string(threads)},
  };
}

const std::vector<std::string>& PipelineConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& [key, v] : PipelineConfig{}.entries()) out.push_back(key);
    return out;
  }();
  return k;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key == "normal") normal = v;
  else if (key == "simple") simple = v;
  else if (key == "workdir") workdir = v;
  else if (key == "direction") {
    if (v == "forward") direction = Direction::kForward;
    else if (v == "reverse") direction = Direction::kReverse;
    else throw ConfigError("direction: expected forward or reverse, got '" + v + "'");
  } else if (key == "seed") split.seed = parse_count(key, v);
  else if (key == "train_fraction") split.train_fraction = parse_real(key, v);
  else if (key == "dev_fraction") split.dev_fraction = parse_real(key, v);
  else if (key == "test_fraction") split.test_fraction = parse_real(key, v);
  else if (key == "scrub") {
    if (v == "none") scrub = ScrubMode::kNone;
    else if (v == "bible") scrub = ScrubMode::kBible;
    else throw ConfigError("scrub: expected none or bible, got '" + v + "'");
  } else if (key == "unescape_brackets") unescape_brackets = parse_bool(key, v);
  else if (key == "truecase") truecase = parse_bool(key, v);
  else if (key == "min_len") clean.min_len = parse_count(key, v);
  else if (key == "max_len") clean.max_len = parse_count(key, v);
  else if (key == "align_iterations") align.iterations = static_cast<int>(parse_integer(key, v));
  else if (key == "align_diagonal") align.diagonal = parse_bool(key, v);
  else if (key == "align_tension") align.tension = parse_real(key, v);
  else if (key == "align_optimize_tension") align.optimize_tension = parse_bool(key, v);
  else if (key == "align_tension_steps") align.tension_steps = static_cast<int>(parse_integer(key, v));
  else if (key == "align_null_prob") align.null_prob = parse_real(key, v);
  else if (key == "align_variational_bayes") align.variational_bayes = parse_bool(key, v);
  else if (key == "align_alpha") align.alpha = parse_real(key, v);
  else if (key == "phrase_max_len") phrase_max_len = parse_count(key, v);
  else if (key == "lm_order") lm.order = static_cast<int>(parse_integer(key, v));
  else if (key == "lm_discount") lm.discount = parse_real(key, v);
  else if (key == "lm_unk_threshold") lm.unk_threshold = parse_count(key, v);
  else if (key == "beam_size") decoder.beam_size = parse_count(key, v);
  else if (key == "distortion_limit") decoder.distortion_limit = static_cast<int>(parse_integer(key, v));
  else if (key == "threshold") decoder.threshold = parse_real(key, v);
  else if (key == "oov_copy") decoder.oov_copy = parse_bool(key, v);
  else if (key == "weights") {
    if (v == "auto") {
      weights.reset();
    } else {
      auto w = parse_list(key, v);
      if (w.size() != 3) throw ConfigError("weights: expected auto or phrase,lm,reorder");
      weights = Weights{w[0], w[1], w[2]};
    }
  } else if (key == "grid_phrase") grid.phrase = parse_list(key, v);
  else if (key == "grid_lm") grid.lm = parse_list(key, v);
  else if (key == "grid_reorder") grid.reorder = parse_list(key, v);
  else if (key == "select_metric") select_metric = parse_metric(v);
  else if (key == "meteor_stages") {
    meteor.stages.clear();
    for (const auto& s : split_commas(v)) {
      if (s == "exact") meteor.stages.push_back(MatchStage::kExact);
      else if (s == "stem") meteor.stages.push_back(MatchStage::kStem);
      else throw ConfigError("meteor_stages: unknown stage '" + s + "' (exact, stem)");
    }
  } else if (key == "meteor_alpha") meteor.alpha = parse_real(key, v);
  else if (key == "meteor_beta") meteor.beta = parse_real(key, v);
  else if (key == "meteor_gamma") meteor.gamma = parse_real(key, v);
  else if (key == "threads") threads = static_cast<unsigned>(parse_count(key, v));
  else throw ConfigError("unknown configuration key '" + key + "'");
}

void PipelineConfig::validate() const {
  split.validate();
  if (clean.min_len > clean.max_len) throw ConfigError("min_len exceeds max_len");
  align.validate();
  if (phrase_max_len < 1) throw ConfigError("phrase_max_len must be >= 1");
  lm.validate();
  decoder.validate();
  grid.validate();
  meteor.validate();
  if (weights)
    for (double x : {weights->phrase, weights->lm, weights->reorder})
      if (!std::isfinite(x)) throw ConfigError("weights must be finite");
}

std::string PipelineConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries()) out += k + " = " + v + "\n";
  return out;
}

PipelineConfig PipelineConfig::parse(std::string_view text, const std::string& where) {
  PipelineConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(where + ":" + std::to_string(line_no) + ": expected key = value");
    try {
      cfg.set(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  return parse(read_file(path), path.string());
}

PipelineConfig PipelineConfig::from_manifest(const fs::path& manifest_path) {
  if (!fs::exists(manifest_path)) throw ConfigError("manifest not found: " + manifest_path.string());
  json j;
  try {
    j = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw ConfigError(manifest_path.string() + ": " + e.what());
  }
  if (!j.contains("config") || !j["config"].is_object())
    throw ConfigError(manifest_path.string() + ": no config section");
  PipelineConfig cfg;
  for (const auto& [k, v] : j["config"].items()) cfg.set(k, v.get<std::string>());
  return cfg;
}

// ---------------------------------------------------------------------------
// Workdir

MissingArtifactError::MissingArtifactError(const fs::path& path, const std::string& producer)
    : DataError("missing " + path.string() + "; run `simplesmt " + producer + "` first") {}

fs::path Workdir::corpus(std::string_view part, Side side) const {
  return root / "corpus" / (std::string(part) + "." + std::string(side_name(side)));
}
fs::path Workdir::truecase_model(Side side) const {
  return root / "corpus" / ("truecase." + std::string(side_name(side)));
}
fs::path Workdir::output(std::string_view part) const { return root / "out" / (std::string(part) + ".out"); }
fs::path Workdir::features(std::string_view part) const {
  return root / "out" / (std::string(part) + ".features.tsv");
}
fs::path Workdir::eval_report(std::string_view part) const {
  return root / "reports" / (std::string(part) + ".eval.json");
}
fs::path Workdir::xray(std::string_view part) const {
  return root / "reports" / (std::string(part) + ".xray.txt");
}

WorkdirLock::WorkdirLock(const fs::path& workdir) : path_(workdir / ".lock") {
  fs::create_directories(workdir);
  int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST)
      throw DataError("workdir " + workdir.string() + " is locked by another invocation (remove " +
                      path_.string() + " if it is stale)");
    throw DataError("cannot create " + path_.string() + ": " + std::strerror(errno));
  }
  std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

WorkdirLock::~WorkdirLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

// ---------------------------------------------------------------------------
// Stages

namespace {

const char* const kDeviations[] = {
    "METEOR uses exact and Porter-stem stages only; synonym and paraphrase stages are excluded",
    "alignment is trained in one direction: source side conditions target side",
    "pairs are cleaned to the length bounds before the train/dev/test split",
    "scrubbing applies to the simple-side file in every split",
    "truecasers are trained on the train split of each side and applied to all splits",
    "BLEU averages over the n-gram orders for which the candidate corpus has n-grams",
};

constexpr const char* kSplitNames[] = {"train", "dev", "test"};

std::vector<Segment> read_segments(const fs::path& path) {
  std::vector<Segment> out;
  for (const auto& line : read_lines(path)) out.push_back(Segment::from_string(line));
  return out;
}

void write_segments(const fs::path& path, const std::vector<Segment>& segs) {
  std::string text;
  for (const auto& s : segs) text += s.str() + "\n";
  write_file(path, text);
}

void require(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) throw MissingArtifactError(path, producer);
}

void check_part(std::string_view part) {
  if (part != "train" && part != "dev" && part != "test")
    throw ConfigError("split must be train, dev or test, got '" + std::string(part) + "'");
}

json digests(const Workdir& wd, const std::vector<fs::path>& files) {
  json j = json::object();
  for (const auto& f : files) j[fs::relative(f, wd.root).generic_string()] = sha256_file(f);
  return j;
}

json config_json(const PipelineConfig& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.entries())
    if (k != "workdir" && k != "threads") j[k] = v;
  return j;
}

// Records `stage` in the manifest along with the config that produced it.
void update_manifest(const PipelineConfig& cfg, const std::string& stage, json record) {
  Workdir wd{cfg.workdir};
  json m = json::object();
  if (fs::exists(wd.manifest())) {
    try {
      m = json::parse(read_file(wd.manifest()));
    } catch (const json::exception& e) {
      throw DataError(wd.manifest().string() + ": " + e.what());
    }
  }
  m["tool"] = "simplesmt";
  m["format"] = 1;
  m["config"] = config_json(cfg);
  m["direction"] = direction_name(cfg.direction);
  m["source_side"] = side_name(cfg.source_side());
  m["target_side"] = side_name(cfg.target_side());
  m["seed"] = cfg.split.seed;
  m["deviations"] = kDeviations;
  m["stages"][stage] = std::move(record);
  write_file(wd.manifest(), m.dump(2) + "\n");
}

AlignConfig align_config(const PipelineConfig& cfg) {
  AlignConfig a = cfg.align;
  a.threads = cfg.threads;
  return a;
}

DecoderConfig decoder_config(const PipelineConfig& cfg) {
  DecoderConfig d = cfg.decoder;
  d.threads = cfg.threads;
  return d;
}

PhraseTable load_table(const Workdir& wd) {
  require(wd.phrase_table(), "phrases");
  return PhraseTable::parse(read_file(wd.phrase_table()), wd.phrase_table().string());
}

NGramModel load_lm(const Workdir& wd) {
  require(wd.lm(), "lm");
  return NGramModel::read_arpa(wd.lm());
}

json weights_json(const Weights& w) { return {{"phrase", w.phrase}, {"lm", w.lm}, {"reorder", w.reorder}}; }

}  // namespace

void run_prepare(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  Workdir wd{cfg.workdir};
  auto normal_lines = read_lines(cfg.normal);
  auto simple_lines = read_lines(cfg.simple);
  if (normal_lines.size() != simple_lines.size())
    throw AlignmentError("parallel files differ in length: " + cfg.normal.string() + " has " +
                         std::to_string(normal_lines.size()) + " lines, " + cfg.simple.string() + " has " +
                         std::to_string(simple_lines.size()));

  std::size_t scrub_warnings = 0;
  ParallelCorpus all;
  for (std::size_t i = 0; i < normal_lines.size(); ++i) {
    std::string simple = simple_lines[i];
    if (cfg.scrub == ScrubMode::kBible) {
      std::vector<ScrubWarning> warnings;
      simple = scrub_simple_side(simple, &warnings);
      for (const auto& w : warnings) {
        if (scrub_warnings < 10)
          log << "warning: " << cfg.simple.string() << ":" << i + 1 << ": unbalanced '" << w.character
              << "' kept\n";
        ++scrub_warnings;
      }
    }
    SentencePair p{tokenize(normal_lines[i]), tokenize(simple)};
    if (cfg.unescape_brackets) {
      p.normal = unescape_brackets(p.normal);
      p.simple = unescape_brackets(p.simple);
    }
    all.pairs.push_back(std::move(p));
  }

  ParallelCorpus cleaned;
  for (auto& p : all.pairs)
    if (clean_pair(p, cfg.clean)) cleaned.pairs.push_back(std::move(p));
  const std::size_t dropped = all.size() - cleaned.size();
  log << "prepare: " << all.size() << " pairs read, " << dropped << " outside length bounds\n";

  CorpusSplit split = split_corpus(cleaned, cfg.split);
  std::vector<fs::path> outputs;
  json truecase = json::object();
  for (Side side : {Side::kNormal, Side::kSimple}) {
    if (cfg.truecase) {
      TruecaseModel tc = TruecaseModel::train(split.train, side);
      for (ParallelCorpus* part : {&split.train, &split.dev, &split.test})
        for (auto& p : part->pairs) p.side(side) = tc.apply(p.side(side));
      write_file(wd.truecase_model(side), tc.serialize());
      outputs.push_back(wd.truecase_model(side));
      truecase[std::string(side_name(side))] = tc.counts().size();
    }
  }
  const ParallelCorpus* parts[] = {&split.train, &split.dev, &split.test};
  json sizes = json::object();
  for (int k = 0; k < 3; ++k) {
    for (Side side : {Side::kNormal, Side::kSimple}) {
      write_side(*parts[k], side, wd.corpus(kSplitNames[k], side));
      outputs.push_back(wd.corpus(kSplitNames[k], side));
    }
    sizes[kSplitNames[k]] = parts[k]->size();
  }
  write_file(wd.split_manifest(), split.manifest_text());
  outputs.push_back(wd.split_manifest());

  json stats = json::object();
  if (!cleaned.empty()) {
    CorpusStats st = compute_stats(cleaned);
    stats = {{"pairs", st.pair_count},
             {"normal", {{"mean_tokens", st.normal.mean_tokens}, {"sd_tokens", st.normal.sd_tokens}}},
             {"simple", {{"mean_tokens", st.simple.mean_tokens}, {"sd_tokens", st.simple.sd_tokens}}},
             {"identical_pair_fraction", st.identical_pair_fraction}};
  }
  update_manifest(cfg, "prepare",
                  {{"inputs", {{"normal", sha256_file(cfg.normal)}, {"simple", sha256_file(cfg.simple)}}},
                   {"pairs_read", all.size()},
                   {"pairs_dropped", dropped},
                   {"scrub_warnings", scrub_warnings},
                   {"split", sizes},
                   {"stats", stats},
                   {"truecase_forms", truecase},
                   {"outputs", digests(wd, outputs)}});
}

void run_align(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  Workdir wd{cfg.workdir};
  const auto src_path = wd.corpus("train", cfg.source_side());
  const auto tgt_path = wd.corpus("train", cfg.target_side());
  require(src_path, "prepare");
  require(tgt_path, "prepare");
  auto src = read_segments(src_path);
  auto tgt = read_segments(tgt_path);
  const AlignConfig ac = align_config(cfg);
  AlignModel model = em_train(src, tgt, ac);
  auto links = viterbi_align_all(src, tgt, model.table, model.tension, ac);
  write_pharaoh(links, wd.alignments());
  write_file(wd.ttable(), model.table.dump());
  std::string ll;
  for (double v : model.log_likelihoods) ll += format_double(v) + "\n";
  write_file(wd.loglik(), ll);
  log << "align: " << src.size() << " pairs, final log-likelihood "
      << (model.log_likelihoods.empty() ? 0.0 : model.log_likelihoods.back()) << "\n";
  update_manifest(cfg, "align",
                  {{"source_side", side_name(cfg.source_side())},
                   {"target_side", side_name(cfg.target_side())},
                   {"tension", model.tension},
                   {"log_likelihoods", model.log_likelihoods},
                   {"outputs", digests(wd, {wd.alignments(), wd.ttable(), wd.loglik()})}});
}

void run_phrases(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  Workdir wd{cfg.workdir};
  const auto src_path = wd.corpus("train", cfg.source_side());
  const auto tgt_path = wd.corpus("train", cfg.target_side());
  require(src_path, "prepare");
  require(tgt_path, "prepare");
  require(wd.alignments(), "align");
  auto src = read_segments(src_path);
  auto tgt = read_segments(tgt_path);
  auto links = read_pharaoh(wd.alignments());
  if (links.size() != src.size())
    throw AlignmentError(wd.alignments().string() + " has " + std::to_string(links.size()) + " lines for " +
                         std::to_string(src.size()) + " pairs; rerun `simplesmt align`");
  auto counts = count_phrases(src, tgt, links, cfg.phrase_max_len, cfg.threads);
  PhraseTable table = PhraseTable::estimate(counts, cfg.phrase_max_len);
  write_file(wd.phrase_table(), table.serialize());
  log << "phrases: " << table.entry_count() << " entries over " << table.source_count() << " source phrases\n";
  update_manifest(cfg, "phrases",
                  {{"entries", table.entry_count()},
                   {"source_phrases", table.source_count()},
                   {"max_len", cfg.phrase_max_len},
                   {"outputs", digests(wd, {wd.phrase_table()})}});
}

void run_lm(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  Workdir wd{cfg.workdir};
  const auto tgt_path = wd.corpus("train", cfg.target_side());
  require(tgt_path, "prepare");
  NGramModel lm = NGramModel::train(read_segments(tgt_path), cfg.lm);
  lm.write_arpa(wd.lm());
  std::vector<std::size_t> counts;
  for (int k = 1; k <= lm.order(); ++k) counts.push_back(lm.ngram_count(k));
  log << "lm: order " << lm.order() << ", " << lm.vocab().size() << " vocabulary entries\n";
  update_manifest(cfg, "lm",
                  {{"side", side_name(cfg.target_side())},
                   {"order", lm.order()},
                   {"vocab_size", lm.vocab().size()},
                   {"ngram_counts", counts},
                   {"outputs", digests(wd, {wd.lm()})}});
}

std::pair<Weights, std::string> resolve_weights(const PipelineConfig& cfg) {
  if (cfg.weights) return {*cfg.weights, "config"};
  Workdir wd{cfg.workdir};
  if (fs::exists(wd.sweep_report())) {
    try {
      json j = json::parse(read_file(wd.sweep_report()));
      const auto& b = j.at("best");
      return {Weights{b.at("phrase").get<double>(), b.at("lm").get<double>(), b.at("reorder").get<double>()},
              "sweep"};
    } catch (const json::exception& e) {
      throw DataError(wd.sweep_report().string() + ": " + e.what());
    }
  }
  return {Weights{}, "default"};
}

void run_decode(const PipelineConfig& cfg, std::string_view part, std::ostream& log) {
  cfg.validate();
  check_part(part);
  Workdir wd{cfg.workdir};
  const auto src_path = wd.corpus(part, cfg.source_side());
  require(src_path, "prepare");
  PhraseTable table = load_table(wd);
  NGramModel lm = load_lm(wd);
  auto [weights, source] = resolve_weights(cfg);
  auto results = decode_all(read_segments(src_path), table, lm, weights, decoder_config(cfg));
  std::vector<Segment> outputs;
  for (const auto& r : results) outputs.push_back(r.translation);
  write_segments(wd.output(part), outputs);
  write_file(wd.features(part), feature_lines(results));
  log << "decode: " << results.size() << " " << part << " segments with weights " << weights.str() << " ("
      << source << ")\n";
  update_manifest(cfg, "decode_" + std::string(part),
                  {{"weights", weights_json(weights)},
                   {"weights_source", source},
                   {"segments", results.size()},
                   {"outputs", digests(wd, {wd.output(part), wd.features(part)})}});
}

void run_eval(const PipelineConfig& cfg, std::string_view part, std::ostream& log) {
  cfg.validate();
  check_part(part);
  Workdir wd{cfg.workdir};
  const auto src_path = wd.corpus(part, cfg.source_side());
  const auto ref_path = wd.corpus(part, cfg.target_side());
  require(src_path, "prepare");
  require(ref_path, "prepare");
  require(wd.output(part), "decode");
  auto sources = read_segments(src_path);
  auto refs = read_segments(ref_path);
  auto outputs = read_segments(wd.output(part));
  TestReport rep = evaluate_outputs(sources, refs, outputs, cfg.meteor);
  rep.weights = resolve_weights(cfg).first;
  write_file(wd.eval_report(part),
             test_report_json(rep, std::string(side_name(cfg.target_side())), std::string(side_name(cfg.source_side()))));
  write_file(wd.xray(part), xray_text(outputs, refs, rep.system.meteor));
  log << "eval: " << part << " system METEOR " << rep.system.meteor.pooled.score << " BLEU " << rep.system.bleu.score
      << "; original METEOR " << rep.original.meteor.pooled.score << " BLEU " << rep.original.bleu.score << "\n";
  update_manifest(cfg, "eval_" + std::string(part),
                  {{"system", {{"meteor", rep.system.meteor.pooled.score}, {"bleu", rep.system.bleu.score}}},
                   {"original", {{"meteor", rep.original.meteor.pooled.score}, {"bleu", rep.original.bleu.score}}},
                   {"outputs", digests(wd, {wd.eval_report(part), wd.xray(part)})}});
}

void run_sweep_stage(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  Workdir wd{cfg.workdir};
  const auto src_path = wd.corpus("dev", cfg.source_side());
  const auto ref_path = wd.corpus("dev", cfg.target_side());
  require(src_path, "prepare");
  require(ref_path, "prepare");
  PhraseTable table = load_table(wd);
  NGramModel lm = load_lm(wd);
  SweepResult result =
      run_sweep(read_segments(src_path), read_segments(ref_path), table, lm, cfg.grid, decoder_config(cfg), cfg.meteor);
  std::vector<ComponentEffect> effects;
  for (Component c : {Component::kPhrase, Component::kLm, Component::kReorder})
    effects.push_back(average_out(result, c));
  write_file(wd.sweep_report(), sweep_json(result, cfg.select_metric));
  write_file(wd.effects(), effects_csv(effects));
  Weights best = select_best(result, cfg.select_metric);
  log << "sweep: " << result.scores.size() << " grid points, best " << best.str() << " by "
      << metric_name(cfg.select_metric) << "\n";
  update_manifest(cfg, "sweep",
                  {{"runs", result.scores.size()},
                   {"best", weights_json(best)},
                   {"metric", metric_name(cfg.select_metric)},
                   {"outputs", digests(wd, {wd.sweep_report(), wd.effects()})}});
}

void run_report(const PipelineConfig& cfg, std::ostream& log) {
  run_decode(cfg, "test", log);
  run_eval(cfg, "test", log);
  Workdir wd{cfg.workdir};
  auto [weights, source] = resolve_weights(cfg);
  json j;
  j["weights"] = weights_json(weights);
  j["weights_source"] = source;
  j["direction"] = direction_name(cfg.direction);
  j["test"] = json::parse(read_file(wd.eval_report("test")));
  if (fs::exists(wd.sweep_report())) {
    json s = json::parse(read_file(wd.sweep_report()));
    j["sweep"] = {{"best", s["best"]}, {"selection_metric", s["selection_metric"]}, {"run_count", s["run_count"]},
                  {"scores", s["scores"]}};
  } else {
    j["sweep"] = nullptr;
  }
  write_file(wd.report(), j.dump(2) + "\n");
  update_manifest(cfg, "report", {{"outputs", digests(wd, {wd.report()})}});
}

}  // namespace simplesmt
