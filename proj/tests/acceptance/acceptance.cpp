// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.
//
// usage: acceptance <simplesmt-binary> <toy-data-dir>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "../support/oracles.hpp"
#include "simplesmt/align.hpp"
#include "simplesmt/eval.hpp"
#include "simplesmt/experiment.hpp"
#include "simplesmt/pipeline.hpp"

using namespace simplesmt;
using nlohmann::json;

namespace {

fs::path g_cli;
fs::path g_data;
fs::path g_tmp;

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

int g_failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Check()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) {
    c.ok = false;
    if (c.detail.empty()) c.detail = "too slow";
  }
  if (!c.ok) ++g_failures;
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(2);
  line << (c.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " [" << secs << " s";
  if (limit_s > 0) line << " < " << limit_s << " s";
  line << "]";
  if (!c.detail.empty()) line << " -- " << c.detail;
  std::cout << line.str() << std::endl;
}

std::vector<Segment> random_corpus(std::mt19937_64& rng, std::size_t pairs, std::size_t vocab, std::size_t max_len,
                                   const std::string& prefix) {
  std::uniform_int_distribution<std::size_t> len(1, max_len), w(0, vocab - 1);
  std::vector<Segment> out;
  for (std::size_t k = 0; k < pairs; ++k) {
    Segment s;
    std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) s.tokens.push_back(prefix + std::to_string(w(rng)));
    out.push_back(s);
  }
  return out;
}

int run_cli(const std::string& args, const fs::path& log) {
  std::string cmd = "\"" + g_cli.string() + "\" " + args + " >>\"" + log.string() + "\" 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Maps relative path -> content for every file under root.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  return out;
}

// ---------------------------------------------------------------------------

Check alignment_em() {
  Check c;
  std::mt19937_64 rng(11);
  for (int corpus = 0; corpus < 6; ++corpus) {
    auto src = random_corpus(rng, 30, 6 + corpus, 7, "f");
    auto tgt = random_corpus(rng, 30, 5 + corpus, 7, "e");
    for (bool vb : {false, true}) {
      AlignConfig cfg;
      cfg.iterations = 5;
      cfg.variational_bayes = vb;
      cfg.optimize_tension = vb;  // plain EM keeps the tension fixed
      double worst = 0;
      auto model = em_train(src, tgt, cfg, [&](int, const AlignModel& m) {
        for (const auto& row : m.table.rows()) {
          if (row.empty()) continue;
          double s = 0;
          for (const auto& [e, p] : row) s += p;
          worst = std::max(worst, std::fabs(s - 1));
        }
      });
      c.expect(worst <= 1e-9, "row sum off by " + std::to_string(worst));
      if (!vb) {
        const auto& ll = model.log_likelihoods;
        c.expect(ll.size() == 5, "expected 5 log-likelihood values");
        for (std::size_t i = 1; i < ll.size(); ++i)
          c.expect(ll[i] >= ll[i - 1] - 1e-9, "log-likelihood decreased at iteration " + std::to_string(i + 1));
      }
    }
  }
  if (c.ok) c.detail = "6 corpora, plain EM and VB";
  return c;
}

Check alignment_accuracy() {
  Check c;
  std::mt19937_64 rng(5);
  const std::size_t lexicon = 12;
  std::vector<Segment> src, tgt;
  for (int k = 0; k < 20; ++k) {
    std::vector<std::size_t> words(lexicon);
    std::iota(words.begin(), words.end(), 0);
    std::shuffle(words.begin(), words.end(), rng);
    std::size_t n = std::uniform_int_distribution<std::size_t>(3, 6)(rng);
    Segment s, t;
    for (std::size_t i = 0; i < n; ++i) {
      s.tokens.push_back("src" + std::to_string(words[i]));
      t.tokens.push_back("tgt" + std::to_string(words[i]));
    }
    src.push_back(s);
    tgt.push_back(t);
  }
  AlignConfig cfg;  // p0 = 0.08, lambda0 = 4, 5 iterations
  auto model = em_train(src, tgt, cfg);
  auto links = viterbi_align_all(src, tgt, model.table, model.tension, cfg);
  std::size_t correct = 0, total = 0;
  for (std::size_t k = 0; k < src.size(); ++k)
    for (auto [i, j] : links[k].links) {
      ++total;
      if (src[k][i].substr(3) == tgt[k][j].substr(3)) ++correct;
    }
  double precision = total ? static_cast<double>(correct) / static_cast<double>(total) : 0;
  c.expect(precision >= 0.9, "precision " + std::to_string(precision));
  c.detail = "precision " + std::to_string(precision) + " over " + std::to_string(total) + " links";
  return c;
}

Check phrase_extraction() {
  Check c;
  std::mt19937_64 rng(3);
  const std::size_t lens[] = {2, 3, 7};
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (int k = 0; k < 500; ++k) {
    std::size_t n = dim(rng), m = dim(rng), max_len = lens[k % 3];
    auto links = oracle::random_links(rng, n, m);
    auto got = extract_phrases(n, m, links, max_len);
    auto want = oracle::phrases(n, m, links, max_len);
    c.expect(got == want, "mismatch on instance " + std::to_string(k));
  }
  if (c.ok) c.detail = "500 instances";
  return c;
}

Check language_model() {
  Check c;
  std::mt19937_64 rng(17);
  // Normalization on a closed 6-word vocabulary.
  auto corpus = random_corpus(rng, 25, 6, 6, "w");
  std::size_t contexts = 0;
  for (int order = 1; order <= 3; ++order) {
    LMConfig cfg;
    cfg.order = order;
    auto lm = NGramModel::train(corpus, cfg);
    std::vector<WordId> history_words, next_words;
    for (WordId id = 0; id < lm.vocab().size(); ++id) {
      if (id != NGramModel::kEosId && id != NGramModel::kUnkId) history_words.push_back(id);
      if (id != NGramModel::kBosId) next_words.push_back(id);
    }
    std::vector<std::vector<WordId>> ctxs{{}};
    for (int k = 0; k < order - 1; ++k) {
      std::vector<std::vector<WordId>> next;
      for (const auto& h : ctxs)
        for (WordId w : history_words) {
          auto g = h;
          g.push_back(w);
          next.push_back(g);
        }
      ctxs = next;
    }
    for (const auto& h : ctxs) {
      double s = 0;
      for (WordId w : next_words) s += std::exp(lm.log_prob(h, w));
      c.expect(std::fabs(s - 1) <= 1e-6, "order " + std::to_string(order) + " context sums to " + std::to_string(s));
      ++contexts;
    }
  }

  // ARPA round trip.
  LMConfig cfg;
  cfg.order = 3;
  auto lm = NGramModel::train(corpus, cfg);
  auto back = NGramModel::from_arpa(lm.to_arpa());
  auto probes = random_corpus(rng, 100, 8, 9, "w");  // w6, w7 are unknown
  double drift = 0;
  for (const auto& s : probes) drift = std::max(drift, std::fabs(lm.score_sequence(s) - back.score_sequence(s)));
  c.expect(drift <= 1e-9, "ARPA round-trip drift " + std::to_string(drift));

  // Interpolated KN bigram on: "a b", "a c", "b a b".
  std::vector<Segment> toy{Segment::from_string("a b"), Segment::from_string("a c"), Segment::from_string("b a b")};
  LMConfig bigram;
  bigram.order = 2;
  auto kn = NGramModel::train(toy, bigram);
  // p(b|a) = (c(a b) - D)/c(a .) + D * N1+(a .)/c(a .) * p_cont(b)
  // p_cont(b) = (N1+(. b) - D)/N1+(. .) + D * |types|/N1+(. .) / |V|, |V| = {a, b, c, </s>, <unk>}
  const double D = 0.75;
  const double p_cont_b = (2 - D) / 7 + D * 4 / 7 / 5;
  const double hand = (2 - D) / 3 + D * 2 / 3 * p_cont_b;
  double got = std::exp(kn.log_prob({kn.index("a")}, kn.index("b")));
  c.expect(std::fabs(got - hand) <= 1e-9, "KN p(b|a) = " + std::to_string(got) + ", hand " + std::to_string(hand));
  if (c.ok)
    c.detail = std::to_string(contexts) + " contexts normalized, drift " + std::to_string(drift) +
               ", p(b|a) = " + std::to_string(got);
  return c;
}

Check decoder_oracle() {
  Check c;
  std::mt19937_64 rng(23);
  DecoderConfig exhaustive;
  exhaustive.beam_size = 1000000;
  exhaustive.distortion_limit = DecoderConfig::kUnlimited;
  std::size_t monotone_violations = 0;
  std::string first_violation;
  std::size_t oracle_mismatches = 0;
  for (int k = 0; k < 200; ++k) {
    auto inst = oracle::random_decode_instance(rng);
    auto lm = oracle::random_target_lm(rng, 2 + k % 2);
    auto res = decode(inst.source, inst.table, lm, inst.weights, exhaustive);
    double want = oracle::best_derivation_score(inst.source, inst.table, lm, inst.weights);
    if (std::fabs(res.score - want) > 1e-9) ++oracle_mismatches;
    c.expect(std::fabs(res.score - want) <= 1e-9,
             "instance " + std::to_string(k) + ": decoder " + std::to_string(res.score) + " vs oracle " +
                 std::to_string(want));
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t beam : {1, 2, 3, 5, 10, 100, 1000000}) {
      DecoderConfig cfg = exhaustive;
      cfg.beam_size = beam;
      double s = decode(inst.source, inst.table, lm, inst.weights, cfg).score;
      if (s < prev - 1e-12 && monotone_violations++ == 0)
        first_violation = "instance " + std::to_string(k) + ", beam " + std::to_string(beam) + " scores " +
                          std::to_string(s) + " below a smaller beam's " + std::to_string(prev);
      prev = s;
    }
  }
  c.expect(monotone_violations == 0, std::to_string(monotone_violations) + " beam-monotonicity violation(s): " + first_violation);

  // Identity configuration.
  PhraseTable identity;
  for (const char* w : {"the", "lord", "said", "to", "cain"}) identity.add(w, {w, {w}, 0.0, 0.0});
  identity.finalize();
  auto flat = NGramModel::train({Segment::from_string("the lord said to cain")}, LMConfig{});
  auto src = Segment::from_string("cain said to the lord the");
  auto res = decode(src, identity, flat, Weights{1, 0, 1});
  c.expect(res.translation == src, "identity configuration changed the input");
  c.expect(res.features.reorder == 0, "identity configuration reordered");
  c.detail += (c.detail.empty() ? "" : "; ") + std::string("oracle score equality on ") +
              std::to_string(200 - oracle_mismatches) + "/200 instances, beams 1..1e6 compared";
  return c;
}

Check metrics() {
  Check c;
  auto p1 = bleu_corpus({Segment::from_string("the the the the the the the")},
                        {Segment::from_string("the cat is on the mat")})
                .precisions[0];
  c.expect(std::fabs(p1 - 2.0 / 7) <= 1e-9, "p1 = " + std::to_string(p1));

  std::mt19937_64 rng(29);
  auto xs = random_corpus(rng, 50, 5, 12, "t");
  for (const auto& x : xs) c.expect(std::fabs(bleu_corpus({x}, {x}).score - 1) <= 1e-12, "BLEU(x,x) != 1");
  c.expect(std::fabs(bleu_corpus(xs, xs).score - 1) <= 1e-12, "corpus BLEU(x,x) != 1");

  MatchStageConfig mc;
  auto five = Segment::from_string("and the lord spake unto");
  double m = meteor_sentence(five, five, mc).score;
  c.expect(std::fabs(m - 0.996) <= 1e-6, "METEOR identical = " + std::to_string(m));

  auto chars = [](const std::string& s) {
    Segment seg;
    for (char ch : s) seg.tokens.emplace_back(1, ch);
    return seg;
  };
  c.expect(token_edit_distance(chars("kitten"), chars("sitting")) == 3, "kitten/sitting != 3");

  auto triples = random_corpus(rng, 3000, 3, 6, "v");
  for (std::size_t k = 0; k + 2 < triples.size(); k += 3) {
    const auto &a = triples[k], &b = triples[k + 1], &d = triples[k + 2];
    auto ab = token_edit_distance(a, b), ba = token_edit_distance(b, a);
    c.expect(ab == ba, "asymmetric distance");
    c.expect((ab == 0) == (a == b), "identity of indiscernibles violated");
    c.expect(token_edit_distance(a, d) <= ab + token_edit_distance(b, d), "triangle inequality violated");
  }
  if (c.ok) c.detail = "METEOR " + std::to_string(m);
  return c;
}

ParallelCorpus toy_pairs(std::size_t limit) {
  auto corpus = load_parallel(g_data / "normal.txt", g_data / "simple.txt");
  ParallelCorpus out;
  for (std::size_t i = 0; i < std::min(limit, corpus.size()); ++i)
    out.pairs.push_back({tokenize(corpus.pairs[i].normal.str()), tokenize(corpus.pairs[i].simple.str())});
  return out;
}

Check sweep_harness() {
  Check c;
  auto corpus = toy_pairs(240);
  std::vector<Segment> train_src, train_tgt, dev_src, dev_tgt;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (i < 200 ? train_src : dev_src).push_back(corpus.pairs[i].normal);
    (i < 200 ? train_tgt : dev_tgt).push_back(corpus.pairs[i].simple);
  }
  AlignConfig ac;
  auto model = em_train(train_src, train_tgt, ac);
  auto links = viterbi_align_all(train_src, train_tgt, model.table, model.tension, ac);
  auto table = PhraseTable::estimate(count_phrases(train_src, train_tgt, links, 7));
  LMConfig lc;
  lc.order = 3;
  auto lm = NGramModel::train(train_tgt, lc);

  SweepGrid grid;  // {0.2,1} x {0.5,1} x {0.3,1}
  auto result = run_sweep(dev_src, dev_tgt, table, lm, grid, DecoderConfig{});
  c.expect(result.scores.size() == 8, "expected 8 runs, got " + std::to_string(result.scores.size()));
  for (const auto& [w, s] : result.scores)
    c.expect(s.meteor >= 0 && s.meteor <= 1 && s.bleu >= 0 && s.bleu <= 1, "score outside [0,1]");

  for (Metric metric : {Metric::kMeteor, Metric::kBleu}) {
    double grand = 0;
    for (const auto& [w, s] : result.scores) grand += s.get(metric);
    grand /= static_cast<double>(result.scores.size());
    for (Component comp : {Component::kPhrase, Component::kLm, Component::kReorder}) {
      auto eff = average_out(result, comp);
      double re = 0;
      std::size_t n = 0;
      for (const auto& row : eff.rows) {
        c.expect(row.count == 4, "mean over " + std::to_string(row.count) + " entries");
        re += row.mean.get(metric) * static_cast<double>(row.count);
        n += row.count;
      }
      c.expect(std::fabs(re / static_cast<double>(n) - grand) <= 1e-12, "means do not reconstruct the grand mean");
    }
  }

  // Constructed ties: two METEOR maxima and two BLEU maxima.
  SweepResult tied = result;
  for (auto& [w, s] : tied.scores) s = {0.5, 0.1};
  tied.scores[{1, 1, 1}] = {0.9, 0.3};
  tied.scores[{0.2, 1, 0.3}] = {0.9, 0.1};
  tied.scores[{0.2, 1, 1}] = {0.5, 0.3};
  c.expect(select_best(tied) == Weights{0.2, 1, 0.3}, "METEOR tie not broken toward the smallest weights");
  c.expect(select_best(tied, Metric::kBleu) == Weights{0.2, 1, 1}, "BLEU tie not broken toward the smallest weights");
  SweepResult rebuilt;
  rebuilt.grid = tied.grid;
  for (auto it = tied.scores.rbegin(); it != tied.scores.rend(); ++it) rebuilt.scores.insert(*it);
  c.expect(select_best(rebuilt) == select_best(tied), "selection depends on insertion order");
  if (c.ok) c.detail = "8 runs, best " + select_best(result).str();
  return c;
}

Check end_to_end() {
  Check c;
  const fs::path root = g_tmp / "e2e";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path log = root / "log.txt";
  const std::string inputs = "--normal \"" + (g_data / "normal.txt").string() + "\" --simple \"" +
                             (g_data / "simple.txt").string() + "\" --scrub bible";
  const char* stages[] = {"prepare", "align", "phrases", "lm", "sweep", "report"};

  auto t0 = std::chrono::steady_clock::now();
  for (const char* st : stages) {
    int rc = run_cli(std::string(st) + " " + inputs + " --workdir \"" + (root / "a").string() + "\"", log);
    c.expect(rc == 0, std::string(st) + " exited with " + std::to_string(rc));
    if (!c.ok) return c;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < 120, "first run took " + std::to_string(secs) + " s");

  const fs::path manifest = root / "a" / "manifest.json";
  for (const char* st : stages) {
    int rc = run_cli(std::string(st) + " --manifest \"" + manifest.string() + "\" --workdir \"" +
                         (root / "b").string() + "\"",
                     log);
    c.expect(rc == 0, std::string("rerun of ") + st + " exited with " + std::to_string(rc));
    if (!c.ok) return c;
  }
  auto a = snapshot(root / "a"), b = snapshot(root / "b");
  c.expect(a == b, "second run from the manifest is not byte-identical");

  json rep = json::parse(a.at("reports/report.json"));
  const auto& test = rep.at("test");
  for (const char* who : {"system", "original"}) {
    for (const char* metric : {"bleu", "meteor"}) {
      double s = test.at(who).at(metric).at("score").get<double>();
      c.expect(s >= 0 && s <= 1, std::string(who) + " " + metric + " outside [0,1]");
    }
  }
  for (const char* q : {"min", "q1", "median", "q3", "max"})
    c.expect(test.at("length_ratio").at("system").contains(q), std::string("missing length quartile ") + q);
  c.expect(!test.at("edit_distance").at("system").at("histogram").empty(), "missing system edit histogram");
  c.expect(!test.at("edit_distance").at("reference").at("histogram").empty(), "missing reference edit histogram");
  json sweep = json::parse(a.at("reports/sweep.json"));
  c.expect(sweep.at("run_count").get<int>() == 8, "sweep report does not have 8 entries");
  if (c.ok) {
    std::ostringstream d;
    d.precision(4);
    d << "first run " << secs << " s; system METEOR " << test["system"]["meteor"]["score"].get<double>()
      << " BLEU " << test["system"]["bleu"]["score"].get<double>() << ", original METEOR "
      << test["original"]["meteor"]["score"].get<double>() << " BLEU "
      << test["original"]["bleu"]["score"].get<double>();
    c.detail = d.str();
  }
  return c;
}

std::set<std::string> arpa_vocab(const fs::path& arpa) {
  std::set<std::string> v;
  std::istringstream in(read_file(arpa));
  std::string line;
  bool unigrams = false;
  while (std::getline(in, line)) {
    if (line == "\\1-grams:") {
      unigrams = true;
      continue;
    }
    if (unigrams && (line.empty() || line[0] == '\\')) break;
    if (unigrams) v.insert(split_whitespace(line).at(1));
  }
  return v;
}

Check reverse_direction_check() {
  Check c;
  const fs::path root = g_tmp / "reverse";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path log = root / "log.txt";

  PipelineConfig fwd;
  fwd.normal = g_data / "normal.txt";
  fwd.simple = g_data / "simple.txt";
  fwd.workdir = root / "fwd";
  fwd.lm.order = 3;
  write_file(root / "forward.cfg", fwd.serialize());
  c.expect(run_cli("reverse --config \"" + (root / "forward.cfg").string() + "\" -o \"" +
                       (root / "reversed.cfg").string() + "\"",
                   log) == 0,
           "reverse failed");
  c.expect(run_cli("reverse --config \"" + (root / "reversed.cfg").string() + "\" -o \"" +
                       (root / "twice.cfg").string() + "\"",
                   log) == 0,
           "second reverse failed");
  if (!c.ok) return c;
  c.expect(read_file(root / "twice.cfg") == read_file(root / "forward.cfg"), "reverse twice changed the config");

  auto run = [&](const std::string& cfg, const std::string& wd) {
    for (const char* st : {"prepare", "lm"})
      c.expect(run_cli(std::string(st) + " --config \"" + (root / cfg).string() + "\" --workdir \"" +
                           (root / wd).string() + "\"",
                       log) == 0,
               std::string(st) + " failed for " + cfg);
  };
  run("forward.cfg", "fwd");
  run("twice.cfg", "twice");
  run("reversed.cfg", "rev");
  if (!c.ok) return c;
  c.expect(read_file(root / "fwd" / "manifest.json") == read_file(root / "twice" / "manifest.json"),
           "reverse(reverse) manifest differs from the forward manifest");

  json mf = json::parse(read_file(root / "fwd" / "manifest.json"));
  json mr = json::parse(read_file(root / "rev" / "manifest.json"));
  c.expect(mf["stages"]["lm"]["side"] == "simple", "forward LM not on the simple side");
  c.expect(mr["stages"]["lm"]["side"] == "normal", "reversed LM not on the normal side");
  c.expect(mr["direction"] == "reverse", "manifest does not record the reversed direction");

  auto side_vocab = [&](const fs::path& file) {
    std::set<std::string> v{NGramModel::kBos, NGramModel::kEos, NGramModel::kUnk};
    for (const auto& line : read_lines(file))
      for (auto& t : split_whitespace(line)) v.insert(t);
    return v;
  };
  auto rev_vocab = arpa_vocab(root / "rev" / "model" / "lm.arpa");
  auto fwd_vocab = arpa_vocab(root / "fwd" / "model" / "lm.arpa");
  c.expect(rev_vocab == side_vocab(root / "rev" / "corpus" / "train.normal"),
           "reversed ARPA vocabulary is not the normal-side training vocabulary");
  c.expect(fwd_vocab == side_vocab(root / "fwd" / "corpus" / "train.simple"),
           "forward ARPA vocabulary is not the simple-side training vocabulary");
  c.expect(rev_vocab.count("unto") && !fwd_vocab.count("unto"), "archaic word placement unexpected");
  if (c.ok)
    c.detail = "forward LM " + std::to_string(fwd_vocab.size()) + " types, reversed LM " +
               std::to_string(rev_vocab.size()) + " types";
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <simplesmt-binary> <toy-data-dir>\n";
    return 2;
  }
  g_cli = fs::absolute(argv[1]);
  g_data = fs::absolute(argv[2]);
  g_tmp = fs::temp_directory_path() / ("simplesmt-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(g_tmp);

  criterion(1, "alignment EM log-likelihood monotone, rows normalized", 5, alignment_em);
  criterion(2, "dictionary corpus Viterbi precision >= 0.9", 5, alignment_accuracy);
  criterion(3, "phrase extraction equals brute-force consistency oracle", 10, phrase_extraction);
  criterion(4, "LM normalization, ARPA round trip, hand KN bigram", 0, language_model);
  criterion(5, "decoder matches exhaustive enumeration; identity; beam monotonicity", 0, decoder_oracle);
  criterion(6, "BLEU, METEOR and edit-distance reference values and axioms", 0, metrics);
  criterion(7, "sweep grid of 8 runs, marginal means, deterministic selection", 0, sweep_harness);
  criterion(8, "end-to-end pipeline on the toy corpus, reproducible from manifest", 0, end_to_end);
  criterion(9, "reverse direction is an involution and moves the LM side", 0, reverse_direction_check);

  std::error_code ec;
  fs::remove_all(g_tmp, ec);
  std::cout << (g_failures ? "FAILED: " + std::to_string(g_failures) + " criteria" : std::string("ALL CRITERIA PASS"))
            << std::endl;
  return g_failures ? 1 : 0;
}
