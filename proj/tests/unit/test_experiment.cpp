#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "simplesmt/error.hpp"
#include "simplesmt/experiment.hpp"

using namespace simplesmt;

namespace {

SweepResult constructed(const std::vector<double>& meteor) {
  SweepResult r;
  auto pts = r.grid.points();
  for (std::size_t k = 0; k < pts.size(); ++k) r.scores[pts[k]] = {meteor[k], 1 - meteor[k]};
  return r;
}

PhraseTable identity_table(const std::vector<Segment>& segs) {
  PhraseTable t;
  std::set<std::string> seen;
  for (const auto& s : segs)
    for (const auto& w : s.tokens)
      if (seen.insert(w).second) t.add(w, {w, {w}, 0.0, 0.0});
  t.finalize();
  return t;
}

std::vector<Segment> segs(std::initializer_list<const char*> lines) {
  std::vector<Segment> out;
  for (const char* l : lines) out.push_back(Segment::from_string(l));
  return out;
}

}  // namespace

TEST_CASE("default grid has eight points in ascending order") {
  SweepGrid g;
  auto pts = g.points();
  REQUIRE(pts.size() == 8);
  CHECK(g.size() == 8);
  CHECK(pts.front() == Weights{0.2, 0.5, 0.3});
  CHECK(pts.back() == Weights{1, 1, 1});
  CHECK(std::is_sorted(pts.begin(), pts.end()));
  SweepGrid dup;
  dup.phrase = {1, 0.2, 1};
  CHECK(dup.points().size() == 8);
  SweepGrid empty;
  empty.lm.clear();
  CHECK_THROWS_AS(empty.validate(), ConfigError);
}

TEST_CASE("average_out means") {
  // Points are ordered with phrase = 0.2 first.
  auto r = constructed({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8});
  auto e = average_out(r, Component::kPhrase);
  REQUIRE(e.rows.size() == 2);
  CHECK(e.rows[0].weight == 0.2);
  CHECK(e.rows[0].count == 4);
  CHECK(e.rows[0].mean.meteor == doctest::Approx(0.25));
  CHECK(e.rows[1].mean.meteor == doctest::Approx(0.65));
  CHECK(e.rows[0].mean.bleu == doctest::Approx(0.75));

  auto flat = constructed(std::vector<double>(8, 0.42));
  for (auto c : {Component::kPhrase, Component::kLm, Component::kReorder})
    for (const auto& row : average_out(flat, c).rows) CHECK(row.mean.meteor == doctest::Approx(0.42));
}

TEST_CASE("average_out reconstructs the grand mean") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> v(8);
  for (auto& x : v) x = u(rng);
  auto r = constructed(v);
  double grand = 0;
  for (double x : v) grand += x / 8;
  for (auto c : {Component::kPhrase, Component::kLm, Component::kReorder}) {
    double acc = 0;
    for (const auto& row : average_out(r, c).rows) acc += row.mean.meteor * double(row.count) / 8;
    CHECK(acc == doctest::Approx(grand));
  }
}

TEST_CASE("average_out on an incomplete grid lists the missing points") {
  auto r = constructed({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8});
  r.scores.erase(Weights{1, 0.5, 0.3});
  try {
    average_out(r, Component::kLm);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("1,0.5,0.3") != std::string::npos);
  }
}

TEST_CASE("select_best") {
  auto r = constructed({0.1, 0.9, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8});
  CHECK(select_best(r) == Weights{0.2, 0.5, 1});
  // BLEU is 1 - METEOR here, so the lowest METEOR wins.
  CHECK(select_best(r, Metric::kBleu) == Weights{0.2, 0.5, 0.3});

  auto tied = constructed({0.1, 0.2, 0.3, 0.9, 0.5, 0.6, 0.7, 0.9});
  CHECK(select_best(tied) == Weights{0.2, 1, 1});

  SweepResult single;
  single.grid = {{1}, {1}, {1}};
  single.scores[{1, 1, 1}] = {0.3, 0.3};
  CHECK(select_best(single) == Weights{1, 1, 1});
}

TEST_CASE("select_best is invariant under positive affine maps") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(8);
    for (auto& x : v) x = std::round(u(rng) * 4) / 4;  // coarse values force ties
    auto r = constructed(v);
    auto mapped = r;
    for (auto& [w, m] : mapped.scores) m.meteor = 3 * m.meteor + 0.125;
    CHECK(select_best(r) == select_best(mapped));
  }
}

TEST_CASE("sweep on a tiny corpus runs every grid point") {
  auto src = segs({"the king went", "the king"});
  auto lm = NGramModel::train(src, LMConfig{});
  auto table = identity_table(src);
  auto r = run_sweep(src, src, table, lm, SweepGrid{}, DecoderConfig{});
  CHECK(r.scores.size() == 8);
  for (const auto& [w, m] : r.scores) {
    CHECK(m.bleu == doctest::Approx(1.0));
    CHECK(m.meteor > 0.9);
  }
  auto again = run_sweep(src, src, table, lm, SweepGrid{}, DecoderConfig{});
  CHECK(again.scores == r.scores);
  CHECK(again.corpus_id == r.corpus_id);
  CHECK(sweep_json(again, Metric::kMeteor) == sweep_json(r, Metric::kMeteor));

  SweepGrid one{{1}, {1}, {1}};
  CHECK(run_sweep(src, src, table, lm, one, DecoderConfig{}).scores.size() == 1);
}

TEST_CASE("identity models reproduce the Original baseline") {
  auto src = segs({"thou art the king", "he went unto the city"});
  auto ref = segs({"you are the king", "he went to the city"});
  auto table = identity_table(src);
  auto lm = NGramModel::train(ref, LMConfig{});
  auto rep = evaluate_test(src, ref, table, lm, {1, 0, 1}, DecoderConfig{});
  CHECK(rep.system.bleu.score == rep.original.bleu.score);
  CHECK(rep.system.meteor.pooled.score == rep.original.meteor.pooled.score);
  CHECK(rep.original.bleu.score == bleu_corpus(src, ref).score);
  auto j = test_report_json(rep, "simple", "normal");
  CHECK(j.find("\"original\"") != std::string::npos);
  CHECK(j.find("\"edit_distance\"") != std::string::npos);
}

TEST_CASE("Original baseline BLEU is one when both sides agree") {
  auto both = segs({"a b c", "d e"});
  auto rep = evaluate_outputs(both, both, both);
  CHECK(rep.original.bleu.score == doctest::Approx(1.0));
  CHECK(rep.decoded.empty());
}

TEST_CASE("edit distance histogram") {
  auto h = edit_distance_histogram(segs({"a b", "a", "x y z"}), segs({"a b", "b", "a"}));
  CHECK(h.distances == std::vector<std::size_t>{0, 1, 3});
  CHECK(h.counts == std::vector<std::size_t>{1, 1, 0, 1});
  CHECK(h.mean == doctest::Approx(4.0 / 3));
  CHECK(h.median == 1);
}

TEST_CASE("effects table layout") {
  auto r = constructed({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8});
  auto csv = effects_csv({average_out(r, Component::kPhrase)});
  CHECK(csv.rfind("component,weight,mean_meteor,mean_bleu\n", 0) == 0);
  CHECK(csv.find("phrase,0.2,0.25,") != std::string::npos);
}

TEST_CASE("component and metric names") {
  CHECK(parse_component(component_name(Component::kReorder)) == Component::kReorder);
  CHECK(parse_metric("bleu") == Metric::kBleu);
  CHECK_THROWS_AS(parse_metric("ter"), ConfigError);
}
