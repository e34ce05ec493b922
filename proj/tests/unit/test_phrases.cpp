#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "simplesmt/error.hpp"
#include "simplesmt/phrases.hpp"

using namespace simplesmt;

TEST_CASE("extraction on a monotone alignment") {
  auto links = AlignmentLinks::parse_pharaoh("0-0 1-1");
  auto spans = extract_phrases(2, 2, links, 7);
  std::vector<PhraseSpan> expected{{0, 1, 0, 1}, {0, 2, 0, 2}, {1, 2, 1, 2}};
  CHECK(spans == expected);
}

TEST_CASE("extraction with an unaligned word") {
  // Source "a b", target "x y z" with y unaligned: y attaches to either side.
  auto links = AlignmentLinks::parse_pharaoh("0-0 1-2");
  auto spans = extract_phrases(2, 3, links, 7);
  std::vector<PhraseSpan> expected{{0, 1, 0, 1}, {0, 1, 0, 2}, {0, 2, 0, 3}, {1, 2, 1, 3}, {1, 2, 2, 3}};
  CHECK(spans == expected);
}

TEST_CASE("no links means no phrases") {
  CHECK(extract_phrases(3, 3, AlignmentLinks{}, 7).empty());
  CHECK(extract_phrases(0, 0, AlignmentLinks{}, 7).empty());
}

TEST_CASE("extraction matches the brute-force definition") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<std::size_t> len(1, 7);
  for (int k = 0; k < 400; ++k) {
    std::size_t n = len(rng), m = len(rng), max_len = 1 + k % 7;
    auto links = oracle::random_links(rng, n, m);
    CHECK(extract_phrases(n, m, links, max_len) == oracle::phrases(n, m, links, max_len));
  }
}

TEST_CASE("relative frequency estimates") {
  PhraseCounts counts{{{"a", "x"}, 3}, {{"a", "y"}, 1}, {{"b", "x"}, 1}};
  auto t = PhraseTable::estimate(counts);
  const auto& c = t.query("a");
  REQUIRE(c.size() == 2);
  CHECK(c[0].target == "x");
  CHECK(std::exp(c[0].log_fwd) == doctest::Approx(0.75));
  CHECK(std::exp(c[1].log_fwd) == doctest::Approx(0.25));
  // phi(a | x) = 3 / 4.
  CHECK(std::exp(c[0].log_bwd) == doctest::Approx(0.75));
  CHECK(t.query("zzz").empty());
  CHECK(t.entry_count() == 3);
}

TEST_CASE("forward probabilities sum to one per source phrase") {
  std::vector<Segment> src{Segment::from_string("a b c"), Segment::from_string("a c"), Segment::from_string("b b a")};
  std::vector<Segment> tgt{Segment::from_string("x y z"), Segment::from_string("x z"), Segment::from_string("y x")};
  std::vector<AlignmentLinks> al{AlignmentLinks::parse_pharaoh("0-0 1-1 2-2"), AlignmentLinks::parse_pharaoh("0-0 1-1"),
                                 AlignmentLinks::parse_pharaoh("0-0 2-1")};
  auto t = PhraseTable::estimate(count_phrases(src, tgt, al, 3));
  for (const auto& [s, cands] : t.entries()) {
    double z = 0;
    for (const auto& c : cands) z += std::exp(c.log_fwd);
    CHECK(z == doctest::Approx(1.0));
  }
  CHECK(count_phrases(src, tgt, al, 3, 4) == count_phrases(src, tgt, al, 3, 1));
}

TEST_CASE("query order breaks ties by target text") {
  PhraseCounts counts{{{"a", "z"}, 1}, {{"a", "m"}, 1}, {{"a", "b"}, 2}};
  auto t = PhraseTable::estimate(counts);
  const auto& c = t.query("a");
  REQUIRE(c.size() == 3);
  CHECK(c[0].target == "b");
  CHECK(c[1].target == "m");
  CHECK(c[2].target == "z");
  std::vector<std::string> toks{"q", "a"};
  CHECK(&t.query(toks, 1, 2) == &c);
}

TEST_CASE("serialization round trip is exact") {
  PhraseCounts counts{{{"a b", "x"}, 3}, {{"a b", "y z"}, 7}, {{"c", "x"}, 1}};
  auto t = PhraseTable::estimate(counts, 3);
  auto text = t.serialize();
  auto back = PhraseTable::parse(text);
  CHECK(back.serialize() == text);
  CHECK(back.query("a b")[0].log_fwd == t.query("a b")[0].log_fwd);
  CHECK_THROWS_AS(PhraseTable::parse("a ||| b\n"), ParseError);
}

TEST_CASE("identity links on identical pairs give identity phrases") {
  Segment s = Segment::from_string("the king went home");
  AlignmentLinks id = AlignmentLinks::parse_pharaoh("0-0 1-1 2-2 3-3");
  auto t = PhraseTable::estimate(count_phrases({s}, {s}, {id}, 7));
  for (const auto& [src, cands] : t.entries()) {
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].target == src);
    CHECK(cands[0].log_fwd == 0.0);
  }
  CHECK(t.source_count() == 10);
}
