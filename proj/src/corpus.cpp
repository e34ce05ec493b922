#include "simplesmt/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "simplesmt/error.hpp"

namespace simplesmt {

std::string_view side_name(Side s) { return s == Side::kNormal ? "normal" : "simple"; }

Side parse_side(std::string_view name) {
  if (name == "normal") return Side::kNormal;
  if (name == "simple") return Side::kSimple;
  throw ConfigError("unknown side '" + std::string(name) + "' (expected normal|simple)");
}

std::vector<Segment> ParallelCorpus::side(Side s) const {
  std::vector<Segment> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.side(s));
  return out;
}

ParallelCorpus load_parallel(const fs::path& normal_path, const fs::path& simple_path) {
  auto normal = read_lines(normal_path);
  auto simple = read_lines(simple_path);
  if (normal.size() != simple.size())
    throw AlignmentError("parallel files differ in length: " + normal_path.string() + " has " +
                         std::to_string(normal.size()) + " lines, " + simple_path.string() + " has " +
                         std::to_string(simple.size()));
  ParallelCorpus corpus;
  corpus.pairs.reserve(normal.size());
  for (std::size_t i = 0; i < normal.size(); ++i)
    corpus.pairs.push_back({Segment::from_string(normal[i]), Segment::from_string(simple[i])});
  return corpus;
}

void write_side(const ParallelCorpus& corpus, Side side, const fs::path& path) {
  std::string out;
  for (const auto& p : corpus.pairs) {
    out += p.side(side).str();
    out += '\n';
  }
  write_file(path, out);
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

bool is_punct(char32_t cp) {
  if (cp < 0x80) return cp > 0x20 && cp < 0x7F && !std::isalnum(static_cast<int>(cp));
  return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) || cp == 0x00A1 ||
         cp == 0x00AB || cp == 0x00BB || cp == 0x00BF || cp == 0x00B7 || (cp >= 0x3000 && cp <= 0x303F);
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019; }
bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }
bool is_letter(char32_t cp) {
  return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') || (cp >= 0x80 && !is_punct(cp));
}

// Normalizes a typographic apostrophe so suffix checks see ASCII.
std::string fold_apostrophe(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if (s.compare(i, 3, "\xE2\x80\x99") == 0) {
      out += '\'';
      i += 3;
    } else {
      out += s[i++];
    }
  }
  return ascii_lower(out);
}

bool is_clitic_suffix(std::string_view lowered) {
  return lowered == "s" || lowered == "re" || lowered == "ve" || lowered == "ll" || lowered == "d" ||
         lowered == "m";
}

bool is_bracket_escape(std::string_view s) {
  return s == "-LRB-" || s == "-RRB-" || s == "-LSB-" || s == "-RSB-" || s == "-LCB-" || s == "-RCB-";
}

bool is_protected(std::string_view piece) {
  if (is_bracket_escape(piece)) return true;
  auto f = fold_apostrophe(piece);
  if (f == "n't") return true;
  return f.size() >= 2 && f[0] == '\'' && is_clitic_suffix(std::string_view(f).substr(1));
}

struct CodePoint {
  char32_t cp;
  std::size_t begin, end;
};

void tokenize_piece(std::string_view piece, std::vector<std::string>& out) {
  if (is_protected(piece)) {
    out.emplace_back(piece);
    return;
  }
  std::vector<CodePoint> cps;
  for (std::size_t pos = 0; pos < piece.size();) {
    std::size_t b = pos;
    char32_t cp = next_code_point(piece, pos);
    cps.push_back({cp, b, pos});
  }
  auto text = [&](std::size_t from, std::size_t to) {  // code-point range [from, to)
    return std::string(piece.substr(cps[from].begin, cps[to - 1].end - cps[from].begin));
  };
  auto word = [&](std::size_t k) { return k < cps.size() && !is_punct(cps[k].cp); };

  std::size_t word_begin = 0;
  bool in_word = false;
  auto flush = [&](std::size_t end) {
    if (in_word && end > word_begin) out.push_back(text(word_begin, end));
    in_word = false;
  };

  for (std::size_t k = 0; k < cps.size(); ++k) {
    char32_t cp = cps[k].cp;
    if (word(k)) {
      if (!in_word) {
        in_word = true;
        word_begin = k;
      }
      continue;
    }
    bool next_word = word(k + 1);
    char32_t prev = k > 0 ? cps[k - 1].cp : 0;
    if (in_word && next_word) {
      if ((cp == U'.' || cp == U',') && is_digit(prev) && is_digit(cps[k + 1].cp)) continue;
      if (cp == U'-') continue;
    }
    if (is_apostrophe(cp) && next_word) {
      std::size_t run_end = k + 1;
      while (word(run_end)) ++run_end;
      std::string suffix = ascii_lower(text(k + 1, run_end));
      std::size_t word_len = in_word ? k - word_begin : 0;
      char32_t n = in_word ? prev : 0;
      if ((n == U'n' || n == U'N') && suffix == "t" &&
          (word_len == 1 || (word_len >= 2 && is_letter(cps[k - 2].cp)))) {
        flush(k - 1);
        out.push_back(text(k - 1, run_end));
        k = run_end - 1;
        continue;
      }
      if (is_clitic_suffix(suffix) && (!in_word || word(k - 1))) {
        flush(k);
        out.push_back(text(k, run_end));
        k = run_end - 1;
        continue;
      }
    }
    flush(k);
    out.push_back(text(k, k + 1));
  }
  flush(cps.size());
}

}  // namespace

Segment tokenize(std::string_view raw) {
  Segment seg;
  for (const auto& piece : split_whitespace(raw)) tokenize_piece(piece, seg.tokens);
  return seg;
}

Segment unescape_brackets(const Segment& seg) {
  Segment out = seg;
  for (auto& t : out.tokens) {
    if (t == "-LRB-") t = "(";
    else if (t == "-RRB-") t = ")";
    else if (t == "-LSB-") t = "[";
    else if (t == "-RSB-") t = "]";
    else if (t == "-LCB-") t = "{";
    else if (t == "-RCB-") t = "}";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scrubbing

std::string scrub_simple_side(std::string_view raw, std::vector<ScrubWarning>* warnings) {
  std::string text;
  for (std::size_t i = 0; i < raw.size();) {
    if (raw[i] == '"') {
      ++i;
    } else if (raw.compare(i, 3, "\xE2\x80\x9C") == 0 || raw.compare(i, 3, "\xE2\x80\x9D") == 0 ||
               raw.compare(i, 3, "\xE2\x80\x9E") == 0) {
      i += 3;
    } else {
      text += raw[i++];
    }
  }

  std::vector<bool> drop(text.size(), false);
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') {
      open.push_back(i);
    } else if (text[i] == ')') {
      if (open.empty()) {
        if (warnings) warnings->push_back({i, ')'});
        continue;
      }
      std::size_t start = open.back();
      open.pop_back();
      std::fill(drop.begin() + start, drop.begin() + i + 1, true);
    }
  }
  for (auto pos : open) {
    if (warnings) warnings->push_back({pos, '('});
  }

  std::string kept;
  for (std::size_t i = 0; i < text.size(); ++i)
    if (!drop[i] && text[i] != '*') kept += text[i];
  return join(split_whitespace(kept));
}

// ---------------------------------------------------------------------------
// Truecasing

namespace {

bool has_upper(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

bool initial_capital_only(std::string_view s) {
  if (s.empty() || !(s[0] >= 'A' && s[0] <= 'Z')) return false;
  return !has_upper(s.substr(1));
}

}  // namespace

void TruecaseModel::add(const std::string& form, std::uint64_t n) { counts_[form] += n; }

void TruecaseModel::finalize() {
  preferred_.clear();
  std::map<std::string, std::uint64_t> best_count;
  for (const auto& [form, n] : counts_) {
    auto key = ascii_lower(form);
    auto it = preferred_.find(key);
    if (it == preferred_.end()) {
      preferred_[key] = form;
      best_count[key] = n;
      continue;
    }
    auto& best = best_count[key];
    // Ties go to the lowercase form; among other ties the first in byte order.
    if (n > best || (n == best && form == key)) {
      it->second = form;
      best = n;
    }
  }
}

TruecaseModel TruecaseModel::train(const std::vector<Segment>& segments) {
  TruecaseModel m;
  for (const auto& seg : segments)
    for (std::size_t i = 1; i < seg.size(); ++i) m.add(seg[i], 1);
  m.finalize();
  return m;
}

TruecaseModel TruecaseModel::train(const ParallelCorpus& corpus, Side side) {
  return train(corpus.side(side));
}

const std::string* TruecaseModel::preferred_form(const std::string& lowered) const {
  auto it = preferred_.find(lowered);
  return it == preferred_.end() ? nullptr : &it->second;
}

Segment TruecaseModel::apply(const Segment& seg) const {
  Segment out = seg;
  if (out.empty()) return out;
  auto& first = out.tokens[0];
  auto key = ascii_lower(first);
  if (const auto* pref = preferred_form(key))
    first = *pref;
  else if (initial_capital_only(first))
    first = key;
  return out;
}

std::string TruecaseModel::serialize() const {
  std::string out;
  for (const auto& [form, n] : counts_) {
    out += form;
    out += '\t';
    out += std::to_string(n);
    out += '\n';
  }
  return out;
}

TruecaseModel TruecaseModel::parse(std::string_view text, const std::string& where) {
  TruecaseModel m;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError(where, line_no, "expected form<TAB>count");
    try {
      m.add(line.substr(0, tab), std::stoull(line.substr(tab + 1)));
    } catch (const std::logic_error&) {
      throw ParseError(where, line_no, "bad count");
    }
  }
  m.finalize();
  return m;
}

// ---------------------------------------------------------------------------
// Cleaning, splitting, statistics

bool clean_pair(const SentencePair& pair, const CleanBounds& bounds) {
  auto ok = [&](const Segment& s) { return s.size() >= bounds.min_len && s.size() <= bounds.max_len; };
  return ok(pair.normal) && ok(pair.simple);
}

void SplitSpec::validate() const {
  if (train_fraction < 0 || dev_fraction < 0 || test_fraction < 0)
    throw ConfigError("split fractions must be non-negative");
  if (std::abs(train_fraction + dev_fraction + test_fraction - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1");
}

std::string_view split_part_name(SplitPart p) {
  switch (p) {
    case SplitPart::kTrain: return "train";
    case SplitPart::kDev: return "dev";
    case SplitPart::kTest: return "test";
  }
  return "?";
}

std::string CorpusSplit::manifest_text() const {
  std::string out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    out += std::to_string(i);
    out += '\t';
    out += split_part_name(assignment[i]);
    out += '\n';
  }
  return out;
}

CorpusSplit split_corpus(const ParallelCorpus& corpus, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = corpus.size();
  bool any_zero = spec.train_fraction == 0 || spec.dev_fraction == 0 || spec.test_fraction == 0;
  if (n < 3 && !any_zero)
    throw DataError("corpus of " + std::to_string(n) + " pairs is too small to split three ways");

  // The epsilon absorbs binary rounding in products like 100 * 0.1.
  auto part_size = [n](double f) { return static_cast<std::size_t>(std::floor(n * f + 1e-9)); };
  std::size_t n_dev = part_size(spec.dev_fraction);
  std::size_t n_test = part_size(spec.test_fraction);
  std::size_t n_train = n - n_dev - n_test;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);

  CorpusSplit out;
  out.assignment.assign(n, SplitPart::kTrain);
  for (std::size_t k = n_train; k < n_train + n_dev; ++k) out.assignment[perm[k]] = SplitPart::kDev;
  for (std::size_t k = n_train + n_dev; k < n; ++k) out.assignment[perm[k]] = SplitPart::kTest;
  for (auto* part : {&out.train, &out.dev, &out.test}) part->side_labels = corpus.side_labels;
  for (std::size_t i = 0; i < n; ++i) {
    auto& dst = out.assignment[i] == SplitPart::kTrain ? out.train
                : out.assignment[i] == SplitPart::kDev ? out.dev
                                                        : out.test;
    dst.pairs.push_back(corpus.pairs[i]);
  }
  return out;
}

CorpusStats compute_stats(const ParallelCorpus& corpus) {
  if (corpus.empty()) throw DataError("cannot compute statistics of an empty corpus");
  CorpusStats st;
  st.pair_count = corpus.size();
  auto side_stats = [&](Side s) {
    double sum = 0, sq = 0;
    for (const auto& p : corpus.pairs) sum += static_cast<double>(p.side(s).size());
    double mean = sum / static_cast<double>(st.pair_count);
    for (const auto& p : corpus.pairs) {
      double d = static_cast<double>(p.side(s).size()) - mean;
      sq += d * d;
    }
    return SideStats{mean, std::sqrt(sq / static_cast<double>(st.pair_count))};
  };
  st.normal = side_stats(Side::kNormal);
  st.simple = side_stats(Side::kSimple);
  std::size_t same = 0;
  for (const auto& p : corpus.pairs) same += p.normal == p.simple;
  st.identical_pair_fraction = static_cast<double>(same) / static_cast<double>(st.pair_count);
  return st;
}

}  // namespace simplesmt
