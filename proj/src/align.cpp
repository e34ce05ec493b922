#include "simplesmt/align.hpp"

#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "simplesmt/error.hpp"

namespace simplesmt {

void AlignConfig::validate() const {
  if (iterations < 0) throw ConfigError("align iterations must be >= 0");
  if (!(tension > 0)) throw ConfigError("diagonal tension must be positive");
  if (!(null_prob > 0 && null_prob < 1)) throw ConfigError("null probability must lie in (0, 1)");
  if (variational_bayes && !(alpha > 0)) throw ConfigError("VB concentration must be positive");
  if (tension_steps < 0) throw ConfigError("tension steps must be >= 0");
}

// ---------------------------------------------------------------------------
// TranslationTable

TranslationTable::TranslationTable() {
  src_.intern(kNullToken);
  rows_.emplace_back();
}

double TranslationTable::prob(WordId f, WordId e) const {
  if (f >= rows_.size()) return 0;
  auto it = rows_[f].find(e);
  return it == rows_[f].end() ? 0 : it->second;
}

double TranslationTable::prob(const std::string& f, const std::string& e) const {
  constexpr WordId kMissing = ~WordId{0};
  WordId fi = src_.find(f, kMissing), ei = tgt_.find(e, kMissing);
  if (fi == kMissing || ei == kMissing) return 0;
  return prob(fi, ei);
}

void TranslationTable::set(WordId f, WordId e, double p) {
  if (f >= rows_.size()) rows_.resize(f + 1);
  rows_[f][e] = p;
}

std::string TranslationTable::dump() const {
  std::vector<std::tuple<const std::string*, const std::string*, double>> entries;
  for (WordId f = 0; f < rows_.size(); ++f)
    for (const auto& [e, p] : rows_[f]) entries.emplace_back(&src_.word(f), &tgt_.word(e), p);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (*std::get<0>(a) != *std::get<0>(b)) return *std::get<0>(a) < *std::get<0>(b);
    return *std::get<1>(a) < *std::get<1>(b);
  });
  std::string out;
  for (const auto& [f, e, p] : entries) {
    out += *f;
    out += '\t';
    out += *e;
    out += '\t';
    out += format_double(p);
    out += '\n';
  }
  return out;
}

TranslationTable TranslationTable::parse(std::string_view text, const std::string& where) {
  TranslationTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError(where, line_no, "expected f<TAB>e<TAB>p");
    double p;
    try {
      p = parse_double(std::string_view(line).substr(t2 + 1));
    } catch (const DataError&) {
      throw ParseError(where, line_no, "bad probability");
    }
    WordId f = table.src_.intern(line.substr(0, t1));
    WordId e = table.tgt_.intern(line.substr(t1 + 1, t2 - t1 - 1));
    table.set(f, e, p);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Positional prior

namespace {

// Diagonal feature for target position j of m against source position i of
// n, using 1-based relative positions.
double diagonal_feature(std::size_t j, std::size_t m, std::size_t i, std::size_t n) {
  return -std::abs(static_cast<double>(i + 1) / static_cast<double>(n) -
                   static_cast<double>(j + 1) / static_cast<double>(m));
}

// Expected diagonal feature under the normalized non-NULL prior.
double expected_feature(std::size_t j, std::size_t m, std::size_t n, double tension) {
  double z = 0, acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double h = diagonal_feature(j, m, i, n);
    double w = std::exp(tension * h);
    z += w;
    acc += w * h;
  }
  return acc / z;
}

struct IdCorpus {
  std::vector<std::vector<WordId>> src, tgt;
  std::size_t target_tokens = 0;
};

IdCorpus integerize(const std::vector<Segment>& source, const std::vector<Segment>& target,
                    TranslationTable& table) {
  IdCorpus c;
  c.src.resize(source.size());
  c.tgt.resize(target.size());
  for (std::size_t k = 0; k < source.size(); ++k) {
    for (const auto& w : source[k].tokens) c.src[k].push_back(table.source_vocab().intern(w));
    for (const auto& w : target[k].tokens) c.tgt[k].push_back(table.target_vocab().intern(w));
    c.target_tokens += target[k].size();
  }
  return c;
}

struct PairPosteriors {
  struct Cell {
    WordId f, e;
    double p;
  };
  std::vector<Cell> cells;
  double log_likelihood = 0;
  double empirical_feature = 0;
  std::vector<double> non_null_mass;  // per target position
};

PairPosteriors e_step(const std::vector<WordId>& src, const std::vector<WordId>& tgt,
                      const TranslationTable& table, double tension, const AlignConfig& config) {
  PairPosteriors out;
  const std::size_t n = src.size(), m = tgt.size();
  out.non_null_mass.assign(m, 0.0);
  std::vector<double> post(n + 1);
  for (std::size_t j = 0; j < m; ++j) {
    auto prior = alignment_prior(j, m, n, tension, config);
    const WordId e = tgt[j];
    double z = 0;
    for (std::size_t i = 0; i < n; ++i) {
      post[i] = prior[i] * table.prob(src[i], e);
      z += post[i];
    }
    post[n] = prior[n] * table.prob(TranslationTable::kNull, e);
    z += post[n];
    if (!(z > 0)) {
      out.log_likelihood += std::log(config.unseen_floor);
      continue;
    }
    out.log_likelihood += std::log(z);
    for (std::size_t i = 0; i < n; ++i) {
      double p = post[i] / z;
      out.cells.push_back({src[i], e, p});
      out.non_null_mass[j] += p;
      out.empirical_feature += p * diagonal_feature(j, m, i, n);
    }
    out.cells.push_back({TranslationTable::kNull, e, post[n] / z});
  }
  return out;
}

void initialize_uniform(const IdCorpus& c, TranslationTable& table) {
  std::vector<std::set<WordId>> cooc(table.source_vocab().size());
  for (std::size_t k = 0; k < c.src.size(); ++k) {
    for (WordId e : c.tgt[k]) {
      cooc[TranslationTable::kNull].insert(e);
      for (WordId f : c.src[k]) cooc[f].insert(e);
    }
  }
  for (WordId f = 0; f < cooc.size(); ++f)
    for (WordId e : cooc[f]) table.set(f, e, 1.0 / static_cast<double>(cooc[f].size()));
}

void normalize_rows(std::vector<TranslationTable::Row>& counts, const AlignConfig& config) {
  for (auto& row : counts) {
    if (row.empty()) continue;
    // Sum in key order so the result does not depend on hash layout.
    std::vector<std::pair<WordId, double>> sorted(row.begin(), row.end());
    std::sort(sorted.begin(), sorted.end());
    if (config.variational_bayes) {
      double tot = 0;
      for (const auto& [e, c] : sorted) tot += c + config.alpha;
      double dg_tot = boost::math::digamma(tot);
      for (auto& [e, c] : sorted) c = std::exp(boost::math::digamma(c + config.alpha) - dg_tot);
    }
    double z = 0;
    for (const auto& [e, c] : sorted) z += c;
    for (const auto& [e, c] : sorted) row[e] = c / z;
  }
}

}  // namespace

std::vector<double> alignment_prior(std::size_t j, std::size_t m, std::size_t n, double tension,
                                    const AlignConfig& config) {
  std::vector<double> prior(n + 1, 0.0);
  if (n == 0) {
    prior[0] = 1.0;
    return prior;
  }
  prior[n] = config.null_prob;
  double z = 0;
  for (std::size_t i = 0; i < n; ++i) {
    prior[i] = config.diagonal ? std::exp(tension * diagonal_feature(j, m, i, n)) : 1.0;
    z += prior[i];
  }
  for (std::size_t i = 0; i < n; ++i) prior[i] *= (1.0 - config.null_prob) / z;
  return prior;
}

AlignModel em_train(const std::vector<Segment>& source, const std::vector<Segment>& target,
                    const AlignConfig& config, const EmObserver& observer) {
  config.validate();
  if (source.size() != target.size()) throw AlignmentError("source and target segment counts differ");
  if (source.empty()) throw DataError("cannot train alignments on an empty corpus");

  AlignModel model;
  model.tension = config.tension;
  auto ids = integerize(source, target, model.table);
  initialize_uniform(ids, model.table);

  // Target-position mass keyed by (m, n) for the tension gradient.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> mass_by_shape;
  constexpr std::size_t kBlock = 2048;
  const std::size_t n_pairs = ids.src.size();

  for (int iter = 0; iter < config.iterations; ++iter) {
    std::vector<TranslationTable::Row> counts(model.table.source_vocab().size());
    double empirical = 0;
    mass_by_shape.clear();

    for (std::size_t block = 0; block < n_pairs; block += kBlock) {
      std::size_t end = std::min(n_pairs, block + kBlock);
      std::vector<PairPosteriors> posts(end - block);
      parallel_for(end - block, config.threads, [&](std::size_t k) {
        posts[k] = e_step(ids.src[block + k], ids.tgt[block + k], model.table, model.tension, config);
      });
      // Reduce in pair order: identical sums for any thread count.
      for (std::size_t k = 0; k < posts.size(); ++k) {
        for (const auto& cell : posts[k].cells) counts[cell.f][cell.e] += cell.p;
        empirical += posts[k].empirical_feature;
        auto& mass = mass_by_shape[{ids.tgt[block + k].size(), ids.src[block + k].size()}];
        mass.resize(ids.tgt[block + k].size(), 0.0);
        for (std::size_t j = 0; j < mass.size(); ++j) mass[j] += posts[k].non_null_mass[j];
      }
    }

    if (config.diagonal && config.optimize_tension && ids.target_tokens > 0) {
      const double toks = static_cast<double>(ids.target_tokens);
      for (int step = 0; step < config.tension_steps; ++step) {
        double modeled = 0;
        for (const auto& [shape, mass] : mass_by_shape) {
          const auto [m, n] = shape;
          if (n == 0) continue;
          for (std::size_t j = 0; j < m; ++j) modeled += mass[j] * expected_feature(j, m, n, model.tension);
        }
        model.tension += 20.0 * (empirical - modeled) / toks;
        model.tension = std::max(model.tension, 0.1);
      }
    }

    normalize_rows(counts, config);
    model.table.rows() = std::move(counts);
    model.table.rows().resize(model.table.source_vocab().size());
    model.log_likelihoods.push_back(log_likelihood(source, target, model.table, model.tension, config));
    if (observer) observer(iter, model);
  }
  return model;
}

double log_likelihood(const std::vector<Segment>& source, const std::vector<Segment>& target,
                      const TranslationTable& table, double tension, const AlignConfig& config) {
  constexpr WordId kMissing = ~WordId{0};
  double ll = 0;
  for (std::size_t k = 0; k < source.size(); ++k) {
    const auto& src = source[k].tokens;
    const auto& tgt = target[k].tokens;
    std::vector<WordId> f_ids;
    for (const auto& w : src) f_ids.push_back(table.source_vocab().find(w, kMissing));
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      WordId e = table.target_vocab().find(tgt[j], kMissing);
      auto prior = alignment_prior(j, tgt.size(), src.size(), tension, config);
      auto t = [&](WordId f) {
        double p = (f == kMissing || e == kMissing) ? 0.0 : table.prob(f, e);
        return p > 0 ? p : config.unseen_floor;
      };
      double z = prior[src.size()] * t(TranslationTable::kNull);
      for (std::size_t i = 0; i < src.size(); ++i) z += prior[i] * t(f_ids[i]);
      ll += std::log(z);
    }
  }
  return ll;
}

// ---------------------------------------------------------------------------
// Viterbi and Pharaoh I/O

void AlignmentLinks::normalize() {
  std::sort(links.begin(), links.end());
  links.erase(std::unique(links.begin(), links.end()), links.end());
}

std::string AlignmentLinks::pharaoh() const {
  std::string out;
  for (std::size_t k = 0; k < links.size(); ++k) {
    if (k) out += ' ';
    out += std::to_string(links[k].first);
    out += '-';
    out += std::to_string(links[k].second);
  }
  return out;
}

AlignmentLinks AlignmentLinks::parse_pharaoh(std::string_view line) {
  AlignmentLinks a;
  for (const auto& tok : split_whitespace(line)) {
    auto dash = tok.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == tok.size())
      throw DataError("bad alignment link '" + tok + "'");
    try {
      std::size_t used = 0;
      auto i = std::stoul(tok.substr(0, dash), &used);
      if (used != dash) throw std::invalid_argument(tok);
      auto rest = tok.substr(dash + 1);
      auto j = std::stoul(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(tok);
      a.links.emplace_back(i, j);
    } catch (const std::logic_error&) {
      throw DataError("bad alignment link '" + tok + "'");
    }
  }
  a.normalize();
  return a;
}

AlignmentLinks viterbi_align(const Segment& source, const Segment& target, const TranslationTable& table,
                             double tension, const AlignConfig& config) {
  constexpr WordId kMissing = ~WordId{0};
  AlignmentLinks out;
  const std::size_t n = source.size(), m = target.size();
  std::vector<WordId> f_ids;
  for (const auto& w : source.tokens) f_ids.push_back(table.source_vocab().find(w, kMissing));
  for (std::size_t j = 0; j < m; ++j) {
    WordId e = table.target_vocab().find(target[j], kMissing);
    auto t = [&](WordId f) {
      double p = (f == kMissing || e == kMissing) ? 0.0 : table.prob(f, e);
      return p > 0 ? p : config.unseen_floor;
    };
    auto prior = alignment_prior(j, m, n, tension, config);
    double best = prior[n] * t(TranslationTable::kNull);
    std::size_t best_i = n;
    for (std::size_t i = 0; i < n; ++i) {
      double s = prior[i] * t(f_ids[i]);
      if (s > best) {
        best = s;
        best_i = i;
      }
    }
    if (best_i < n) out.links.emplace_back(best_i, j);
  }
  out.normalize();
  return out;
}

std::vector<AlignmentLinks> viterbi_align_all(const std::vector<Segment>& source,
                                              const std::vector<Segment>& target,
                                              const TranslationTable& table, double tension,
                                              const AlignConfig& config) {
  if (source.size() != target.size()) throw AlignmentError("source and target segment counts differ");
  std::vector<AlignmentLinks> out(source.size());
  parallel_for(source.size(), config.threads,
               [&](std::size_t k) { out[k] = viterbi_align(source[k], target[k], table, tension, config); });
  return out;
}

void write_pharaoh(const std::vector<AlignmentLinks>& alignments, const fs::path& path) {
  std::string out;
  for (const auto& a : alignments) {
    out += a.pharaoh();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<AlignmentLinks> read_pharaoh(const fs::path& path) {
  std::vector<AlignmentLinks> out;
  auto lines = read_lines(path);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    try {
      out.push_back(AlignmentLinks::parse_pharaoh(lines[k]));
    } catch (const DataError& e) {
      throw ParseError(path.string(), k + 1, e.what());
    }
  }
  return out;
}

}  // namespace simplesmt
