#include "simplesmt/lm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "simplesmt/error.hpp"

namespace simplesmt {

void LMConfig::validate() const {
  if (order < 1 || order > 5) throw ConfigError("LM order must be in [1, 5]");
  if (!(discount > 0 && discount < 1)) throw ConfigError("LM discount must lie in (0, 1)");
}

NGramModel::NGramModel() {
  vocab_.intern(kUnk);
  vocab_.intern(kBos);
  vocab_.intern(kEos);
  tables_.resize(1);
}

const NGramModel::Entry* NGramModel::find(const std::vector<WordId>& gram) const {
  if (gram.empty() || gram.size() > tables_.size()) return nullptr;
  const auto& t = tables_[gram.size() - 1];
  auto it = t.find(gram);
  return it == t.end() ? nullptr : &it->second;
}

double NGramModel::log10_prob(const std::vector<WordId>& context, WordId word) const {
  // Longest stored suffix of context+word wins; every shorter context we
  // pass through contributes its backoff weight.
  std::size_t ctx_len = std::min<std::size_t>(context.size(), static_cast<std::size_t>(order_ - 1));
  std::vector<WordId> gram(context.end() - static_cast<std::ptrdiff_t>(ctx_len), context.end());
  gram.push_back(word);
  double backoff = 0;
  while (true) {
    if (const Entry* e = find(gram)) return backoff + e->log10_prob;
    if (gram.size() == 1) return backoff + kNoProb;
    std::vector<WordId> ctx(gram.begin(), gram.end() - 1);
    if (const Entry* c = find(ctx)) backoff += c->log10_backoff;
    gram.erase(gram.begin());
  }
}

double NGramModel::log_prob(const std::vector<WordId>& context, WordId word) const {
  return log10_prob(context, word) * std::numbers::ln10;
}

double NGramModel::score_word(State& state, WordId word) const {
  double lp = log_prob(state, word);
  state.push_back(word);
  if (state.size() > static_cast<std::size_t>(order_ - 1)) state.erase(state.begin());
  return lp;
}

double NGramModel::score_sequence(const std::vector<std::string>& tokens) const {
  State st = begin_state();
  double total = 0;
  for (const auto& t : tokens) total += score_word(st, index(t));
  total += score_word(st, kEosId);
  return total;
}

// ---------------------------------------------------------------------------
// Training

NGramModel NGramModel::train(const std::vector<Segment>& sentences, const LMConfig& config) {
  config.validate();
  if (std::none_of(sentences.begin(), sentences.end(), [](const Segment& s) { return !s.empty(); }))
    throw DataError("cannot train a language model without a non-empty sentence");

  const auto N = static_cast<std::size_t>(config.order);
  const double D = config.discount;
  NGramModel model;
  model.order_ = config.order;
  model.tables_.assign(N, {});

  std::map<std::string, std::uint64_t> freq;
  for (const auto& s : sentences)
    for (const auto& t : s.tokens) ++freq[t];
  for (const auto& [w, c] : freq)
    if (c >= config.unk_threshold && w != kUnk) model.vocab_.intern(w);

  // Raw window counts per order over <s> w1 .. wm </s>.
  using Counts = std::map<std::vector<WordId>, std::uint64_t>;
  std::vector<Counts> raw(N);
  for (const auto& s : sentences) {
    std::vector<WordId> ids{kBosId};
    for (const auto& t : s.tokens) ids.push_back(model.index(t));
    ids.push_back(kEosId);
    for (std::size_t k = 1; k <= N; ++k)
      for (std::size_t i = 0; i + k <= ids.size(); ++i)
        ++raw[k - 1][std::vector<WordId>(ids.begin() + i, ids.begin() + i + k)];
  }

  // Adjusted counts: raw at the top order and for <s>-initial grams,
  // otherwise the number of distinct left extensions.
  std::vector<Counts> adj(N);
  adj[N - 1] = raw[N - 1];
  for (std::size_t k = N - 1; k >= 1; --k) {
    for (const auto& [g, c] : raw[k]) ++adj[k - 1][std::vector<WordId>(g.begin() + 1, g.end())];
    for (const auto& [g, c] : raw[k - 1])
      if (g[0] == kBosId) adj[k - 1][g] = c;
  }
  adj[0].erase({kBosId});

  // Per-context totals and type counts.
  struct ContextStats {
    double total = 0;
    double types = 0;
  };
  const double vocab_size = static_cast<double>(model.vocab_.size() - 1);  // all but <s>

  for (std::size_t k = 1; k <= N; ++k) {
    std::map<std::vector<WordId>, ContextStats> ctx;
    for (const auto& [g, c] : adj[k - 1]) {
      auto& st = ctx[std::vector<WordId>(g.begin(), g.end() - 1)];
      st.total += static_cast<double>(c);
      st.types += 1;
    }
    auto& table = model.tables_[k - 1];
    auto lower = [&](const std::vector<WordId>& g) {
      if (k == 1) return 1.0 / vocab_size;
      std::vector<WordId> ctx_lower(g.begin() + 1, g.end() - 1);
      return std::pow(10.0, model.log10_prob(ctx_lower, g.back()));
    };
    auto interpolated = [&](const std::vector<WordId>& g, double count) {
      const auto& st = ctx.at(std::vector<WordId>(g.begin(), g.end() - 1));
      return (count - D) / st.total + D * st.types / st.total * lower(g);
    };
    if (k == 1) {
      // Every predictable word gets a unigram, observed or not.
      for (WordId w = 0; w < model.vocab_.size(); ++w) {
        if (w == kBosId) continue;
        std::vector<WordId> g{w};
        auto it = adj[0].find(g);
        double p = it != adj[0].end() ? interpolated(g, static_cast<double>(it->second))
                                      : D * ctx.at({}).types / ctx.at({}).total / vocab_size;
        table[g].log10_prob = std::log10(p);
      }
      table[{kBosId}].log10_prob = kNoProb;
    } else {
      for (const auto& [g, c] : adj[k - 1]) table[g].log10_prob = std::log10(interpolated(g, static_cast<double>(c)));
    }
    if (k >= 2) {
      auto& ctx_table = model.tables_[k - 2];
      for (const auto& [h, st] : ctx) {
        auto it = ctx_table.find(h);
        if (it == ctx_table.end())
          throw Error("internal: context without a stored n-gram");
        it->second.log10_backoff = std::log10(D * st.types / st.total);
      }
    }
  }
  return model;
}

NGramModel NGramModel::truncated(int n) const {
  if (n < 1 || n > order_) throw ConfigError("bad truncation order");
  NGramModel m = *this;
  m.order_ = n;
  m.tables_.resize(static_cast<std::size_t>(n));
  for (auto& [g, e] : m.tables_.back()) e.log10_backoff = 0;
  return m;
}

// ---------------------------------------------------------------------------
// ARPA

std::string NGramModel::to_arpa() const {
  std::string out = "\\data\\\n";
  for (int k = 1; k <= order_; ++k)
    out += "ngram " + std::to_string(k) + "=" + std::to_string(tables_[k - 1].size()) + "\n";
  for (int k = 1; k <= order_; ++k) {
    out += "\n\\" + std::to_string(k) + "-grams:\n";
    std::vector<std::pair<std::vector<std::string>, const Entry*>> rows;
    for (const auto& [g, e] : tables_[k - 1]) {
      std::vector<std::string> words;
      for (auto id : g) words.push_back(vocab_.word(id));
      rows.emplace_back(std::move(words), &e);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [words, e] : rows) {
      out += format_double(e->log10_prob);
      out += '\t';
      out += join(words);
      if (k < order_) {
        out += '\t';
        out += format_double(e->log10_backoff);
      }
      out += '\n';
    }
  }
  out += "\n\\end\\\n";
  return out;
}

NGramModel NGramModel::from_arpa(std::string_view text, const std::string& where) {
  NGramModel model;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!split_whitespace(line).empty()) return true;
    }
    return false;
  };

  if (!next() || line != "\\data\\") throw ParseError(where, line_no, "expected \\data\\");
  std::vector<std::size_t> declared;
  bool have_line = next();
  while (have_line && line.rfind("ngram ", 0) == 0) {
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(where, line_no, "bad ngram count line");
    std::size_t k, n;
    try {
      k = std::stoul(line.substr(6, eq - 6));
      n = std::stoul(line.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw ParseError(where, line_no, "bad ngram count line");
    }
    if (k != declared.size() + 1) throw ParseError(where, line_no, "ngram orders out of sequence");
    declared.push_back(n);
    have_line = next();
  }
  if (declared.empty() || declared.size() > 5) throw ParseError(where, line_no, "need 1 to 5 ngram orders");
  model.order_ = static_cast<int>(declared.size());
  model.tables_.assign(declared.size(), {});

  for (std::size_t k = 1; k <= declared.size(); ++k) {
    if (!have_line || line != "\\" + std::to_string(k) + "-grams:")
      throw ParseError(where, line_no, "expected \\" + std::to_string(k) + "-grams:");
    std::size_t seen = 0;
    while ((have_line = next()) && line[0] != '\\') {
      auto fields = split_whitespace(line);
      if (fields.size() != k + 1 && fields.size() != k + 2)
        throw ParseError(where, line_no, "wrong field count for a " + std::to_string(k) + "-gram");
      Entry e;
      try {
        e.log10_prob = parse_double(fields[0]);
        if (fields.size() == k + 2) e.log10_backoff = parse_double(fields.back());
      } catch (const DataError&) {
        throw ParseError(where, line_no, "bad number");
      }
      std::vector<WordId> g;
      for (std::size_t i = 1; i <= k; ++i) g.push_back(model.vocab_.intern(fields[i]));
      model.tables_[k - 1][g] = e;
      ++seen;
    }
    if (seen != declared[k - 1])
      throw ParseError(where, line_no,
                       std::to_string(k) + "-gram count mismatch: declared " + std::to_string(declared[k - 1]) +
                           ", found " + std::to_string(seen));
  }
  if (!have_line || line != "\\end\\") throw ParseError(where, line_no, "expected \\end\\");
  return model;
}

void NGramModel::write_arpa(const fs::path& path) const { write_file(path, to_arpa()); }

NGramModel NGramModel::read_arpa(const fs::path& path) { return from_arpa(read_file(path), path.string()); }

}  // namespace simplesmt
