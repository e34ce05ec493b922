#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "simplesmt/corpus.hpp"
#include "simplesmt/vocab.hpp"

namespace simplesmt {

struct AlignConfig {
  int iterations = 5;
  bool diagonal = true;
  double tension = 4.0;  // initial lambda
  bool optimize_tension = true;
  int tension_steps = 8;
  double null_prob = 0.08;
  bool variational_bayes = true;
  double alpha = 0.01;
  double unseen_floor = 1e-9;
  unsigned threads = 1;

  void validate() const;
};

// Lexical translation probabilities t(e|f), f ranging over source words plus
// NULL. Every row with entries sums to one.
class TranslationTable {
 public:
  static constexpr WordId kNull = 0;
  static constexpr const char* kNullToken = "<null>";

  TranslationTable();

  Vocab& source_vocab() { return src_; }
  Vocab& target_vocab() { return tgt_; }
  const Vocab& source_vocab() const { return src_; }
  const Vocab& target_vocab() const { return tgt_; }

  // 0 when absent.
  double prob(WordId f, WordId e) const;
  double prob(const std::string& f, const std::string& e) const;
  void set(WordId f, WordId e, double p);

  using Row = std::unordered_map<WordId, double>;
  const std::vector<Row>& rows() const { return rows_; }
  std::vector<Row>& rows() { return rows_; }

  // `f<TAB>e<TAB>t(e|f)` lines sorted by (f, e).
  std::string dump() const;
  static TranslationTable parse(std::string_view text, const std::string& where = "ttable");

 private:
  Vocab src_, tgt_;
  std::vector<Row> rows_;
};

struct AlignModel {
  TranslationTable table;
  double tension = 4.0;
  // Corpus log-likelihood evaluated after each M-step.
  std::vector<double> log_likelihoods;
};

// Called after every M-step with the 0-based iteration and the model so far.
using EmObserver = std::function<void(int iteration, const AlignModel& model)>;

// Source segments are the conditioning side; target positions get linked.
AlignModel em_train(const std::vector<Segment>& source, const std::vector<Segment>& target,
                    const AlignConfig& config, const EmObserver& observer = {});

// Positional prior over the n source positions plus NULL (slot n) for a target
// position j of a length-m segment. Sums to one.
std::vector<double> alignment_prior(std::size_t j, std::size_t m, std::size_t n, double tension,
                                    const AlignConfig& config);

double log_likelihood(const std::vector<Segment>& source, const std::vector<Segment>& target,
                      const TranslationTable& table, double tension, const AlignConfig& config);

// Links as (source index, target index), 0-based, sorted ascending.
struct AlignmentLinks {
  std::vector<std::pair<std::size_t, std::size_t>> links;

  void normalize();
  std::string pharaoh() const;
  static AlignmentLinks parse_pharaoh(std::string_view line);
  friend bool operator==(const AlignmentLinks&, const AlignmentLinks&) = default;
};

// Each target position links to argmax_i prior(i)*t(e|f_i); none when NULL
// scores at least as high. Ties go to the smallest i.
AlignmentLinks viterbi_align(const Segment& source, const Segment& target, const TranslationTable& table,
                             double tension, const AlignConfig& config);

std::vector<AlignmentLinks> viterbi_align_all(const std::vector<Segment>& source,
                                              const std::vector<Segment>& target,
                                              const TranslationTable& table, double tension,
                                              const AlignConfig& config);

void write_pharaoh(const std::vector<AlignmentLinks>& alignments, const fs::path& path);
std::vector<AlignmentLinks> read_pharaoh(const fs::path& path);

}  // namespace simplesmt
