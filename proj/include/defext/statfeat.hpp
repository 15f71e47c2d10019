// statfeat.hpp
// Frequency/rank/position tables over a labeled training corpus and a
// general reference corpus, and the statistical features computed from
// them: termhood, tf-gen, tf-dom, tfidf, def_prom, D_prom, d_prom.
// A StatModel is immutable after build; lookups are pure and safe for
// concurrent use. Mid-bootstrap recomputation builds a fresh model.

#ifndef DEFEXT_STATFEAT_HPP
#define DEFEXT_STATFEAT_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "defext/corpus.hpp"

namespace defext {

// Extended-real feature value. ZeroUnseen marks words with no evidence in
// either table (reads as 0) so discretization can keep them out of the
// numeric bins.
class FeatureValue {
 public:
  enum class Kind { NegInf, Finite, PosInf, ZeroUnseen };

  static FeatureValue neg_inf() { return FeatureValue(Kind::NegInf, 0.0); }
  static FeatureValue pos_inf() { return FeatureValue(Kind::PosInf, 0.0); }
  static FeatureValue zero_unseen() { return FeatureValue(Kind::ZeroUnseen, 0.0); }
  static FeatureValue finite(double v) { return FeatureValue(Kind::Finite, v); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  // 0 for ZeroUnseen, +-HUGE_VAL for the infinities
  double value() const;

  bool operator==(const FeatureValue&) const = default;

 private:
  FeatureValue(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

struct FreqTable {
  std::unordered_map<std::string, long long> counts;
  long long total_tokens = 0;  // token-level corpus size (the formula denominator)
  long long vocab_size = 0;    // distinct words

  long long count(const std::string& word) const;
};

// Ascending frequency ranks: least frequent word = rank 1, most frequent =
// vocab_size. Tied frequencies share the minimum rank of their tie group.
struct RankTable {
  std::unordered_map<std::string, long long> rank;

  // 0 when the word is absent
  long long rank_of(const std::string& word) const;
};

RankTable build_rank_table(const FreqTable& freq);

struct DefStats {
  std::unordered_map<std::string, long long> def_doc_freq;    // DF: defs containing w
  std::unordered_map<std::string, long long> nodef_doc_freq;  // NF
  long long n_defs = 0;
  long long n_nodefs = 0;
};

struct PositionStats {
  // occurrences of each word inside candidate terms (b-/i- tags) by zone
  std::unordered_map<std::string, long long> definiendum_occurrences;
  std::unordered_map<std::string, long long> definiens_occurrences;
  long long definiendum_total = 0;  // |DT|
  long long definiens_total = 0;    // |dT|
};

struct CorpusDocStats {
  long long n_sentences = 0;  // each training sentence is one document
  std::unordered_map<std::string, long long> sentence_doc_freq;
};

struct StatOptions {
  std::string key_column = "form";
  bool case_fold = true;
  int n_bins = 5;
  // lexicographic tag column; position stats stay empty when absent
  std::string lex_column = "lex";
};

// names and order of the appended feature columns
const std::array<std::string, 7>& stat_column_names();

struct StatModel {
  StatOptions options;
  FreqTable domain_freq;   // training corpus
  FreqTable general_freq;  // reference corpus
  RankTable domain_rank;
  RankTable general_rank;
  DefStats defstats;
  PositionStats posstats;
  CorpusDocStats docstats;
  // per feature: ascending quantile edges (n_bins - 1 of them) computed from
  // the training-set token-level value distribution
  std::map<std::string, std::vector<double>> bin_edges;

  std::string normalize(const std::string& word) const;
  std::string token_key(const Token& token, std::size_t key_index) const;
};

// training must be labeled. Throws LabelError / EmptyCorpusError /
// SchemaError per the corpus contract.
StatModel build_stat_model(const Corpus& training, const Corpus& general,
                           const StatOptions& options = {});

// r_D(w)/|V_D| - r_B(w)/|V_B|; +inf when w appears only in the domain
// corpus, -inf when only in the general one, ZeroUnseen when in neither.
FeatureValue termhood(const std::string& word, const StatModel& model);

long long tf_general(const std::string& word, const StatModel& model);
long long tf_domain(const std::string& word, const StatModel& model);

// (count in sentence / sentence length) * max(0, ln(N / (1 + df))).
// key_index names the sentence column holding the word forms (surface by
// default). PreconditionError when the word does not occur in the sentence.
double tfidf(const std::string& word, const Sentence& sentence, const StatModel& model,
             std::size_t key_index = 0);

// DF/|Defs| - NF/|Nodefs| with the same one-sided infinities as termhood.
FeatureValue def_prominence(const std::string& word, const StatModel& model);

// share of the candidate-term token mass at the given position; 0 when the
// word never appears there or the position corpus is empty
double definiendum_prominence(const std::string& word, const StatModel& model);
double definiens_prominence(const std::string& word, const StatModel& model);

// Maps a value onto {NEG_INF, B1..Bk, POS_INF, ZERO_UNSEEN}. Monotone over
// finite values; a value equal to a bin edge falls in the lower bin.
// Unknown feature names raise ConfigError.
std::string discretize(const FeatureValue& value, const std::string& feature,
                       const StatModel& model);
std::string discretize(double value, const std::string& feature, const StatModel& model);

// Appends (or, when already present, overwrites) the seven discretized
// feature columns; the label column stays last.
Corpus annotate_statistical_columns(const Corpus& corpus, const StatModel& model);

}  // namespace defext

#endif  // DEFEXT_STATFEAT_HPP
