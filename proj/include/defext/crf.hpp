// crf.hpp
// Linear-chain CRF over DEF/NODEF token labels: template-driven feature
// expansion with a context window, penalized maximum-likelihood training,
// Viterbi decoding, forward-backward marginals, and sentence-level
// classification with a confidence score.

#ifndef DEFEXT_CRF_HPP
#define DEFEXT_CRF_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "defext/corpus.hpp"
#include "defext/lbfgs.hpp"

namespace defext {

inline constexpr int kNumLabels = 2;  // Label::Def = 0, Label::Nodef = 1

// One unigram template: id plus (row offset, column index) references.
struct UnigramTemplate {
  std::string id;
  std::vector<std::pair<int, int>> refs;
};

struct TemplateSet {
  std::vector<UnigramTemplate> unigrams;
  bool bigram = false;   // label-transition features
  int window_radius = 2;
  std::string source;    // raw template text, kept for model persistence
};

// Template file syntax, one per line:
//   U<id>:%x[<row>,<col>](/%x[<row>,<col>])*
//   B               enables label-transition features
// Lines starting with # and blank lines are skipped. Row offsets must lie
// within [-window_radius, +window_radius]; column bounds are checked later,
// at expansion time, against the schema actually in use.
TemplateSet parse_templates(const std::string& text, int window_radius = 2);

// Per-position feature strings "<tid>=<v1>/<v2>...". References outside the
// sentence substitute _BOS_ / _EOS_. Column index >= schema size raises
// ExpansionError.
std::vector<std::vector<std::string>> expand_features(const Sentence& sentence,
                                                      const TemplateSet& templates,
                                                      const ColumnSchema& schema);

// Maps each expanded feature string to a key id; weight layout is
//   weights[key * kNumLabels + label]                      unigram block
//   weights[n_keys * kNumLabels + prev * kNumLabels + cur] transition block
// so every weight index corresponds to exactly one (key, label) or label
// pair. Frozen after the training-set scan.
struct FeatureIndex {
  std::unordered_map<std::string, std::int32_t> keys;
  std::vector<std::string> key_order;  // key id -> string

  std::size_t n_keys() const { return key_order.size(); }
  std::size_t n_weights(bool bigram) const {
    return n_keys() * kNumLabels + (bigram ? kNumLabels * kNumLabels : 0);
  }
  // existing id or -1
  std::int32_t find(const std::string& key) const {
    auto it = keys.find(key);
    return it == keys.end() ? -1 : it->second;
  }
  std::int32_t insert(const std::string& key) {
    auto [it, added] = keys.emplace(key, (std::int32_t)key_order.size());
    if (added) key_order.push_back(key);
    return it->second;
  }
};

struct TrainConfig {
  double l2_sigma = 10.0;    // Gaussian prior scale; larger = weaker penalty
  int max_iterations = 200;  // optimizer iteration cap
  double tolerance = 1e-4;   // gradient-norm stop, relative to max(1, ||w||)
  int window_radius = 2;
  int jobs = 1;              // worker threads for the batch gradient; results
                             // are identical for any value by construction
};

struct CrfModel {
  TemplateSet templates;
  FeatureIndex index;
  std::vector<double> weights;
  ColumnSchema schema;
  std::string schema_fingerprint;
  double l2_sigma = 10.0;
  bool converged = true;  // false when training hit the iteration cap

  double transition(int prev, int cur) const {
    if (!templates.bigram) return 0.0;
    return weights[index.n_keys() * kNumLabels + (std::size_t)prev * kNumLabels + cur];
  }
};

// L2-penalized conditional log-likelihood of the labeled corpus and its
// exact gradient (forward-backward, log-space). grad is resized and
// overwritten. jobs > 1 distributes sentences across threads; contributions
// are applied in sentence order, so the result is bit-identical to jobs=1.
double log_likelihood_and_gradient(const CrfModel& model, const Corpus& corpus,
                                   std::vector<double>& grad, int jobs = 1);

// Batch MLE fit. Requires a nonempty labeled corpus containing both labels
// (TrainingError otherwise). Deterministic for fixed corpus order and
// config. On hitting the iteration cap the model is still returned, with
// converged = false. Optimizer details land in *diagnostics when given.
CrfModel train(const Corpus& corpus, const TemplateSet& templates, const TrainConfig& config,
               LbfgsResult* diagnostics = nullptr);

// Argmax label sequence and its unnormalized joint score. Ties break toward
// the lexicographically smaller sequence (Def before Nodef), so a zero
// model decodes all-Def.
std::pair<std::vector<Label>, double> viterbi(const CrfModel& model, const Sentence& sentence);

// Per-position posterior over labels, indexed [position][label]; each row
// sums to 1 within 1e-9.
std::vector<std::vector<double>> marginals(const CrfModel& model, const Sentence& sentence);

// log of the partition function, i.e. the log-sum over all 2^n labelings of
// the unnormalized joint score.
double log_partition(const CrfModel& model, const Sentence& sentence);

struct Classification {
  Label label = Label::Nodef;
  double confidence = 0.0;  // mean marginal of the chosen label, normalized
                            // against the other label's mean; in [0.5, 1]
};

// Sentence label: Def iff the mean over positions of P(token = Def) exceeds
// 0.5; the exact tie goes to Nodef.
Classification classify_sentence(const CrfModel& model, const Sentence& sentence);

// Convenience batch driver; order matches the corpus. jobs > 1 scores
// sentences in parallel with results merged back by position.
std::vector<Classification> classify_corpus(const CrfModel& model, const Corpus& corpus,
                                            int jobs = 1);

// Versioned JSON persistence: schema + fingerprint, template source,
// feature keys in index order, weights. Load re-derives the fingerprint
// from the stored schema and rejects mismatches, as well as any size
// inconsistencies.
void save_model(const CrfModel& model, const std::string& path);
CrfModel load_model(const std::string& path);

// SchemaError unless the corpus schema matches the one the model was
// trained with.
void require_schema_match(const CrfModel& model, const ColumnSchema& schema);

}  // namespace defext

#endif  // DEFEXT_CRF_HPP
