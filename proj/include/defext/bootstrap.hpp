// bootstrap.hpp
// Self-training loop: train on the seed corpus, score the unlabeled target
// pool, move the highest-confidence DEF and NODEF sentences into training,
// retrain, repeat until nothing clears the confidence threshold or the
// iteration cap is reached. Statistical feature columns can be rebuilt
// every N iterations from the growing training corpus.

#ifndef DEFEXT_BOOTSTRAP_HPP
#define DEFEXT_BOOTSTRAP_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "defext/corpus.hpp"
#include "defext/crf.hpp"
#include "defext/eval.hpp"
#include "defext/statfeat.hpp"

namespace defext {

struct BootstrapConfig {
  int max_iterations = 100;           // 0 trains the seed model and stops
  double confidence_threshold = 0.9;  // in [0.5, 1]
  int promotions_per_label = 1;
  // rebuild the statistical feature columns of both corpora whenever the
  // iteration number is a multiple of this; requires general_corpus
  std::optional<int> recompute_every;
  TrainConfig train;
  TemplateSet templates;
  StatOptions stat_options;
  std::optional<Corpus> general_corpus;
  // when nonempty, latest corpora + model + history are persisted here
  std::string workdir;
};

struct ScoredSentence {
  std::int64_t id = 0;  // position in the original target corpus
  Label label = Label::Nodef;
  double confidence = 0.0;
};

struct PromotionRecord {
  int iteration = 0;
  std::int64_t sentence_id = 0;
  Label label = Label::Nodef;
  double confidence = 0.0;
};

struct EvalScore {
  std::string dataset;
  PRF prf;
};

struct IterationRecord {
  int iteration = 0;
  std::vector<PromotionRecord> promotions;  // empty on the converging pass
  bool recomputed = false;
  std::vector<EvalScore> eval;
};

struct BootstrapState {
  Corpus training;
  Corpus target_pool;
  std::vector<std::int64_t> target_ids;  // aligned with target_pool.sentences
  int iteration = 0;                     // completed steps
  CrfModel model;
  std::optional<StatModel> stat_model;   // present after a recomputation
  std::vector<IterationRecord> history;
  std::vector<EvalScore> initial_eval;   // hook output for the seed-only model
  bool converged = false;
};

// called after each retrain; return value lands in the iteration record
using EvalHook = std::function<std::vector<EvalScore>(int iteration, const CrfModel& model)>;

// one entry per pool sentence, in pool order
std::vector<ScoredSentence> score_target(const CrfModel& model, const Corpus& target_pool,
                                         const std::vector<std::int64_t>& target_ids,
                                         int jobs = 1);

// top candidates at or above the threshold, per label: confidence
// descending, ties to the lower sentence id, truncated to
// promotions_per_label; either side may come back empty
std::pair<std::vector<ScoredSentence>, std::vector<ScoredSentence>> select_promotions(
    const std::vector<ScoredSentence>& scored, const BootstrapConfig& config);

// score, promote, optionally rebuild statistical columns, retrain, append
// history. A step with nothing to promote sets converged; stepping a
// converged state is a no-op.
void bootstrap_step(BootstrapState& state, const BootstrapConfig& config,
                    const EvalHook& eval_hook = nullptr);

// full loop; seed needs both labels, target must be nonempty
BootstrapState run_bootstrap(const Corpus& seed, const Corpus& target,
                             const BootstrapConfig& config, const EvalHook& eval_hook = nullptr);

// continue an interrupted run from config.workdir (train.cols, target.cols,
// model.bin, history.jsonl); finishes the remaining iterations up to
// config.max_iterations
BootstrapState resume_bootstrap(const BootstrapConfig& config, const EvalHook& eval_hook = nullptr);

// true when the workdir already holds run state (used for the CLI's
// refuse-without-resume safety check)
bool workdir_has_state(const std::string& workdir);

}  // namespace defext

#endif  // DEFEXT_BOOTSTRAP_HPP
