#include "defext/bootstrap.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "defext/errors.hpp"

namespace defext {

namespace fs = std::filesystem;

namespace {

void validate_config(const BootstrapConfig& c) {
  if (c.max_iterations < 0) throw ConfigError("max iterations must be >= 0");
  if (c.confidence_threshold < 0.5 || c.confidence_threshold > 1.0)
    throw ConfigError("confidence threshold must lie in [0.5, 1]");
  if (c.promotions_per_label < 1) throw ConfigError("promotions per label must be positive");
  if (c.recompute_every && *c.recompute_every < 1)
    throw ConfigError("recompute period must be >= 1");
  if (c.recompute_every && !c.general_corpus)
    throw ConfigError("statistical recomputation needs a general corpus");
}

fs::path wpath(const BootstrapConfig& c, const char* name) {
  return fs::path(c.workdir) / name;
}

nlohmann::json record_to_json(const IterationRecord& r) {
  nlohmann::json j;
  j["iteration"] = r.iteration;
  j["recomputed"] = r.recomputed;
  auto& promotions = j["promotions"] = nlohmann::json::array();
  for (const PromotionRecord& p : r.promotions)
    promotions.push_back({{"id", p.sentence_id},
                          {"label", to_string(p.label)},
                          {"confidence", p.confidence}});
  if (!r.eval.empty()) {
    auto& eval = j["eval"] = nlohmann::json::array();
    for (const EvalScore& e : r.eval)
      eval.push_back({{"dataset", e.dataset},
                      {"precision", e.prf.precision},
                      {"recall", e.prf.recall},
                      {"f_score", e.prf.f_score}});
  }
  return j;
}

IterationRecord record_from_json(const nlohmann::json& j) {
  IterationRecord r;
  r.iteration = j.at("iteration").get<int>();
  r.recomputed = j.at("recomputed").get<bool>();
  for (const auto& p : j.at("promotions")) {
    PromotionRecord rec;
    rec.iteration = r.iteration;
    rec.sentence_id = p.at("id").get<std::int64_t>();
    auto label = parse_label(p.at("label").get<std::string>());
    if (!label) throw IoError("history record with unknown label");
    rec.label = *label;
    rec.confidence = p.at("confidence").get<double>();
    r.promotions.push_back(rec);
  }
  if (j.contains("eval")) {
    for (const auto& e : j.at("eval")) {
      EvalScore s;
      s.dataset = e.at("dataset").get<std::string>();
      s.prf.precision = e.at("precision").get<double>();
      s.prf.recall = e.at("recall").get<double>();
      s.prf.f_score = e.at("f_score").get<double>();
      r.eval.push_back(std::move(s));
    }
  }
  return r;
}

void persist_config(const BootstrapConfig& c) {
  nlohmann::json j;
  j["max_iterations"] = c.max_iterations;
  j["confidence_threshold"] = c.confidence_threshold;
  j["promotions_per_label"] = c.promotions_per_label;
  if (c.recompute_every)
    j["recompute_every"] = *c.recompute_every;
  else
    j["recompute_every"] = nullptr;
  j["train"] = {{"l2_sigma", c.train.l2_sigma},
                {"max_iterations", c.train.max_iterations},
                {"tolerance", c.train.tolerance},
                {"window_radius", c.train.window_radius},
                {"jobs", c.train.jobs}};
  j["stat"] = {{"key_column", c.stat_options.key_column},
               {"case_fold", c.stat_options.case_fold},
               {"n_bins", c.stat_options.n_bins},
               {"lex_column", c.stat_options.lex_column}};
  j["templates"] = c.templates.source;

  std::ofstream out(wpath(c, "config.json"), std::ios::binary);
  if (!out) throw IoError("cannot write config.json in " + c.workdir);
  out << j.dump(1) << '\n';
}

void persist_state(const BootstrapState& s, const BootstrapConfig& c) {
  write_corpus_file(s.training, wpath(c, "train.cols").string());
  write_corpus_file(s.target_pool, wpath(c, "target.cols").string());
  save_model(s.model, wpath(c, "model.bin").string());
}

void append_history(const IterationRecord& r, const BootstrapConfig& c) {
  std::ofstream out(wpath(c, "history.jsonl"), std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to history.jsonl in " + c.workdir);
  out << record_to_json(r).dump() << '\n';
  if (!out.good()) throw IoError("failed writing history.jsonl");
}

void recompute_statistics(BootstrapState& state, const BootstrapConfig& config) {
  StatModel sm = build_stat_model(state.training, *config.general_corpus, config.stat_options);
  state.training = annotate_statistical_columns(state.training, sm);
  state.target_pool = annotate_statistical_columns(state.target_pool, sm);
  state.stat_model = std::move(sm);
}

}  // namespace

std::vector<ScoredSentence> score_target(const CrfModel& model, const Corpus& target_pool,
                                         const std::vector<std::int64_t>& target_ids, int jobs) {
  if (target_ids.size() != target_pool.sentences.size())
    throw PreconditionError("target ids out of step with the pool");
  auto classified = classify_corpus(model, target_pool, jobs);
  std::vector<ScoredSentence> out(classified.size());
  for (std::size_t i = 0; i < classified.size(); ++i)
    out[i] = {target_ids[i], classified[i].label, classified[i].confidence};
  return out;
}

std::pair<std::vector<ScoredSentence>, std::vector<ScoredSentence>> select_promotions(
    const std::vector<ScoredSentence>& scored, const BootstrapConfig& config) {
  auto pick = [&](Label want) {
    std::vector<ScoredSentence> side;
    for (const ScoredSentence& s : scored)
      if (s.label == want && s.confidence >= config.confidence_threshold) side.push_back(s);
    std::sort(side.begin(), side.end(), [](const ScoredSentence& a, const ScoredSentence& b) {
      if (a.confidence != b.confidence) return a.confidence > b.confidence;
      return a.id < b.id;
    });
    if ((int)side.size() > config.promotions_per_label)
      side.resize((std::size_t)config.promotions_per_label);
    return side;
  };
  return {pick(Label::Def), pick(Label::Nodef)};
}

void bootstrap_step(BootstrapState& state, const BootstrapConfig& config,
                    const EvalHook& eval_hook) {
  if (state.converged) return;
  const int iter = state.iteration + 1;

  auto scored = score_target(state.model, state.target_pool, state.target_ids, config.train.jobs);
  auto [defs, nodefs] = select_promotions(scored, config);

  IterationRecord rec;
  rec.iteration = iter;

  if (defs.empty() && nodefs.empty()) {
    state.converged = true;
    state.iteration = iter;
    state.history.push_back(std::move(rec));
    return;
  }

  std::vector<std::size_t> taken;
  auto promote = [&](const std::vector<ScoredSentence>& side) {
    for (const ScoredSentence& sc : side) {
      auto it = std::lower_bound(state.target_ids.begin(), state.target_ids.end(), sc.id);
      if (it == state.target_ids.end() || *it != sc.id)
        throw PreconditionError("promotion references a sentence not in the pool");
      std::size_t idx = (std::size_t)(it - state.target_ids.begin());
      Sentence s = state.target_pool.sentences[idx];
      s.label = sc.label;
      for (Token& tok : s.tokens) tok.label = sc.label;
      state.training.sentences.push_back(std::move(s));
      rec.promotions.push_back({iter, sc.id, sc.label, sc.confidence});
      taken.push_back(idx);
    }
  };
  promote(defs);
  promote(nodefs);

  std::sort(taken.begin(), taken.end());
  std::vector<Sentence> remaining;
  std::vector<std::int64_t> remaining_ids;
  remaining.reserve(state.target_pool.sentences.size() - taken.size());
  remaining_ids.reserve(remaining.capacity());
  std::size_t next_taken = 0;
  for (std::size_t i = 0; i < state.target_pool.sentences.size(); ++i) {
    if (next_taken < taken.size() && taken[next_taken] == i) {
      ++next_taken;
      continue;
    }
    remaining.push_back(std::move(state.target_pool.sentences[i]));
    remaining_ids.push_back(state.target_ids[i]);
  }
  state.target_pool.sentences = std::move(remaining);
  state.target_ids = std::move(remaining_ids);

  if (config.recompute_every && iter % *config.recompute_every == 0) {
    recompute_statistics(state, config);
    rec.recomputed = true;
  }

  state.model = train(state.training, config.templates, config.train);
  if (eval_hook) rec.eval = eval_hook(iter, state.model);

  state.iteration = iter;
  state.history.push_back(std::move(rec));
}

BootstrapState run_bootstrap(const Corpus& seed, const Corpus& target,
                             const BootstrapConfig& config, const EvalHook& eval_hook) {
  validate_config(config);
  if (!seed.labeled) throw PreconditionError("seed corpus must be labeled");
  if (target.sentences.empty()) throw EmptyCorpusError("target corpus is empty");
  if (!(seed.schema == target.schema))
    throw SchemaError("seed and target corpora use different schemas");

  const bool persist = !config.workdir.empty();
  if (persist) {
    fs::create_directories(config.workdir);
    persist_config(config);
    // a fresh run starts a fresh history
    std::error_code ec;
    fs::remove(wpath(config, "history.jsonl"), ec);
  }

  BootstrapState state;
  state.training = seed;
  state.target_pool = target;
  state.target_ids.resize(target.sentences.size());
  for (std::size_t i = 0; i < state.target_ids.size(); ++i)
    state.target_ids[i] = (std::int64_t)i;
  state.model = train(state.training, config.templates, config.train);
  if (eval_hook) state.initial_eval = eval_hook(0, state.model);

  if (persist) persist_state(state, config);

  for (int i = 0; i < config.max_iterations && !state.converged; ++i) {
    bootstrap_step(state, config, eval_hook);
    if (persist) {
      persist_state(state, config);
      append_history(state.history.back(), config);
    }
  }
  return state;
}

bool workdir_has_state(const std::string& workdir) {
  return !workdir.empty() && fs::exists(fs::path(workdir) / "history.jsonl");
}

BootstrapState resume_bootstrap(const BootstrapConfig& config, const EvalHook& eval_hook) {
  validate_config(config);
  if (config.workdir.empty()) throw ConfigError("resume needs a working directory");

  BootstrapState state;
  std::ifstream hist(wpath(config, "history.jsonl"), std::ios::binary);
  if (!hist) throw IoError("no history.jsonl in " + config.workdir + ", nothing to resume");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(hist, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      state.history.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("history.jsonl line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (state.history.empty()) throw IoError("history.jsonl is empty, nothing to resume");

  state.iteration = state.history.back().iteration;
  state.converged = state.history.back().promotions.empty();
  state.model = load_model(wpath(config, "model.bin").string());
  state.training =
      read_corpus_file(wpath(config, "train.cols").string(), state.model.schema, true);
  try {
    state.target_pool =
        read_corpus_file(wpath(config, "target.cols").string(), state.model.schema, false);
  } catch (const EmptyCorpusError&) {
    // the pool drained completely before the interruption
    state.target_pool.schema = state.model.schema;
    state.target_pool.labeled = false;
  }

  // promotions delete pool sentences in place, keeping relative order, so
  // the i-th remaining sentence carries the i-th smallest unused original id
  std::vector<std::int64_t> promoted;
  for (const IterationRecord& r : state.history)
    for (const PromotionRecord& p : r.promotions) promoted.push_back(p.sentence_id);
  std::sort(promoted.begin(), promoted.end());
  const std::int64_t original_size =
      (std::int64_t)(state.target_pool.sentences.size() + promoted.size());
  state.target_ids.reserve(state.target_pool.sentences.size());
  std::size_t skip = 0;
  for (std::int64_t id = 0; id < original_size; ++id) {
    if (skip < promoted.size() && promoted[skip] == id) {
      ++skip;
      continue;
    }
    state.target_ids.push_back(id);
  }
  if (state.target_ids.size() != state.target_pool.sentences.size())
    throw IoError("workdir state inconsistent: history does not match target.cols");

  for (int i = state.iteration; i < config.max_iterations && !state.converged; ++i) {
    bootstrap_step(state, config, eval_hook);
    persist_state(state, config);
    append_history(state.history.back(), config);
  }
  return state;
}

}  // namespace defext
