// defext: weakly supervised definition-extraction pipeline.
// Subcommands: featurize, train, classify, bootstrap, eval. Options come
// from an optional JSON config file plus flags; flags win. Exit codes:
// 0 success, 1 runtime failure, 2 configuration or usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "defext/bootstrap.hpp"
#include "defext/corpus.hpp"
#include "defext/crf.hpp"
#include "defext/errors.hpp"
#include "defext/eval.hpp"
#include "defext/lexfeat.hpp"
#include "defext/statfeat.hpp"

namespace fs = std::filesystem;
using defext::ConfigError;
using defext::Corpus;
using defext::IoError;

namespace {

struct Options {
  std::string config_path;
  std::string seed, target, general, templates_path, schema_path, workdir;
  std::string model_path, gold;
  int iterations = 100;
  double threshold = 0.9;
  int recompute_every = 0;  // 0 = never
  int promotions_per_label = 1;
  double l2_sigma = 10.0;
  int jobs = 1;
  bool resume = false;
  std::string key_column = "form";
  int n_bins = 5;
  bool word_case_fold = true;
  std::string pos_column = "pos", chunk_column = "chunk";
  int train_max_iterations = 200;
  double train_tolerance = 1e-4;
  int window_radius = 2;
  std::map<std::string, std::string> eval_datasets;  // name -> corpus path
};

void apply_config_file(Options& o, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "seed") o.seed = value.get<std::string>();
      else if (key == "target") o.target = value.get<std::string>();
      else if (key == "general_corpus_path") o.general = value.get<std::string>();
      else if (key == "templates") o.templates_path = value.get<std::string>();
      else if (key == "schema") o.schema_path = value.get<std::string>();
      else if (key == "workdir") o.workdir = value.get<std::string>();
      else if (key == "model") o.model_path = value.get<std::string>();
      else if (key == "gold") o.gold = value.get<std::string>();
      else if (key == "iterations") o.iterations = value.get<int>();
      else if (key == "threshold") o.threshold = value.get<double>();
      else if (key == "recompute_every")
        o.recompute_every = value.is_null() ? 0 : value.get<int>();
      else if (key == "promotions_per_label") o.promotions_per_label = value.get<int>();
      else if (key == "l2_sigma") o.l2_sigma = value.get<double>();
      else if (key == "jobs") o.jobs = value.get<int>();
      else if (key == "key_column") o.key_column = value.get<std::string>();
      else if (key == "n_bins") o.n_bins = value.get<int>();
      else if (key == "word_case_fold") o.word_case_fold = value.get<bool>();
      else if (key == "pos_column") o.pos_column = value.get<std::string>();
      else if (key == "chunk_column") o.chunk_column = value.get<std::string>();
      else if (key == "train_max_iterations") o.train_max_iterations = value.get<int>();
      else if (key == "train_tolerance") o.train_tolerance = value.get<double>();
      else if (key == "window_radius") o.window_radius = value.get<int>();
      else if (key == "eval_datasets")
        o.eval_datasets = value.get<std::map<std::string, std::string>>();
      else
        throw ConfigError(path + ": unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

defext::ColumnSchema load_schema(const std::string& path) {
  if (path.empty()) throw ConfigError("--schema is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open schema file " + path);
  nlohmann::json j;
  try {
    in >> j;
    auto names = j.is_array() ? j.get<std::vector<std::string>>()
                              : j.at("columns").get<std::vector<std::string>>();
    return defext::ColumnSchema(names);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Corpus load_corpus(const std::string& path, const defext::ColumnSchema& schema, bool labeled) {
  try {
    return defext::read_corpus_file(path, schema, labeled);
  } catch (const IoError&) {
    throw;
  } catch (const defext::Error& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

defext::TemplateSet load_templates(const Options& o) {
  if (o.templates_path.empty()) throw ConfigError("--templates is required");
  try {
    return defext::parse_templates(load_text(o.templates_path), o.window_radius);
  } catch (const defext::TemplateError& e) {
    throw ConfigError(o.templates_path + ": " + e.what());
  }
}

void require_workdir(Options& o) {
  if (o.workdir.empty()) {
    const char* env = std::getenv("DEFEXT_WORKDIR");
    if (env && *env) o.workdir = env;
  }
  if (o.workdir.empty()) throw ConfigError("--workdir (or DEFEXT_WORKDIR) is required");
  fs::create_directories(o.workdir);
}

void write_run_snapshot(const Options& o, const std::string& command) {
  nlohmann::json j;
  j["command"] = command;
  j["seed"] = o.seed;
  j["target"] = o.target;
  j["general_corpus_path"] = o.general;
  j["templates"] = o.templates_path;
  j["schema"] = o.schema_path;
  j["workdir"] = o.workdir;
  j["model"] = o.model_path;
  j["gold"] = o.gold;
  j["iterations"] = o.iterations;
  j["threshold"] = o.threshold;
  if (o.recompute_every > 0)
    j["recompute_every"] = o.recompute_every;
  else
    j["recompute_every"] = nullptr;
  j["promotions_per_label"] = o.promotions_per_label;
  j["l2_sigma"] = o.l2_sigma;
  j["jobs"] = o.jobs;
  j["resume"] = o.resume;
  j["key_column"] = o.key_column;
  j["n_bins"] = o.n_bins;
  j["word_case_fold"] = o.word_case_fold;
  j["pos_column"] = o.pos_column;
  j["chunk_column"] = o.chunk_column;
  j["train_max_iterations"] = o.train_max_iterations;
  j["train_tolerance"] = o.train_tolerance;
  j["window_radius"] = o.window_radius;
  j["eval_datasets"] = o.eval_datasets;

  std::ofstream out(fs::path(o.workdir) / "run.json", std::ios::binary);
  if (!out) throw IoError("cannot write run.json in " + o.workdir);
  out << j.dump(1) << '\n';
}

defext::StatOptions stat_options(const Options& o) {
  defext::StatOptions s;
  s.key_column = o.key_column;
  s.case_fold = o.word_case_fold;
  s.n_bins = o.n_bins;
  s.lex_column = "lex";
  return s;
}

defext::TrainConfig train_config(const Options& o) {
  defext::TrainConfig t;
  t.l2_sigma = o.l2_sigma;
  t.max_iterations = o.train_max_iterations;
  t.tolerance = o.train_tolerance;
  t.window_radius = o.window_radius;
  t.jobs = o.jobs;
  return t;
}

Corpus load_general(const Options& o) {
  if (o.general.empty())
    throw ConfigError("--general (general corpus path) is required for statistical features");
  return load_corpus(o.general, defext::ColumnSchema({o.key_column}), false);
}

// ---- featurize ----------------------------------------------------------

int cmd_featurize(Options& o) {
  require_workdir(o);
  write_run_snapshot(o, "featurize");
  if (o.seed.empty()) throw ConfigError("--seed is required");
  auto raw_schema = load_schema(o.schema_path);
  Corpus general = load_general(o);

  auto featurize_one = [&](const Corpus& corpus, const defext::StatModel& sm) {
    Corpus with_lex =
        defext::annotate_lexicographic_column(corpus, o.pos_column, o.chunk_column, "lex");
    return defext::annotate_statistical_columns(with_lex, sm);
  };

  Corpus seed = load_corpus(o.seed, raw_schema, true);
  Corpus seed_lex = defext::annotate_lexicographic_column(seed, o.pos_column, o.chunk_column, "lex");
  defext::StatModel sm = defext::build_stat_model(seed_lex, general, stat_options(o));
  Corpus seed_feat = defext::annotate_statistical_columns(seed_lex, sm);
  defext::write_corpus_file(seed_feat, (fs::path(o.workdir) / "seed.feat.cols").string());

  {
    nlohmann::json j;
    j["columns"] = seed_feat.schema.names();
    std::ofstream out(fs::path(o.workdir) / "schema.feat.json", std::ios::binary);
    if (!out) throw IoError("cannot write schema.feat.json in " + o.workdir);
    out << j.dump(1) << '\n';
  }

  if (!o.target.empty()) {
    Corpus target = load_corpus(o.target, raw_schema, false);
    defext::write_corpus_file(featurize_one(target, sm),
                              (fs::path(o.workdir) / "target.feat.cols").string());
  }
  for (const auto& [name, path] : o.eval_datasets) {
    Corpus ds = load_corpus(path, raw_schema, true);
    defext::write_corpus_file(featurize_one(ds, sm),
                              (fs::path(o.workdir) / (name + ".feat.cols")).string());
  }
  std::cout << "featurized corpora written to " << o.workdir << "\n";
  return 0;
}

// ---- train --------------------------------------------------------------

int cmd_train(Options& o) {
  require_workdir(o);
  write_run_snapshot(o, "train");
  if (o.seed.empty()) throw ConfigError("--seed is required");
  auto schema = load_schema(o.schema_path);
  Corpus training = load_corpus(o.seed, schema, true);
  auto templates = load_templates(o);

  defext::LbfgsResult diag;
  defext::CrfModel model = defext::train(training, templates, train_config(o), &diag);

  std::string out_path = o.model_path.empty() ? (fs::path(o.workdir) / "model.bin").string()
                                              : o.model_path;
  defext::save_model(model, out_path);
  std::cout << "penalized log-likelihood " << defext::format_double(-diag.objective) << " after "
            << diag.iterations << " iterations ("
            << (model.converged ? "converged" : "iteration cap reached") << ")\n"
            << "model written to " << out_path << "\n";
  return 0;
}

// ---- classify -----------------------------------------------------------

int cmd_classify(Options& o) {
  if (o.model_path.empty()) throw ConfigError("--model is required");
  if (o.target.empty()) throw ConfigError("--target is required");
  defext::CrfModel model = defext::load_model(o.model_path);
  Corpus corpus = load_corpus(o.target, model.schema, false);
  auto results = defext::classify_corpus(model, corpus, o.jobs);
  for (std::size_t i = 0; i < results.size(); ++i)
    std::cout << i << '\t' << defext::to_string(results[i].label) << '\t'
              << defext::format_double(results[i].confidence) << '\n';
  return 0;
}

// ---- bootstrap ----------------------------------------------------------

int cmd_bootstrap(Options& o) {
  require_workdir(o);
  if (defext::workdir_has_state(o.workdir) && !o.resume)
    throw ConfigError("workdir " + o.workdir +
                      " already holds a run (history.jsonl); pass --resume to continue it");
  write_run_snapshot(o, "bootstrap");
  if (o.seed.empty()) throw ConfigError("--seed is required");
  if (o.target.empty()) throw ConfigError("--target is required");
  auto schema = load_schema(o.schema_path);

  defext::BootstrapConfig cfg;
  cfg.max_iterations = o.iterations;
  cfg.confidence_threshold = o.threshold;
  cfg.promotions_per_label = o.promotions_per_label;
  if (o.recompute_every > 0) cfg.recompute_every = o.recompute_every;
  cfg.train = train_config(o);
  cfg.templates = load_templates(o);
  cfg.stat_options = stat_options(o);
  if (cfg.recompute_every) cfg.general_corpus = load_general(o);
  cfg.workdir = o.workdir;

  std::map<std::string, Corpus> heldout;
  for (const auto& [name, path] : o.eval_datasets) heldout.emplace(name, load_corpus(path, schema, true));
  defext::EvalHook hook = nullptr;
  if (!heldout.empty())
    hook = [&](int, const defext::CrfModel& m) {
      std::vector<defext::EvalScore> scores;
      for (const auto& [name, gold] : heldout)
        scores.push_back({name, defext::evaluate(m, gold, o.jobs)});
      return scores;
    };

  defext::BootstrapState state;
  if (o.resume && defext::workdir_has_state(o.workdir)) {
    state = defext::resume_bootstrap(cfg, hook);
  } else {
    Corpus seed = load_corpus(o.seed, schema, true);
    Corpus target = load_corpus(o.target, schema, false);
    state = defext::run_bootstrap(seed, target, cfg, hook);
  }

  if (!heldout.empty()) {
    std::vector<defext::IterationReport> rows;
    for (const defext::EvalScore& e : state.initial_eval)
      rows.push_back({0, e.dataset, e.prf, 0, 0});
    for (const defext::IterationRecord& rec : state.history) {
      long n_def = 0, n_nodef = 0;
      for (const auto& p : rec.promotions)
        (p.label == defext::Label::Def ? n_def : n_nodef) += 1;
      for (const defext::EvalScore& e : rec.eval)
        rows.push_back({rec.iteration, e.dataset, e.prf, n_def, n_nodef});
    }
    if (!rows.empty())
      defext::emit_report(rows, (fs::path(o.workdir) / "report.csv").string());
  }

  std::cout << "bootstrap finished after " << state.iteration << " iterations ("
            << (state.converged ? "converged" : "iteration cap") << "); training grew to "
            << state.training.sentences.size() << " sentences, " << state.target_pool.sentences.size()
            << " left in the pool\n";
  return 0;
}

// ---- eval ---------------------------------------------------------------

int cmd_eval(Options& o) {
  require_workdir(o);
  write_run_snapshot(o, "eval");
  if (o.model_path.empty()) throw ConfigError("--model is required");
  if (o.gold.empty()) throw ConfigError("--gold is required");
  defext::CrfModel model = defext::load_model(o.model_path);
  Corpus gold = load_corpus(o.gold, model.schema, true);
  defext::PRF prf = defext::evaluate(model, gold, o.jobs);

  char line[64];
  std::snprintf(line, sizeof(line), "P=%.3f R=%.3f F=%.3f", prf.precision, prf.recall,
                prf.f_score);
  std::cout << line << "\n";

  std::string dataset = fs::path(o.gold).stem().string();
  defext::emit_report({{0, dataset, prf, 0, 0}}, (fs::path(o.workdir) / "eval.csv").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;

  // config file first so command-line flags can override it
  try {
    for (int i = 1; i < argc; ++i) {
      std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) apply_config_file(o, argv[i + 1]);
      else if (arg.rfind("--config=", 0) == 0) apply_config_file(o, arg.substr(9));
    }
  } catch (const defext::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"weakly supervised definition extraction pipeline"};
  app.require_subcommand(1);

  std::string chosen;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "JSON config file; flags override its values");
    cmd->add_option("--workdir", o.workdir, "working directory (default: $DEFEXT_WORKDIR)");
    cmd->add_option("--jobs", o.jobs, "worker threads; results do not depend on it");
    cmd->callback([&chosen, cmd]() { chosen = cmd->get_name(); });
    return cmd;
  };

  auto* feat = add_common(app.add_subcommand(
      "featurize", "append lexicographic + statistical feature columns to raw corpora"));
  feat->add_option("--seed", o.seed, "labeled seed corpus (raw columns)");
  feat->add_option("--target", o.target, "unlabeled target corpus (raw columns)");
  feat->add_option("--general", o.general, "general-language corpus, one word column");
  feat->add_option("--schema", o.schema_path, "JSON schema of the raw corpora");

  auto* train = add_common(
      app.add_subcommand("train", "fit a CRF on a featurized labeled corpus"));
  train->add_option("--seed", o.seed, "featurized labeled corpus");
  train->add_option("--templates", o.templates_path, "feature template file");
  train->add_option("--schema", o.schema_path, "JSON schema of the featurized corpus");
  train->add_option("--model", o.model_path, "output model path (default workdir/model.bin)");
  train->add_option("--l2-sigma", o.l2_sigma, "Gaussian prior scale");

  auto* classify = add_common(
      app.add_subcommand("classify", "label each sentence of a corpus with a trained model"));
  classify->add_option("--model", o.model_path, "trained model file");
  classify->add_option("--target", o.target, "featurized corpus to classify");

  auto* boot = add_common(app.add_subcommand(
      "bootstrap", "self-training loop: promote confident sentences and retrain"));
  boot->add_option("--seed", o.seed, "featurized labeled seed corpus");
  boot->add_option("--target", o.target, "featurized unlabeled target corpus");
  boot->add_option("--general", o.general, "general corpus (needed with --recompute-every)");
  boot->add_option("--templates", o.templates_path, "feature template file");
  boot->add_option("--schema", o.schema_path, "JSON schema of the featurized corpora");
  boot->add_option("--iterations", o.iterations, "maximum bootstrap iterations");
  boot->add_option("--threshold", o.threshold, "confidence threshold in [0.5, 1]");
  boot->add_option("--recompute-every", o.recompute_every,
                   "rebuild statistical features every N iterations (0 = never)");
  boot->add_option("--promotions-per-label", o.promotions_per_label,
                   "sentences promoted per label per iteration");
  boot->add_option("--l2-sigma", o.l2_sigma, "Gaussian prior scale");
  boot->add_flag("--resume", o.resume, "continue an interrupted run from the workdir");

  auto* ev = add_common(
      app.add_subcommand("eval", "precision/recall/F of a model on a labeled corpus"));
  ev->add_option("--model", o.model_path, "trained model file");
  ev->add_option("--gold", o.gold, "featurized labeled gold corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (chosen == "featurize") return cmd_featurize(o);
    if (chosen == "train") return cmd_train(o);
    if (chosen == "classify") return cmd_classify(o);
    if (chosen == "bootstrap") return cmd_bootstrap(o);
    if (chosen == "eval") return cmd_eval(o);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const defext::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
