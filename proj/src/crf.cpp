#include "defext/crf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "defext/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace defext {

namespace {

constexpr int L = kNumLabels;

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// parses a decimal integer at p, advancing it
bool take_int(const char*& p, const char* end, int& out) {
  auto [next, ec] = std::from_chars(p, end, out);
  if (ec != std::errc()) return false;
  p = next;
  return true;
}

bool take_lit(const char*& p, const char* end, const char* lit) {
  for (; *lit; ++lit, ++p)
    if (p == end || *p != *lit) return false;
  return true;
}

// %x[row,col]
std::pair<int, int> parse_ref(const std::string& piece, std::size_t line_no) {
  const char* p = piece.data();
  const char* end = p + piece.size();
  int row = 0, col = 0;
  bool ok = take_lit(p, end, "%x[") && take_int(p, end, row) && take_lit(p, end, ",") &&
            take_int(p, end, col) && take_lit(p, end, "]") && p == end;
  if (!ok) throw TemplateError("malformed reference '" + piece + "', expected %x[row,col]", line_no);
  return {row, col};
}

}  // namespace

TemplateSet parse_templates(const std::string& text, int window_radius) {
  if (window_radius <= 0) throw ConfigError("window radius must be positive");
  TemplateSet ts;
  ts.window_radius = window_radius;
  ts.source = text;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::set<std::string> ids;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line == "B") {
      ts.bigram = true;
      continue;
    }
    if (line[0] != 'U')
      throw TemplateError("expected a U<id>:... template or the line 'B'", line_no);
    std::size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw TemplateError("missing ':' after template id", line_no);

    UnigramTemplate t;
    t.id = line.substr(0, colon);
    if (!ids.insert(t.id).second)
      throw TemplateError("duplicate template id '" + t.id + "'", line_no);

    std::string refs = line.substr(colon + 1);
    if (refs.empty()) throw TemplateError("template has no references", line_no);
    std::size_t start = 0;
    while (true) {
      std::size_t slash = refs.find('/', start);
      std::string piece = refs.substr(start, slash == std::string::npos ? slash : slash - start);
      auto [row, col] = parse_ref(piece, line_no);
      if (row < -window_radius || row > window_radius)
        throw TemplateError("row offset " + std::to_string(row) + " outside window ±" +
                                std::to_string(window_radius),
                            line_no);
      if (col < 0) throw TemplateError("negative column index", line_no);
      t.refs.emplace_back(row, col);
      if (slash == std::string::npos) break;
      start = slash + 1;
    }
    ts.unigrams.push_back(std::move(t));
  }
  return ts;
}

std::vector<std::vector<std::string>> expand_features(const Sentence& sentence,
                                                      const TemplateSet& templates,
                                                      const ColumnSchema& schema) {
  const int n = (int)sentence.tokens.size();
  std::vector<std::vector<std::string>> out((std::size_t)n);
  for (int t = 0; t < n; ++t) {
    auto& row = out[(std::size_t)t];
    row.reserve(templates.unigrams.size());
    for (const auto& u : templates.unigrams) {
      std::string f = u.id;
      f += '=';
      bool first = true;
      for (auto [r, c] : u.refs) {
        if ((std::size_t)c >= schema.size())
          throw ExpansionError("template " + u.id + " references column " + std::to_string(c) +
                               " on a " + std::to_string(schema.size()) + "-column schema");
        if (!first) f += '/';
        first = false;
        int i = t + r;
        if (i < 0) {
          f += "_BOS_";
        } else if (i >= n) {
          f += "_EOS_";
        } else {
          const auto& cols = sentence.tokens[(std::size_t)i].columns;
          if ((std::size_t)c >= cols.size())
            throw ExpansionError("token has " + std::to_string(cols.size()) +
                                 " columns, schema expects " + std::to_string(schema.size()));
          f += cols[(std::size_t)c];
        }
      }
      row.push_back(std::move(f));
    }
  }
  return out;
}

namespace {

// sentence reduced to known feature key ids; gold labels when labeled
struct Compiled {
  std::vector<std::vector<std::int32_t>> feats;
  std::vector<int> gold;
};

Compiled compile_sentence(const Sentence& s, const TemplateSet& templates,
                          const ColumnSchema& schema, const FeatureIndex& index, bool need_gold) {
  Compiled cs;
  auto expanded = expand_features(s, templates, schema);
  cs.feats.resize(expanded.size());
  for (std::size_t t = 0; t < expanded.size(); ++t) {
    for (const auto& f : expanded[t]) {
      std::int32_t id = index.find(f);
      if (id >= 0) cs.feats[t].push_back(id);
    }
  }
  if (need_gold) {
    cs.gold.reserve(s.tokens.size());
    for (const auto& tok : s.tokens) {
      if (!tok.label) throw PreconditionError("token missing gold label");
      cs.gold.push_back((int)*tok.label);
    }
  }
  return cs;
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -HUGE_VAL) return a;
  return a + std::log1p(std::exp(b - a));
}

// unary scores, flat [t * L + y]
std::vector<double> unary_scores(const Compiled& cs, const double* w) {
  const std::size_t n = cs.feats.size();
  std::vector<double> u(n * L, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::int32_t k : cs.feats[t])
      for (int y = 0; y < L; ++y) u[t * L + y] += w[(std::size_t)k * L + y];
  return u;
}

struct ForwardBackward {
  std::vector<double> alpha, beta;  // flat [t * L + y], log-space
  double log_z = 0.0;
};

ForwardBackward forward_backward(const std::vector<double>& u, const double* trans, std::size_t n) {
  ForwardBackward fb;
  fb.alpha.assign(n * L, 0.0);
  fb.beta.assign(n * L, 0.0);
  for (int y = 0; y < L; ++y) fb.alpha[y] = u[y];
  for (std::size_t t = 1; t < n; ++t)
    for (int y = 0; y < L; ++y) {
      double acc = -HUGE_VAL;
      for (int a = 0; a < L; ++a)
        acc = log_add(acc, fb.alpha[(t - 1) * L + a] + trans[a * L + y]);
      fb.alpha[t * L + y] = u[t * L + y] + acc;
    }
  for (std::size_t t = n - 1; t-- > 0;)
    for (int y = 0; y < L; ++y) {
      double acc = -HUGE_VAL;
      for (int b = 0; b < L; ++b)
        acc = log_add(acc, trans[y * L + b] + u[(t + 1) * L + b] + fb.beta[(t + 1) * L + b]);
      fb.beta[t * L + y] = acc;
    }
  fb.log_z = -HUGE_VAL;
  for (int y = 0; y < L; ++y) fb.log_z = log_add(fb.log_z, fb.alpha[(n - 1) * L + y]);
  return fb;
}

struct SentenceResult {
  double ll = 0.0;
  // (weight index, delta) pairs in a fixed order; applying them in this
  // order makes the batch gradient independent of the thread count
  std::vector<std::pair<std::int32_t, double>> contrib;
};

// conditional log-likelihood of the gold labeling plus the gradient
// contribution of one sentence (empirical minus expected counts)
SentenceResult sentence_kernel(const Compiled& cs, const double* w, std::size_t n_keys,
                               bool bigram) {
  const std::size_t n = cs.feats.size();
  SentenceResult res;

  double trans[L * L] = {0, 0, 0, 0};
  const std::size_t trans_base = n_keys * L;
  if (bigram)
    for (int i = 0; i < L * L; ++i) trans[i] = w[trans_base + (std::size_t)i];

  std::vector<double> u = unary_scores(cs, w);
  ForwardBackward fb = forward_backward(u, trans, n);

  double gold_score = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    gold_score += u[t * L + cs.gold[t]];
    if (bigram && t > 0) gold_score += trans[cs.gold[t - 1] * L + cs.gold[t]];
  }
  res.ll = gold_score - fb.log_z;

  for (std::size_t t = 0; t < n; ++t) {
    double marg[L];
    for (int y = 0; y < L; ++y)
      marg[y] = std::exp(fb.alpha[t * L + y] + fb.beta[t * L + y] - fb.log_z);
    for (std::int32_t k : cs.feats[t]) {
      res.contrib.emplace_back(k * L + cs.gold[t], 1.0);
      for (int y = 0; y < L; ++y) res.contrib.emplace_back(k * L + y, -marg[y]);
    }
  }
  if (bigram) {
    for (std::size_t t = 1; t < n; ++t) {
      res.contrib.emplace_back((std::int32_t)(trans_base + cs.gold[t - 1] * L + cs.gold[t]), 1.0);
      for (int a = 0; a < L; ++a)
        for (int b = 0; b < L; ++b) {
          double p = std::exp(fb.alpha[(t - 1) * L + a] + trans[a * L + b] + u[t * L + b] +
                              fb.beta[t * L + b] - fb.log_z);
          res.contrib.emplace_back((std::int32_t)(trans_base + a * L + b), -p);
        }
    }
  }
  return res;
}

// penalized log-likelihood over compiled sentences; grad must be presized.
// Contributions are always applied in sentence order, so the result is
// bit-identical for every jobs value.
double batch_ll_grad(const std::vector<Compiled>& sents, const double* w, std::size_t n_weights,
                     std::size_t n_keys, bool bigram, double l2_sigma, std::vector<double>& grad,
                     int jobs) {
  std::fill(grad.begin(), grad.end(), 0.0);
  double ll = 0.0;

  if (jobs <= 1) {
    for (const Compiled& cs : sents) {
      SentenceResult r = sentence_kernel(cs, w, n_keys, bigram);
      ll += r.ll;
      for (auto [idx, v] : r.contrib) grad[(std::size_t)idx] += v;
    }
  } else {
    std::vector<SentenceResult> results(sents.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) num_threads(jobs)
#endif
    for (long i = 0; i < (long)sents.size(); ++i)
      results[(std::size_t)i] = sentence_kernel(sents[(std::size_t)i], w, n_keys, bigram);
    for (const SentenceResult& r : results) {
      ll += r.ll;
      for (auto [idx, v] : r.contrib) grad[(std::size_t)idx] += v;
    }
  }

  const double inv_var = 1.0 / (l2_sigma * l2_sigma);
  for (std::size_t i = 0; i < n_weights; ++i) {
    ll -= 0.5 * w[i] * w[i] * inv_var;
    grad[i] -= w[i] * inv_var;
  }
  return ll;
}

std::vector<Compiled> compile_corpus(const Corpus& corpus, const TemplateSet& templates,
                                     const ColumnSchema& schema, const FeatureIndex& index,
                                     bool need_gold) {
  std::vector<Compiled> out;
  out.reserve(corpus.sentences.size());
  for (const Sentence& s : corpus.sentences)
    out.push_back(compile_sentence(s, templates, schema, index, need_gold));
  return out;
}

}  // namespace

double log_likelihood_and_gradient(const CrfModel& model, const Corpus& corpus,
                                   std::vector<double>& grad, int jobs) {
  if (!corpus.labeled) throw PreconditionError("log-likelihood needs a labeled corpus");
  require_schema_match(model, corpus.schema);
  auto sents = compile_corpus(corpus, model.templates, model.schema, model.index, true);
  grad.assign(model.weights.size(), 0.0);
  return batch_ll_grad(sents, model.weights.data(), model.weights.size(), model.index.n_keys(),
                       model.templates.bigram, model.l2_sigma, grad, jobs);
}

CrfModel train(const Corpus& corpus, const TemplateSet& templates, const TrainConfig& config,
               LbfgsResult* diagnostics) {
  if (config.l2_sigma <= 0 || config.max_iterations <= 0 || config.tolerance <= 0 ||
      config.window_radius <= 0)
    throw ConfigError("train config values must be positive");
  if (corpus.sentences.empty()) throw EmptyCorpusError("cannot train on an empty corpus");
  if (!corpus.labeled) throw PreconditionError("training corpus must be labeled");

  bool has_def = false, has_nodef = false;
  for (const Sentence& s : corpus.sentences) {
    if (s.label == Label::Def) has_def = true;
    if (s.label == Label::Nodef) has_nodef = true;
  }
  if (!has_def || !has_nodef)
    throw TrainingError(std::string("degenerate training set: only ") +
                        (has_def ? "DEF" : "NODEF") + " sentences present");

  CrfModel model;
  model.templates = templates;
  model.schema = corpus.schema;
  model.schema_fingerprint = corpus.schema.fingerprint();
  model.l2_sigma = config.l2_sigma;

  // freeze the feature index on a full training-set scan, first-seen order
  for (const Sentence& s : corpus.sentences)
    for (const auto& row : expand_features(s, templates, corpus.schema))
      for (const auto& f : row) model.index.insert(f);

  const std::size_t n_weights = model.index.n_weights(templates.bigram);
  model.weights.assign(n_weights, 0.0);

  auto sents = compile_corpus(corpus, templates, corpus.schema, model.index, true);

  const std::size_t n_keys = model.index.n_keys();
  const bool bigram = templates.bigram;
  const double sigma = config.l2_sigma;
  const int jobs = config.jobs;
  auto objective = [&](const std::vector<double>& x, std::vector<double>& g) {
    double ll = batch_ll_grad(sents, x.data(), x.size(), n_keys, bigram, sigma, g, jobs);
    for (double& v : g) v = -v;
    return -ll;
  };

  LbfgsOptions opts;
  opts.max_iterations = config.max_iterations;
  opts.tolerance = config.tolerance;
  LbfgsResult result = lbfgs_minimize(model.weights, objective, opts);
  model.converged = result.converged;
  if (diagnostics) *diagnostics = result;

  for (double v : model.weights)
    if (!std::isfinite(v)) throw TrainingError("non-finite weight after optimization");
  return model;
}

namespace {

void check_sentence(const CrfModel& model, const Sentence& sentence) {
  if (sentence.tokens.empty()) throw PreconditionError("empty sentence");
  for (const Token& t : sentence.tokens)
    if (t.columns.size() != model.schema.size())
      throw ModelError("sentence has " + std::to_string(t.columns.size()) +
                       "-column tokens, model expects " + std::to_string(model.schema.size()));
}

}  // namespace

std::pair<std::vector<Label>, double> viterbi(const CrfModel& model, const Sentence& sentence) {
  check_sentence(model, sentence);
  Compiled cs = compile_sentence(sentence, model.templates, model.schema, model.index, false);
  const std::size_t n = cs.feats.size();
  std::vector<double> u = unary_scores(cs, model.weights.data());

  double trans[L * L];
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b) trans[a * L + b] = model.transition(a, b);

  // best[t][y] = best score of a suffix starting at t with label y; picking
  // the smallest maximizing label while walking forward yields the
  // lexicographically smallest argmax sequence (Def sorts first)
  std::vector<double> best(n * L);
  for (int y = 0; y < L; ++y) best[(n - 1) * L + y] = u[(n - 1) * L + y];
  for (std::size_t t = n - 1; t-- > 0;)
    for (int y = 0; y < L; ++y) {
      double m = -HUGE_VAL;
      for (int b = 0; b < L; ++b) m = std::max(m, trans[y * L + b] + best[(t + 1) * L + b]);
      best[t * L + y] = u[t * L + y] + m;
    }

  std::vector<Label> path(n);
  double total = std::max(best[0], best[1]);
  int prev = best[0] == total ? 0 : 1;
  path[0] = (Label)prev;
  for (std::size_t t = 1; t < n; ++t) {
    double m = -HUGE_VAL;
    for (int y = 0; y < L; ++y) m = std::max(m, trans[prev * L + y] + best[t * L + y]);
    int pick = trans[prev * L + 0] + best[t * L + 0] == m ? 0 : 1;
    path[t] = (Label)pick;
    prev = pick;
  }
  return {std::move(path), total};
}

std::vector<std::vector<double>> marginals(const CrfModel& model, const Sentence& sentence) {
  check_sentence(model, sentence);
  Compiled cs = compile_sentence(sentence, model.templates, model.schema, model.index, false);
  const std::size_t n = cs.feats.size();
  std::vector<double> u = unary_scores(cs, model.weights.data());

  double trans[L * L];
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b) trans[a * L + b] = model.transition(a, b);

  ForwardBackward fb = forward_backward(u, trans, n);
  std::vector<std::vector<double>> out(n, std::vector<double>(L, 0.0));
  for (std::size_t t = 0; t < n; ++t)
    for (int y = 0; y < L; ++y)
      out[t][(std::size_t)y] = std::exp(fb.alpha[t * L + y] + fb.beta[t * L + y] - fb.log_z);
  return out;
}

double log_partition(const CrfModel& model, const Sentence& sentence) {
  check_sentence(model, sentence);
  Compiled cs = compile_sentence(sentence, model.templates, model.schema, model.index, false);
  std::vector<double> u = unary_scores(cs, model.weights.data());

  double trans[L * L];
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b) trans[a * L + b] = model.transition(a, b);

  return forward_backward(u, trans, cs.feats.size()).log_z;
}

Classification classify_sentence(const CrfModel& model, const Sentence& sentence) {
  auto m = marginals(model, sentence);
  double mean_def = 0.0, mean_nodef = 0.0;
  for (const auto& row : m) {
    mean_def += row[(std::size_t)Label::Def];
    mean_nodef += row[(std::size_t)Label::Nodef];
  }

  // both means go through identical arithmetic, so an indifferent model
  // produces an exact tie; normalizing pins the tie confidence at 0.5
  Classification c;
  c.label = mean_def > mean_nodef ? Label::Def : Label::Nodef;
  double chosen = c.label == Label::Def ? mean_def : mean_nodef;
  c.confidence = chosen / (mean_def + mean_nodef);
  return c;
}

std::vector<Classification> classify_corpus(const CrfModel& model, const Corpus& corpus,
                                            int jobs) {
  require_schema_match(model, corpus.schema);
  std::vector<Classification> out(corpus.sentences.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < corpus.sentences.size(); ++i)
      out[i] = classify_sentence(model, corpus.sentences[i]);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(jobs)
#endif
    for (long i = 0; i < (long)corpus.sentences.size(); ++i)
      out[(std::size_t)i] = classify_sentence(model, corpus.sentences[(std::size_t)i]);
  }
  return out;
}

void require_schema_match(const CrfModel& model, const ColumnSchema& schema) {
  if (!(model.schema == schema))
    throw SchemaError("corpus schema does not match the schema the model was trained with");
}

namespace {
constexpr const char* kModelFormat = "defext-crf-model";
constexpr int kModelVersion = 1;
}  // namespace

void save_model(const CrfModel& model, const std::string& path) {
  for (double v : model.weights)
    if (!std::isfinite(v)) throw ModelError("refusing to save non-finite weights");

  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["schema"] = model.schema.names();
  j["schema_fingerprint"] = model.schema_fingerprint;
  j["l2_sigma"] = model.l2_sigma;
  j["converged"] = model.converged;
  j["window_radius"] = model.templates.window_radius;
  j["templates"] = model.templates.source;
  j["feature_keys"] = model.index.key_order;
  j["weights"] = model.weights;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(1) << '\n';
  if (!out.good()) throw IoError("failed writing " + path);
}

CrfModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(path + ": not a model file (" + e.what() + ")");
  }

  try {
    if (j.at("format").get<std::string>() != kModelFormat)
      throw ModelError(path + ": unrecognized model format");
    if (j.at("version").get<int>() != kModelVersion)
      throw ModelError(path + ": unsupported model version");

    CrfModel model;
    model.schema = ColumnSchema(j.at("schema").get<std::vector<std::string>>());
    model.schema_fingerprint = j.at("schema_fingerprint").get<std::string>();
    if (model.schema.fingerprint() != model.schema_fingerprint)
      throw ModelError(path + ": schema fingerprint mismatch");
    model.l2_sigma = j.at("l2_sigma").get<double>();
    model.converged = j.at("converged").get<bool>();
    model.templates =
        parse_templates(j.at("templates").get<std::string>(), j.at("window_radius").get<int>());
    for (const auto& key : j.at("feature_keys").get<std::vector<std::string>>())
      model.index.insert(key);
    model.weights = j.at("weights").get<std::vector<double>>();
    if (model.weights.size() != model.index.n_weights(model.templates.bigram))
      throw ModelError(path + ": weight vector length does not match the feature index");
    for (double v : model.weights)
      if (!std::isfinite(v)) throw ModelError(path + ": non-finite weight");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(path + ": " + e.what());
  }
}

}  // namespace defext
