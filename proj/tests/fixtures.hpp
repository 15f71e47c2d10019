// fixtures.hpp
// Shared test corpora: hand-written examples, separable training sets,
// seeded random generators, and the synthetic domain-adaptation setup.

#ifndef DEFEXT_TESTS_FIXTURES_HPP
#define DEFEXT_TESTS_FIXTURES_HPP

#include <random>
#include <string>
#include <vector>

#include "defext/corpus.hpp"
#include "defext/crf.hpp"
#include "defext/lexfeat.hpp"
#include "defext/statfeat.hpp"

namespace fixtures {

using defext::ColumnSchema;
using defext::Corpus;
using defext::Label;
using defext::Sentence;
using defext::Token;

inline Sentence sent(const std::vector<std::vector<std::string>>& rows,
                     std::optional<Label> label = std::nullopt) {
  Sentence s;
  s.label = label;
  for (const auto& r : rows) {
    Token t;
    t.columns = r;
    t.label = label;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

inline Corpus corpus(ColumnSchema schema, std::vector<Sentence> sentences, bool labeled) {
  Corpus c;
  c.schema = std::move(schema);
  c.sentences = std::move(sentences);
  c.labeled = labeled;
  return c;
}

// single-word sentences, handy for frequency fixtures
inline Corpus word_corpus(const std::vector<std::vector<std::string>>& sentences_of_words,
                          std::optional<Label> all_labels = std::nullopt) {
  std::vector<Sentence> out;
  for (const auto& words : sentences_of_words) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& w : words) rows.push_back({w});
    out.push_back(sent(rows, all_labels));
  }
  return corpus(ColumnSchema({"form"}), std::move(out), all_labels.has_value());
}

// the worked tagging example: form, pos, chunk
inline Sentence abwehr() {
  return sent({{"The", "DT", "O"},
               {"Abwehr", "NNP", "B-NP"},
               {"was", "VBD", "O"},
               {"a", "DT", "O"},
               {"German", "JJ", "B-NP"},
               {"intelligence", "NN", "I-NP"},
               {"organization", "NN", "I-NP"},
               {"from", "IN", "O"},
               {"1921", "CD", "O"},
               {"to", "TO", "O"},
               {"1944", "CD", "O"}});
}

inline ColumnSchema raw_schema() { return ColumnSchema({"form", "pos", "chunk"}); }

// ten one-column sentences a unigram model separates perfectly
inline Corpus separable_corpus() {
  auto def = [](std::vector<std::string> words) {
    std::vector<std::vector<std::string>> rows;
    for (auto& w : words) rows.push_back({w});
    return rows;
  };
  std::vector<Sentence> s;
  s.push_back(sent(def({"cat", "is", "a", "mammal"}), Label::Def));
  s.push_back(sent(def({"dog", "is", "a", "mammal"}), Label::Def));
  s.push_back(sent(def({"oak", "is", "a", "tree"}), Label::Def));
  s.push_back(sent(def({"iron", "is", "a", "metal"}), Label::Def));
  s.push_back(sent(def({"tango", "is", "a", "dance"}), Label::Def));
  s.push_back(sent(def({"run", "fast", "now"}), Label::Nodef));
  s.push_back(sent(def({"jump", "high", "today"}), Label::Nodef));
  s.push_back(sent(def({"walk", "slowly", "home"}), Label::Nodef));
  s.push_back(sent(def({"turn", "left", "twice"}), Label::Nodef));
  s.push_back(sent(def({"wait", "here", "quietly"}), Label::Nodef));
  return corpus(ColumnSchema({"form"}), std::move(s), true);
}

inline defext::TemplateSet unigram_context_templates() {
  return defext::parse_templates(
      "U00:%x[0,0]\n"
      "U01:%x[-1,0]\n"
      "U02:%x[1,0]\n"
      "B\n");
}

// ---- random CRF inputs ---------------------------------------------------

inline Corpus random_corpus(std::mt19937& rng, int n_sentences, int max_len, bool labeled) {
  static const std::vector<std::string> forms = {"w0", "w1", "w2", "w3", "w4",
                                                 "w5", "w6", "w7", "w8", "w9"};
  static const std::vector<std::string> col1 = {"p0", "p1", "p2", "p3", "p4"};
  static const std::vector<std::string> col2 = {"c0", "c1", "c2"};
  std::uniform_int_distribution<int> len(1, max_len);
  std::uniform_int_distribution<std::size_t> f(0, forms.size() - 1);
  std::uniform_int_distribution<std::size_t> p(0, col1.size() - 1);
  std::uniform_int_distribution<std::size_t> c(0, col2.size() - 1);
  std::uniform_int_distribution<int> lab(0, 1);

  std::vector<Sentence> sentences;
  for (int i = 0; i < n_sentences; ++i) {
    std::optional<Label> label;
    if (labeled) label = (Label)lab(rng);
    std::vector<std::vector<std::string>> rows;
    int n = len(rng);
    for (int t = 0; t < n; ++t) rows.push_back({forms[f(rng)], col1[p(rng)], col2[c(rng)]});
    sentences.push_back(sent(rows, label));
  }
  return corpus(ColumnSchema({"form", "c1", "c2"}), std::move(sentences), labeled);
}

inline defext::TemplateSet random_templates(std::mt19937& rng, int n_cols) {
  std::uniform_int_distribution<int> n_templates(1, 3);
  std::uniform_int_distribution<int> n_refs(1, 2);
  std::uniform_int_distribution<int> offset(-2, 2);
  std::uniform_int_distribution<int> column(0, n_cols - 1);
  std::uniform_int_distribution<int> coin(0, 1);

  std::string text;
  int k = n_templates(rng);
  for (int i = 0; i < k; ++i) {
    text += "U" + std::to_string(i) + ":";
    int r = n_refs(rng);
    for (int j = 0; j < r; ++j) {
      if (j) text += "/";
      text += "%x[" + std::to_string(offset(rng)) + "," + std::to_string(column(rng)) + "]";
    }
    text += "\n";
  }
  if (coin(rng)) text += "B\n";
  return defext::parse_templates(text);
}

// model whose feature index covers the given corpus, weights uniform in
// [-range, range]; l2_sigma is huge so the penalty term vanishes when a test
// wants raw likelihoods
inline defext::CrfModel random_model(std::mt19937& rng, const Corpus& support,
                                     const defext::TemplateSet& templates, double range = 2.0,
                                     double l2_sigma = 1e30) {
  defext::CrfModel m;
  m.templates = templates;
  m.schema = support.schema;
  m.schema_fingerprint = support.schema.fingerprint();
  m.l2_sigma = l2_sigma;
  for (const Sentence& s : support.sentences)
    for (const auto& row : defext::expand_features(s, templates, support.schema))
      for (const auto& fstr : row) m.index.insert(fstr);
  std::uniform_real_distribution<double> w(-range, range);
  m.weights.resize(m.index.n_weights(templates.bigram));
  for (double& v : m.weights) v = w(rng);
  return m;
}

// ---- synthetic domain-adaptation setup ------------------------------------
//
// Seed definitions follow "X is a <genus> with <object>", seed distractors
// "X is a <dnoun> near <dnoun>", sharing "is a" so those words carry no
// class signal. Target definitions use the variant "X is defined as a
// <genus> with <object>": its content words are known DEF cues, so early
// promotions pick it up, while "defined"/"as" are unseen in the seed. The
// held-out definitions keep the variant's skeleton but swap every content
// word for a fresh one and use the distractor cue "near", so the seed-only
// model firmly mislabels them until "defined as" outweighs that cue.

struct AdaptationFixture {
  Corpus seed, target, heldout;  // featurized: raw + lex + 7 stat columns
  Corpus general;                // raw one-column reference corpus
  defext::TemplateSet templates;
  defext::StatOptions stat_options;
  int n_target_defs = 0;
};

namespace detail {

inline const std::vector<std::string>& genus_pool() {
  static const std::vector<std::string> v = {"instrument", "protocol", "mechanism",
                                             "organism", "compound", "algorithm"};
  return v;
}
inline const std::vector<std::string>& object_pool() {
  static const std::vector<std::string> v = {"pressure", "signals", "temperature",
                                             "motion", "storage", "growth"};
  return v;
}
inline const std::vector<std::string>& dnoun_pool() {
  static const std::vector<std::string> v = {"riverbank", "doorway", "meadow", "alley",
                                             "harbor", "stairwell", "pavement", "cellar"};
  return v;
}

// X is a <n1> <mid> <n2> .
inline Sentence pattern(const std::string& term, const std::string& n1, const std::string& mid,
                        const std::string& n2, std::optional<Label> label) {
  return sent({{term, "NNP", "B-NP"},
               {"is", "VBZ", "O"},
               {"a", "DT", "B-NP"},
               {n1, "NN", "I-NP"},
               {mid, "IN", "O"},
               {n2, "NN", "B-NP"},
               {".", ".", "O"}},
              label);
}

// X is defined as a <n1> <mid> <n2> .
inline Sentence variant_pattern(const std::string& term, const std::string& n1,
                                const std::string& mid, const std::string& n2,
                                std::optional<Label> label) {
  return sent({{term, "NNP", "B-NP"},
               {"is", "VBZ", "O"},
               {"defined", "VBN", "O"},
               {"as", "IN", "O"},
               {"a", "DT", "B-NP"},
               {n1, "NN", "I-NP"},
               {mid, "IN", "O"},
               {n2, "NN", "B-NP"},
               {".", ".", "O"}},
              label);
}

// X is defined as a <n1> near <n2> . with fresh content nouns. The only
// content word a seed-trained model knows is the distractor cue "near", so
// these score as NODEF until "defined as" has been learned from promotions.
inline Sentence heldout_def(const std::string& term, const std::string& n1,
                            const std::string& n2) {
  return variant_pattern(term, n1, "near", n2, Label::Def);
}

}  // namespace detail

inline AdaptationFixture make_adaptation_fixture() {
  using namespace detail;
  AdaptationFixture fx;
  const auto& G = genus_pool();
  const auto& O = object_pool();
  const auto& D = dnoun_pool();

  std::vector<Sentence> seed;
  for (int i = 0; i < 50; ++i)
    seed.push_back(pattern("s" + std::to_string(i), G[i % G.size()], "with",
                           O[(i / G.size()) % O.size()], Label::Def));
  for (int i = 0; i < 50; ++i)
    seed.push_back(pattern("f" + std::to_string(i), D[i % D.size()], "near",
                           D[(i + 3) % D.size()], Label::Nodef));

  // pool distractors rotate their own mid words; "near" must stay a weak
  // seed-only cue or it drowns out "defined as" on the held-out set
  static const std::vector<std::string> pool_mids = {"behind", "beside", "around", "inside"};
  std::vector<Sentence> target;
  for (int i = 0; i < 100; ++i)
    target.push_back(variant_pattern("b" + std::to_string(i), G[i % G.size()], "with",
                                     O[(i / G.size()) % O.size()], std::nullopt));
  for (int i = 0; i < 400; ++i)
    target.push_back(pattern("t" + std::to_string(i), D[i % D.size()],
                             pool_mids[i % pool_mids.size()], D[(i + 5) % D.size()],
                             std::nullopt));

  std::vector<Sentence> heldout;
  for (int i = 0; i < 50; ++i)
    heldout.push_back(heldout_def("h" + std::to_string(i), "hg" + std::to_string(i % 7),
                                  "ho" + std::to_string(i % 5)));
  for (int i = 0; i < 50; ++i)
    heldout.push_back(pattern("n" + std::to_string(i), "hn" + std::to_string(i % 9), "near",
                              "hn" + std::to_string((i + 2) % 9), Label::Nodef));

  Corpus raw_seed = corpus(raw_schema(), std::move(seed), true);
  Corpus raw_target = corpus(raw_schema(), std::move(target), false);
  Corpus raw_heldout = corpus(raw_schema(), std::move(heldout), true);

  // general reference text: function words, distractor nouns, a little
  // domain vocabulary so termhood ranks have contrast
  std::vector<std::vector<std::string>> general_sents;
  for (int i = 0; i < 30; ++i)
    general_sents.push_back({"the", D[i % D.size()], "was", "near", "the",
                             D[(i + 1) % D.size()], i % 5 == 0 ? G[i % G.size()] : "street",
                             "."});
  fx.general = word_corpus(general_sents);

  fx.stat_options.key_column = "form";
  fx.stat_options.n_bins = 5;
  fx.stat_options.case_fold = true;
  fx.stat_options.lex_column = "lex";

  Corpus seed_lex = defext::annotate_lexicographic_column(raw_seed, "pos", "chunk", "lex");
  defext::StatModel sm = defext::build_stat_model(seed_lex, fx.general, fx.stat_options);
  fx.seed = defext::annotate_statistical_columns(seed_lex, sm);
  fx.target = defext::annotate_statistical_columns(
      defext::annotate_lexicographic_column(raw_target, "pos", "chunk", "lex"), sm);
  fx.heldout = defext::annotate_statistical_columns(
      defext::annotate_lexicographic_column(raw_heldout, "pos", "chunk", "lex"), sm);

  // forms with context, the lexicographic tag, and two statistical bins
  fx.templates = defext::parse_templates(
      "U00:%x[0,0]\n"
      "U01:%x[-1,0]\n"
      "U02:%x[1,0]\n"
      "U03:%x[0,3]\n"
      "U04:%x[0,4]\n"
      "U05:%x[0,8]\n"
      "U06:%x[-1,0]/%x[0,0]\n"
      "B\n");
  fx.n_target_defs = 100;
  return fx;
}

// pools for the promotion-arithmetic check: every sentence reuses seed
// vocabulary except its unique first token, so both labels always have
// confident candidates
struct ArithmeticFixture {
  Corpus seed, pool;
  defext::TemplateSet templates;
};

inline ArithmeticFixture make_arithmetic_fixture(int pool_per_label = 110) {
  using namespace detail;
  ArithmeticFixture fx;
  const auto& G = genus_pool();
  const auto& O = object_pool();
  const auto& D = dnoun_pool();

  auto one_col = [](const Sentence& rich, std::optional<Label> label) {
    std::vector<std::vector<std::string>> rows;
    for (const Token& t : rich.tokens) rows.push_back({t.columns[0]});
    return sent(rows, label);
  };

  std::vector<Sentence> seed;
  for (int i = 0; i < 25; ++i)
    seed.push_back(one_col(pattern("s" + std::to_string(i), G[i % G.size()], "with",
                                   O[i % O.size()], std::nullopt),
                           Label::Def));
  for (int i = 0; i < 25; ++i)
    seed.push_back(one_col(pattern("f" + std::to_string(i), D[i % D.size()], "near",
                                   D[(i + 3) % D.size()], std::nullopt),
                           Label::Nodef));

  std::vector<Sentence> pool;
  for (int i = 0; i < pool_per_label; ++i)
    pool.push_back(one_col(pattern("pd" + std::to_string(i), G[i % G.size()], "with",
                                   O[(i + 1) % O.size()], std::nullopt),
                           std::nullopt));
  for (int i = 0; i < pool_per_label; ++i)
    pool.push_back(one_col(pattern("pn" + std::to_string(i), D[i % D.size()], "near",
                                   D[(i + 1) % D.size()], std::nullopt),
                           std::nullopt));

  fx.seed = corpus(ColumnSchema({"form"}), std::move(seed), true);
  fx.pool = corpus(ColumnSchema({"form"}), std::move(pool), false);
  fx.templates = unigram_context_templates();
  return fx;
}

}  // namespace fixtures

#endif  // DEFEXT_TESTS_FIXTURES_HPP
