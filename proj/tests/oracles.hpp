// oracles.hpp
// Reference results computed the slow, obvious way: exhaustive enumeration
// over label sequences, direct formula evaluation, counting. Nothing here
// reuses the library's dynamic programming, rank construction, or
// aggregation code paths; tests compare the two sides.

#ifndef DEFEXT_TESTS_ORACLES_HPP
#define DEFEXT_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "defext/corpus.hpp"
#include "defext/crf.hpp"

namespace oracles {

// ---- CRF by exhaustive enumeration ----------------------------------------

struct CrfEnum {
  double log_z = 0.0;
  std::vector<std::vector<double>> marginals;  // [position][label]
  std::vector<defext::Label> best_path;
  double best_score = 0.0;
};

// unnormalized log score of one labeling, read straight off the weights
inline double sequence_score(const defext::CrfModel& m,
                             const std::vector<std::vector<std::string>>& feats,
                             const std::vector<int>& ys) {
  double s = 0.0;
  for (std::size_t t = 0; t < feats.size(); ++t) {
    for (const std::string& f : feats[t]) {
      std::int32_t id = m.index.find(f);
      if (id >= 0) s += m.weights[(std::size_t)id * 2 + ys[t]];
    }
    if (m.templates.bigram && t > 0)
      s += m.weights[m.index.n_keys() * 2 + (std::size_t)ys[t - 1] * 2 + ys[t]];
  }
  return s;
}

inline CrfEnum enumerate_crf(const defext::CrfModel& m, const defext::Sentence& sentence) {
  auto feats = defext::expand_features(sentence, m.templates, m.schema);
  const std::size_t n = feats.size();
  const std::size_t total = (std::size_t)1 << n;

  CrfEnum out;
  std::vector<double> scores(total);
  std::vector<int> ys(n);
  double best = -HUGE_VAL;
  std::size_t best_idx = 0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    // bit for position t sits at n-1-t, so ascending idx walks label
    // sequences in lexicographic order with Def(0) first
    for (std::size_t t = 0; t < n; ++t) ys[t] = (int)((idx >> (n - 1 - t)) & 1u);
    scores[idx] = sequence_score(m, feats, ys);
    if (scores[idx] > best) {
      best = scores[idx];
      best_idx = idx;
    }
  }
  out.best_score = best;
  out.best_path.resize(n);
  for (std::size_t t = 0; t < n; ++t)
    out.best_path[t] = (defext::Label)((best_idx >> (n - 1 - t)) & 1u);

  double max_score = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - max_score);
  out.log_z = max_score + std::log(sum);

  out.marginals.assign(n, std::vector<double>(2, 0.0));
  for (std::size_t idx = 0; idx < total; ++idx) {
    double p = std::exp(scores[idx] - out.log_z);
    for (std::size_t t = 0; t < n; ++t) out.marginals[t][(idx >> (n - 1 - t)) & 1u] += p;
  }
  return out;
}

// ---- statistical feature formulas ------------------------------------------

enum class Ext { NegInf, Finite, PosInf, Unseen };
struct ExtValue {
  Ext kind = Ext::Unseen;
  double value = 0.0;
};

inline std::map<std::string, long long> count_tokens(const std::vector<std::string>& tokens) {
  std::map<std::string, long long> c;
  for (const auto& t : tokens) ++c[t];
  return c;
}

// ascending-frequency competition rank: 1 + number of words with a strictly
// smaller count
inline long long rank_by_counting(const std::map<std::string, long long>& counts,
                                  const std::string& word) {
  long long mine = counts.at(word);
  long long smaller = 0;
  for (const auto& [w, c] : counts)
    if (c < mine) ++smaller;
  return smaller + 1;
}

inline ExtValue termhood_oracle(const std::string& word,
                                const std::vector<std::string>& domain_tokens,
                                const std::vector<std::string>& general_tokens) {
  auto dom = count_tokens(domain_tokens);
  auto gen = count_tokens(general_tokens);
  bool in_dom = dom.count(word) > 0, in_gen = gen.count(word) > 0;
  if (!in_dom && !in_gen) return {Ext::Unseen, 0.0};
  if (in_dom && !in_gen) return {Ext::PosInf, 0.0};
  if (!in_dom && in_gen) return {Ext::NegInf, 0.0};
  // denominators are corpus sizes in tokens, not vocabulary sizes
  double rd = (double)rank_by_counting(dom, word) / (double)domain_tokens.size();
  double rb = (double)rank_by_counting(gen, word) / (double)general_tokens.size();
  return {Ext::Finite, rd - rb};
}

// sentences given as token lists with a DEF flag
struct FlaggedSentence {
  std::vector<std::string> tokens;
  bool is_def = false;
};

inline ExtValue def_prom_oracle(const std::string& word,
                                const std::vector<FlaggedSentence>& sentences) {
  long long df = 0, nf = 0, n_defs = 0, n_nodefs = 0;
  for (const auto& s : sentences) {
    bool contains = false;
    for (const auto& t : s.tokens)
      if (t == word) contains = true;
    (s.is_def ? n_defs : n_nodefs) += 1;
    if (contains) (s.is_def ? df : nf) += 1;
  }
  if (df == 0 && nf == 0) return {Ext::Unseen, 0.0};
  if (df > 0 && nf == 0) return {Ext::PosInf, 0.0};
  if (df == 0 && nf > 0) return {Ext::NegInf, 0.0};
  return {Ext::Finite, (double)df / (double)n_defs - (double)nf / (double)n_nodefs};
}

// tf-idf with each training sentence as one document
inline double tfidf_oracle(const std::string& word, const std::vector<std::string>& sentence,
                           const std::vector<std::vector<std::string>>& training_sentences) {
  long long in_sentence = 0;
  for (const auto& t : sentence)
    if (t == word) ++in_sentence;
  long long df = 0;
  for (const auto& doc : training_sentences) {
    for (const auto& t : doc)
      if (t == word) {
        ++df;
        break;
      }
  }
  double n_docs = (double)training_sentences.size();
  double idf = std::log(n_docs / (1.0 + (double)df));
  if (idf < 0.0) idf = 0.0;
  return ((double)in_sentence / (double)sentence.size()) * idf;
}

// share of candidate-term tokens (lex tag b-X/i-X of the requested zone)
// that are the given word
inline double position_prom_oracle(const std::string& word, bool definiendum,
                                   const std::vector<std::pair<std::string, std::string>>&
                                       token_lex_pairs) {
  const char zone = definiendum ? 'D' : 'd';
  long long total = 0, mine = 0;
  for (const auto& [token, lex] : token_lex_pairs) {
    if (lex.size() == 3 && (lex[0] == 'b' || lex[0] == 'i') && lex[1] == '-' && lex[2] == zone) {
      ++total;
      if (token == word) ++mine;
    }
  }
  return total == 0 ? 0.0 : (double)mine / (double)total;
}

}  // namespace oracles

#endif  // DEFEXT_TESTS_ORACLES_HPP
