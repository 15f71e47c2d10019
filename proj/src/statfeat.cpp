#include "defext/statfeat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "defext/lexfeat.hpp"

namespace defext {

double FeatureValue::value() const {
  switch (kind_) {
    case Kind::NegInf: return -HUGE_VAL;
    case Kind::PosInf: return HUGE_VAL;
    case Kind::ZeroUnseen: return 0.0;
    case Kind::Finite: return value_;
  }
  return value_;
}

long long FreqTable::count(const std::string& word) const {
  auto it = counts.find(word);
  return it == counts.end() ? 0 : it->second;
}

long long RankTable::rank_of(const std::string& word) const {
  auto it = rank.find(word);
  return it == rank.end() ? 0 : it->second;
}

RankTable build_rank_table(const FreqTable& freq) {
  // sort (count, word) ascending; ties share the minimum rank of the group
  std::vector<std::pair<long long, const std::string*>> order;
  order.reserve(freq.counts.size());
  for (const auto& [word, count] : freq.counts) order.emplace_back(count, &word);
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first < b.first;
              return *a.second < *b.second;
            });

  RankTable table;
  long long group_rank = 0;
  long long prev_count = -1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i].first != prev_count) {
      group_rank = static_cast<long long>(i) + 1;
      prev_count = order[i].first;
    }
    table.rank[*order[i].second] = group_rank;
  }
  return table;
}

const std::array<std::string, 7>& stat_column_names() {
  static const std::array<std::string, 7> names = {
      "termhood", "tf-gen", "tf-dom", "tfidf", "def_prom", "D_prom", "d_prom"};
  return names;
}

std::string StatModel::normalize(const std::string& word) const {
  if (!options.case_fold) return word;
  std::string out = word;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string StatModel::token_key(const Token& token, std::size_t key_index) const {
  return normalize(token.columns.at(key_index));
}

namespace {

FreqTable build_freq_table(const Corpus& corpus, std::size_t key_index, const StatModel& model) {
  FreqTable table;
  for (const auto& sent : corpus.sentences) {
    for (const auto& tok : sent.tokens) {
      ++table.counts[model.token_key(tok, key_index)];
      ++table.total_tokens;
    }
  }
  table.vocab_size = static_cast<long long>(table.counts.size());
  return table;
}

bool is_term_tag(const std::string& lex, Zone zone) {
  // b-D / i-D for the definiendum zone, b-d / i-d for the definiens zone
  if (lex.size() != 3 || lex[1] != '-') return false;
  if (lex[0] != 'b' && lex[0] != 'i') return false;
  return lex[2] == (zone == Zone::Definiendum ? 'D' : 'd');
}

std::vector<double> quantile_edges(std::vector<double> values, int n_bins) {
  std::vector<double> edges;
  if (values.empty() || n_bins < 2) return edges;
  std::sort(values.begin(), values.end());
  const long long n = static_cast<long long>(values.size());
  for (int i = 1; i < n_bins; ++i) {
    // nearest-rank quantile at i/n_bins
    long long r = (n * i + n_bins - 1) / n_bins;  // ceil(n*i/k)
    edges.push_back(values[static_cast<std::size_t>(r - 1)]);
  }
  return edges;
}

}  // namespace

StatModel build_stat_model(const Corpus& training, const Corpus& general,
                           const StatOptions& options) {
  if (!training.labeled) throw LabelError("training corpus must be labeled");
  if (training.sentences.empty()) throw EmptyCorpusError("training corpus is empty");
  if (general.sentences.empty()) throw EmptyCorpusError("general corpus is empty");

  StatModel model;
  model.options = options;

  const std::size_t train_key = training.schema.require(options.key_column);
  const std::size_t general_key = general.schema.require(options.key_column);

  model.domain_freq = build_freq_table(training, train_key, model);
  model.general_freq = build_freq_table(general, general_key, model);
  model.domain_rank = build_rank_table(model.domain_freq);
  model.general_rank = build_rank_table(model.general_freq);

  // sentence-membership counts
  model.docstats.n_sentences = static_cast<long long>(training.n_sentences());
  for (const auto& sent : training.sentences) {
    const bool is_def = (*sent.label == Label::Def);
    (is_def ? model.defstats.n_defs : model.defstats.n_nodefs) += 1;
    std::set<std::string> distinct;
    for (const auto& tok : sent.tokens) distinct.insert(model.token_key(tok, train_key));
    for (const auto& w : distinct) {
      ++model.docstats.sentence_doc_freq[w];
      ++(is_def ? model.defstats.def_doc_freq : model.defstats.nodef_doc_freq)[w];
    }
  }

  // candidate-term position counts from the lexicographic column, when present
  int lex_idx = training.schema.index_of(options.lex_column);
  if (lex_idx >= 0) {
    for (const auto& sent : training.sentences) {
      for (const auto& tok : sent.tokens) {
        const std::string& lex = tok.columns[static_cast<std::size_t>(lex_idx)];
        const std::string key = model.token_key(tok, train_key);
        if (is_term_tag(lex, Zone::Definiendum)) {
          ++model.posstats.definiendum_occurrences[key];
          ++model.posstats.definiendum_total;
        } else if (is_term_tag(lex, Zone::Definiens)) {
          ++model.posstats.definiens_occurrences[key];
          ++model.posstats.definiens_total;
        }
      }
    }
  }

  // quantile edges from the training-set token-level value distributions
  std::map<std::string, std::vector<double>> samples;
  for (const auto& name : stat_column_names()) samples[name];
  for (const auto& sent : training.sentences) {
    for (const auto& tok : sent.tokens) {
      const std::string key = model.token_key(tok, train_key);
      FeatureValue th = termhood(key, model);
      if (th.is_finite()) samples["termhood"].push_back(th.value());
      samples["tf-gen"].push_back(static_cast<double>(tf_general(key, model)));
      samples["tf-dom"].push_back(static_cast<double>(tf_domain(key, model)));
      samples["tfidf"].push_back(tfidf(key, sent, model, train_key));
      FeatureValue dp = def_prominence(key, model);
      if (dp.is_finite()) samples["def_prom"].push_back(dp.value());
      samples["D_prom"].push_back(definiendum_prominence(key, model));
      samples["d_prom"].push_back(definiens_prominence(key, model));
    }
  }
  for (auto& [name, values] : samples)
    model.bin_edges[name] = quantile_edges(std::move(values), options.n_bins);

  return model;
}

FeatureValue termhood(const std::string& word, const StatModel& model) {
  const std::string w = model.normalize(word);
  const bool in_domain = model.domain_freq.count(w) > 0;
  const bool in_general = model.general_freq.count(w) > 0;
  if (in_domain && in_general) {
    double rd = static_cast<double>(model.domain_rank.rank_of(w));
    double rb = static_cast<double>(model.general_rank.rank_of(w));
    return FeatureValue::finite(rd / static_cast<double>(model.domain_freq.total_tokens) -
                                rb / static_cast<double>(model.general_freq.total_tokens));
  }
  if (in_domain) return FeatureValue::pos_inf();
  if (in_general) return FeatureValue::neg_inf();
  return FeatureValue::zero_unseen();
}

long long tf_general(const std::string& word, const StatModel& model) {
  return model.general_freq.count(model.normalize(word));
}

long long tf_domain(const std::string& word, const StatModel& model) {
  return model.domain_freq.count(model.normalize(word));
}

double tfidf(const std::string& word, const Sentence& sentence, const StatModel& model,
             std::size_t key_index) {
  const std::string w = model.normalize(word);
  long long in_sentence = 0;
  for (const auto& tok : sentence.tokens)
    if (model.token_key(tok, key_index) == w) ++in_sentence;
  if (in_sentence == 0)
    throw PreconditionError("tfidf: word '" + word + "' does not occur in the sentence");

  const double tf = static_cast<double>(in_sentence) / static_cast<double>(sentence.size());
  auto it = model.docstats.sentence_doc_freq.find(w);
  const long long df = it == model.docstats.sentence_doc_freq.end() ? 0 : it->second;
  const double idf =
      std::log(static_cast<double>(model.docstats.n_sentences) / (1.0 + static_cast<double>(df)));
  return tf * std::max(0.0, idf);
}

FeatureValue def_prominence(const std::string& word, const StatModel& model) {
  const std::string w = model.normalize(word);
  auto get = [](const std::unordered_map<std::string, long long>& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? 0ll : it->second;
  };
  const long long df = get(model.defstats.def_doc_freq, w);
  const long long nf = get(model.defstats.nodef_doc_freq, w);
  if (df > 0 && nf > 0)
    return FeatureValue::finite(static_cast<double>(df) / static_cast<double>(model.defstats.n_defs) -
                                static_cast<double>(nf) / static_cast<double>(model.defstats.n_nodefs));
  if (df > 0) return FeatureValue::pos_inf();
  if (nf > 0) return FeatureValue::neg_inf();
  return FeatureValue::zero_unseen();
}

namespace {

double position_prominence(const std::string& word, const StatModel& model,
                           const std::unordered_map<std::string, long long>& occurrences,
                           long long total) {
  if (total == 0) return 0.0;
  auto it = occurrences.find(model.normalize(word));
  if (it == occurrences.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total);
}

}  // namespace

double definiendum_prominence(const std::string& word, const StatModel& model) {
  return position_prominence(word, model, model.posstats.definiendum_occurrences,
                             model.posstats.definiendum_total);
}

double definiens_prominence(const std::string& word, const StatModel& model) {
  return position_prominence(word, model, model.posstats.definiens_occurrences,
                             model.posstats.definiens_total);
}

std::string discretize(const FeatureValue& value, const std::string& feature,
                       const StatModel& model) {
  auto it = model.bin_edges.find(feature);
  if (it == model.bin_edges.end())
    throw ConfigError("no binning for feature '" + feature + "'");
  switch (value.kind()) {
    case FeatureValue::Kind::NegInf: return "NEG_INF";
    case FeatureValue::Kind::PosInf: return "POS_INF";
    case FeatureValue::Kind::ZeroUnseen: return "ZERO_UNSEEN";
    case FeatureValue::Kind::Finite: break;
  }
  const std::vector<double>& edges = it->second;
  const double v = value.value();
  // left-closed: a value equal to an edge falls in the lower bin
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (v <= edges[i]) return "B" + std::to_string(i + 1);
  return "B" + std::to_string(model.options.n_bins);
}

std::string discretize(double value, const std::string& feature, const StatModel& model) {
  return discretize(FeatureValue::finite(value), feature, model);
}

Corpus annotate_statistical_columns(const Corpus& corpus, const StatModel& model) {
  const auto& names = stat_column_names();
  const std::size_t key_index = corpus.schema.require(model.options.key_column);

  std::array<std::vector<std::string>, 7> cols;
  for (auto& c : cols) c.reserve(corpus.n_tokens());

  for (const auto& sent : corpus.sentences) {
    for (const auto& tok : sent.tokens) {
      const std::string key = model.token_key(tok, key_index);
      cols[0].push_back(discretize(termhood(key, model), names[0], model));
      cols[1].push_back(discretize(static_cast<double>(tf_general(key, model)), names[1], model));
      cols[2].push_back(discretize(static_cast<double>(tf_domain(key, model)), names[2], model));
      cols[3].push_back(discretize(tfidf(key, sent, model, key_index), names[3], model));
      cols[4].push_back(discretize(def_prominence(key, model), names[4], model));
      cols[5].push_back(discretize(definiendum_prominence(key, model), names[5], model));
      cols[6].push_back(discretize(definiens_prominence(key, model), names[6], model));
    }
  }

  int present = 0;
  for (const auto& n : names) present += corpus.schema.has(n) ? 1 : 0;
  if (present == 0) {
    std::vector<std::vector<std::string>> col_vec(cols.begin(), cols.end());
    return append_columns(corpus, col_vec, std::vector<std::string>(names.begin(), names.end()));
  }
  if (present != static_cast<int>(names.size()))
    throw SchemaError("corpus carries only part of the statistical columns");
  Corpus out = corpus;
  for (std::size_t i = 0; i < names.size(); ++i)
    overwrite_column(out, out.schema.require(names[i]), cols[i]);
  return out;
}

}  // namespace defext
