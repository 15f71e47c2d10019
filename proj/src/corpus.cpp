#include "defext/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

namespace defext {

std::optional<Label> parse_label(const std::string& s) {
  if (s == "DEF") return Label::Def;
  if (s == "NODEF") return Label::Nodef;
  return std::nullopt;
}

ColumnSchema::ColumnSchema(std::vector<std::string> names) : names_(std::move(names)) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw SchemaError("empty column name");
    if (!seen.insert(n).second) throw SchemaError("duplicate column name '" + n + "'");
  }
}

int ColumnSchema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

std::size_t ColumnSchema::require(const std::string& name) const {
  int i = index_of(name);
  if (i < 0) throw SchemaError("no column named '" + name + "' in schema");
  return static_cast<std::size_t>(i);
}

std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string ColumnSchema::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& n : names_) {
    h = fnv1a64(n, h);
    h = fnv1a64("\x1f", h);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::size_t Corpus::n_tokens() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

namespace {

void finish_sentence(std::vector<Sentence>& out, Sentence& cur) {
  if (!cur.tokens.empty()) {
    out.push_back(std::move(cur));
    cur = Sentence{};
  }
}

}  // namespace

Corpus parse_corpus(const std::string& text, const ColumnSchema& schema, bool labeled) {
  if (schema.size() == 0) throw SchemaError("schema has no columns");

  Corpus corpus;
  corpus.schema = schema;
  corpus.labeled = labeled;

  const std::size_t want = schema.size() + (labeled ? 1 : 0);

  Sentence cur;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      finish_sentence(corpus.sentences, cur);
      continue;
    }

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != want)
      throw ParseError("expected " + std::to_string(want) + " columns, got " +
                           std::to_string(fields.size()),
                       line_no);

    Token tok;
    if (labeled) {
      auto lab = parse_label(fields.back());
      if (!lab)
        throw LabelError("line " + std::to_string(line_no) + ": label must be DEF or NODEF, got '" +
                         fields.back() + "'");
      tok.label = lab;
      fields.pop_back();
      if (cur.label && *cur.label != *lab)
        throw LabelError("line " + std::to_string(line_no) +
                         ": mixed labels inside one sentence");
      cur.label = lab;
    }
    tok.columns = std::move(fields);
    cur.tokens.push_back(std::move(tok));
  }
  finish_sentence(corpus.sentences, cur);

  if (corpus.sentences.empty()) throw EmptyCorpusError("corpus has no sentences");
  return corpus;
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    if (s > 0) out += '\n';
    for (const auto& tok : corpus.sentences[s].tokens) {
      for (std::size_t c = 0; c < tok.columns.size(); ++c) {
        if (c > 0) out += '\t';
        out += tok.columns[c];
      }
      if (corpus.labeled) {
        out += '\t';
        out += to_string(*tok.label);
      }
      out += '\n';
    }
  }
  return out;
}

Corpus append_columns(const Corpus& corpus,
                      const std::vector<std::vector<std::string>>& columns,
                      const std::vector<std::string>& names) {
  if (columns.size() != names.size())
    throw DimensionError("got " + std::to_string(columns.size()) + " columns for " +
                         std::to_string(names.size()) + " names");
  const std::size_t n_tokens = corpus.n_tokens();
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c].size() != n_tokens)
      throw DimensionError("column '" + names[c] + "' has " + std::to_string(columns[c].size()) +
                           " values for " + std::to_string(n_tokens) + " tokens");

  std::vector<std::string> new_names = corpus.schema.names();
  for (const auto& n : names) new_names.push_back(n);

  Corpus out = corpus;
  out.schema = ColumnSchema(std::move(new_names));  // throws on duplicates
  std::size_t t = 0;
  for (auto& sent : out.sentences) {
    for (auto& tok : sent.tokens) {
      for (const auto& col : columns) tok.columns.push_back(col[t]);
      ++t;
    }
  }
  return out;
}

void overwrite_column(Corpus& corpus, std::size_t column,
                      const std::vector<std::string>& values) {
  if (column >= corpus.schema.size())
    throw SchemaError("column index " + std::to_string(column) + " out of range");
  if (values.size() != corpus.n_tokens())
    throw DimensionError("column has " + std::to_string(values.size()) + " values for " +
                         std::to_string(corpus.n_tokens()) + " tokens");
  std::size_t t = 0;
  for (auto& sent : corpus.sentences)
    for (auto& tok : sent.tokens) tok.columns[column] = values[t++];
}

Corpus read_corpus_file(const std::string& path, const ColumnSchema& schema, bool labeled) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), schema, labeled);
}

void write_corpus_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write corpus file '" + path + "'");
  out << serialize_corpus(corpus);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace defext
