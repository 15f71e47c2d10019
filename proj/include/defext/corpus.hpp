// corpus.hpp
// Column-format corpus data model: one token per line, TAB-separated
// feature columns, blank line between sentences, optional trailing
// DEF/NODEF label column. Corpora are immutable once built and safe to
// share read-only across threads.

#ifndef DEFEXT_CORPUS_HPP
#define DEFEXT_CORPUS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "defext/errors.hpp"

namespace defext {

enum class Label : int { Def = 0, Nodef = 1 };

inline const char* to_string(Label l) { return l == Label::Def ? "DEF" : "NODEF"; }
std::optional<Label> parse_label(const std::string& s);

// placeholder for a missing feature value; treated as an ordinary category
inline constexpr const char* kMissingValue = "_";

// Ordered feature column names. Column 0 is the surface form. The label
// column is not part of the schema; `Corpus::labeled` says whether files
// carry one.
class ColumnSchema {
 public:
  ColumnSchema() = default;
  explicit ColumnSchema(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }

  // -1 when the column does not exist
  int index_of(const std::string& name) const;
  // SchemaError when the column does not exist
  std::size_t require(const std::string& name) const;
  bool has(const std::string& name) const { return index_of(name) >= 0; }

  // stable content hash used to reject stale models
  std::string fingerprint() const;

  bool operator==(const ColumnSchema&) const = default;

 private:
  std::vector<std::string> names_;
};

struct Token {
  std::vector<std::string> columns;
  std::optional<Label> label;
};

struct Sentence {
  std::vector<Token> tokens;
  std::optional<Label> label;

  std::size_t size() const { return tokens.size(); }
};

struct Corpus {
  std::vector<Sentence> sentences;
  ColumnSchema schema;
  bool labeled = false;

  std::size_t n_sentences() const { return sentences.size(); }
  std::size_t n_tokens() const;
};

// Parses column-format text. Leading/trailing blank lines and repeated
// blank separator lines are ignored. Throws ParseError (with line number)
// on ragged rows, LabelError on bad or mixed labels, EmptyCorpusError when
// no sentence survives.
Corpus parse_corpus(const std::string& text, const ColumnSchema& schema, bool labeled);

// Canonical form: TAB-separated rows, '\n' endings, exactly one blank line
// between sentences, trailing newline. parse(serialize(c)) == c.
std::string serialize_corpus(const Corpus& corpus);

// Appends new feature columns (label column, when present, stays last).
// `columns[c]` holds the values of new column c for every token in corpus
// order; columns.size() must equal names.size() and each columns[c] must
// have exactly n_tokens() entries, else DimensionError. Duplicate names
// raise SchemaError.
Corpus append_columns(const Corpus& corpus,
                      const std::vector<std::vector<std::string>>& columns,
                      const std::vector<std::string>& names);

// Overwrites an existing column in place (corpus order), used when
// statistical features are recomputed mid-bootstrap.
void overwrite_column(Corpus& corpus, std::size_t column,
                      const std::vector<std::string>& values);

Corpus read_corpus_file(const std::string& path, const ColumnSchema& schema, bool labeled);
void write_corpus_file(const Corpus& corpus, const std::string& path);

std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed = 1469598103934665603ull);

}  // namespace defext

#endif  // DEFEXT_CORPUS_HPP
