#include "defext/lexfeat.hpp"

#include <algorithm>

namespace defext {

std::string LexTag::str() const {
  std::string s;
  switch (role) {
    case ChunkRole::Begin: s = "b"; break;
    case ChunkRole::Inside: s = "i"; break;
    case ChunkRole::Outside: s = "o"; break;
  }
  s += '-';
  s += (zone == Zone::Definiendum) ? 'D' : 'd';
  return s;
}

const std::vector<std::string>& default_finite_verb_tags() {
  static const std::vector<std::string> tags = {"VBD", "VBZ", "VBP", "MD", "VERB", "AUX"};
  return tags;
}

ZoneBoundary find_zone_boundary(const Sentence& sentence, std::size_t pos_column,
                                std::size_t chunk_column,
                                const std::vector<std::string>& finite_verb_tags) {
  for (const auto& tok : sentence.tokens) {
    if (pos_column >= tok.columns.size() || chunk_column >= tok.columns.size())
      throw SchemaError("pos/chunk column index out of range for sentence");
  }
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    const std::string& pos = sentence.tokens[i].columns[pos_column];
    if (std::find(finite_verb_tags.begin(), finite_verb_tags.end(), pos) !=
        finite_verb_tags.end())
      return ZoneBoundary{i};
  }
  return ZoneBoundary{sentence.size()};
}

namespace {

enum class ChunkKind { NpBegin, NpInside, Out };

ChunkKind parse_chunk_tag(const std::string& tag) {
  if (tag == "O" || tag == kMissingValue) return ChunkKind::Out;
  if (tag.size() >= 3 && tag[1] == '-') {
    if (tag[0] == 'B') return tag.substr(2) == "NP" ? ChunkKind::NpBegin : ChunkKind::Out;
    if (tag[0] == 'I') return tag.substr(2) == "NP" ? ChunkKind::NpInside : ChunkKind::Out;
  }
  throw AnnotationError("malformed chunk tag '" + tag + "'");
}

}  // namespace

std::vector<LexTag> tag_lexicographic(const Sentence& sentence, const ZoneBoundary& boundary,
                                      std::size_t chunk_column) {
  if (boundary.split_index > sentence.size())
    throw AnnotationError("zone boundary beyond sentence end");

  std::vector<LexTag> tags;
  tags.reserve(sentence.size());
  bool in_np = false;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    const auto& tok = sentence.tokens[i];
    if (chunk_column >= tok.columns.size())
      throw SchemaError("chunk column index out of range for sentence");

    Zone zone = (i < boundary.split_index) ? Zone::Definiendum : Zone::Definiens;
    ChunkKind kind = parse_chunk_tag(tok.columns[chunk_column]);

    LexTag tag;
    tag.zone = zone;
    switch (kind) {
      case ChunkKind::Out:
        tag.role = ChunkRole::Outside;
        in_np = false;
        break;
      case ChunkKind::NpBegin:
        tag.role = ChunkRole::Begin;
        in_np = true;
        break;
      case ChunkKind::NpInside:
        // restart as begin when the chunk crosses the zone boundary or the
        // continuation has no open NP (IOB repair)
        if (!in_np || i == boundary.split_index)
          tag.role = ChunkRole::Begin;
        else
          tag.role = ChunkRole::Inside;
        in_np = true;
        break;
    }
    tags.push_back(tag);
  }
  return tags;
}

Corpus annotate_lexicographic_column(const Corpus& corpus, const std::string& pos_column,
                                     const std::string& chunk_column,
                                     const std::string& output_column) {
  std::size_t pos_idx = corpus.schema.require(pos_column);
  std::size_t chunk_idx = corpus.schema.require(chunk_column);

  std::vector<std::string> values;
  values.reserve(corpus.n_tokens());
  for (const auto& sent : corpus.sentences) {
    ZoneBoundary boundary = find_zone_boundary(sent, pos_idx, chunk_idx);
    for (const LexTag& tag : tag_lexicographic(sent, boundary, chunk_idx))
      values.push_back(tag.str());
  }
  return append_columns(corpus, {values}, {output_column});
}

}  // namespace defext
