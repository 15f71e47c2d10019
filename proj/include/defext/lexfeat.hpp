// lexfeat.hpp
// Lexicographic position tags. Each token gets one of
// {b-D, i-D, o-D, b-d, i-d, o-d}: b/i/o from the NP chunk column, D/d from
// whether the token sits in the definiendum zone (before the first finite
// verb) or the definiens zone (from it onward).

#ifndef DEFEXT_LEXFEAT_HPP
#define DEFEXT_LEXFEAT_HPP

#include <string>
#include <vector>

#include "defext/corpus.hpp"

namespace defext {

enum class Zone { Definiendum, Definiens };          // rendered D / d
enum class ChunkRole { Begin, Inside, Outside };     // rendered b / i / o

struct LexTag {
  ChunkRole role = ChunkRole::Outside;
  Zone zone = Zone::Definiendum;

  std::string str() const;
  bool operator==(const LexTag&) const = default;
};

// Tokens before split_index are zone D, from it onward zone d.
struct ZoneBoundary {
  std::size_t split_index = 0;
};

// POS tags treated as finite verbs (PTB finite forms and modals, plus the
// universal VERB/AUX tags).
const std::vector<std::string>& default_finite_verb_tags();

// split_index = index of the first finite-verb POS tag; sentence length
// when no verb exists (whole sentence is zone D). Column indices out of
// range raise SchemaError.
ZoneBoundary find_zone_boundary(const Sentence& sentence, std::size_t pos_column,
                                std::size_t chunk_column,
                                const std::vector<std::string>& finite_verb_tags =
                                    default_finite_verb_tags());

// One tag per token. Chunk column must hold BIO tags (B-NP / I-NP / O;
// non-NP chunks count as outside). An I- continuation at a zone start or
// after a gap is treated as a chunk begin, so an NP spanning the boundary
// restarts as b-d. Unparseable chunk tags raise AnnotationError.
std::vector<LexTag> tag_lexicographic(const Sentence& sentence, const ZoneBoundary& boundary,
                                      std::size_t chunk_column);

// Runs both steps over a corpus and appends the tag column.
Corpus annotate_lexicographic_column(const Corpus& corpus, const std::string& pos_column,
                                     const std::string& chunk_column,
                                     const std::string& output_column = "lex");

}  // namespace defext

#endif  // DEFEXT_LEXFEAT_HPP
