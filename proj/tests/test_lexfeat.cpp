#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "defext/lexfeat.hpp"
#include "fixtures.hpp"

using namespace defext;
using fixtures::sent;

namespace {

std::string tags_of(const Sentence& s) {
  ZoneBoundary b = find_zone_boundary(s, 1, 2);
  std::string out;
  for (const LexTag& t : tag_lexicographic(s, b, 2)) {
    if (!out.empty()) out += ' ';
    out += t.str();
  }
  return out;
}

}  // namespace

TEST_CASE("the worked example tags exactly as documented") {
  CHECK(tags_of(fixtures::abwehr()) ==
        "o-D b-D o-d o-d b-d i-d i-d o-d o-d o-d o-d");
}

TEST_CASE("zone boundary sits on the first finite verb") {
  Sentence s = sent({{"x", "NN", "O"}, {"ran", "VBD", "O"}, {"holds", "VBZ", "O"}});
  CHECK(find_zone_boundary(s, 1, 2).split_index == 1);

  // modal counts, gerund does not
  Sentence m = sent({{"x", "VBG", "O"}, {"can", "MD", "O"}});
  CHECK(find_zone_boundary(m, 1, 2).split_index == 1);

  // universal tagset verbs count too
  Sentence u = sent({{"x", "NOUN", "O"}, {"is", "AUX", "O"}});
  CHECK(find_zone_boundary(u, 1, 2).split_index == 1);

  // no finite verb: the whole sentence is the definiendum zone
  Sentence n = sent({{"x", "NN", "B-NP"}, {"y", "NN", "I-NP"}});
  CHECK(find_zone_boundary(n, 1, 2).split_index == 2);
  CHECK(tags_of(n) == "b-D i-D");
}

TEST_CASE("an NP spanning the zone boundary restarts as begin") {
  // the I-NP continuation lands exactly on the boundary token
  Sentence s = sent({{"alpha", "NN", "B-NP"}, {"is", "VBZ", "I-NP"}, {"beta", "NN", "I-NP"}});
  CHECK(tags_of(s) == "b-D b-d i-d");
}

TEST_CASE("orphan I-NP after a gap is repaired to begin") {
  Sentence s = sent({{"x", "NN", "O"}, {"y", "VBZ", "I-NP"}, {"z", "NN", "I-NP"}});
  // boundary at index 1, orphan continuation there starts a chunk
  CHECK(tags_of(s) == "o-D b-d i-d");

  Sentence gap = sent({{"a", "VBZ", "B-NP"}, {"b", "NN", "O"}, {"c", "NN", "I-NP"}});
  CHECK(tags_of(gap) == "b-d o-d b-d");
}

TEST_CASE("non-NP chunks and sentinels are outside") {
  Sentence s = sent({{"x", "NN", "B-VP"}, {"y", "VBZ", "I-VP"}, {"z", "NN", "_"}});
  CHECK(tags_of(s) == "o-D o-d o-d");
}

TEST_CASE("malformed chunk tags are rejected") {
  Sentence s = sent({{"x", "NN", "NP"}});
  CHECK_THROWS_AS(tag_lexicographic(s, ZoneBoundary{0}, 2), AnnotationError);
  Sentence s2 = sent({{"x", "NN", "banana"}});
  CHECK_THROWS_AS(tag_lexicographic(s2, ZoneBoundary{0}, 2), AnnotationError);
}

TEST_CASE("column indices are validated per sentence") {
  Sentence s = sent({{"x", "NN"}});
  CHECK_THROWS_AS(find_zone_boundary(s, 1, 2), SchemaError);
  CHECK_THROWS_AS(tag_lexicographic(s, ZoneBoundary{0}, 2), SchemaError);
}

TEST_CASE("annotate appends the tag column corpus-wide") {
  Corpus c = fixtures::corpus(fixtures::raw_schema(),
                              {fixtures::abwehr(),
                               sent({{"run", "VB", "O"}, {"fast", "RB", "O"}})},
                              false);
  Corpus out = annotate_lexicographic_column(c, "pos", "chunk", "lex");
  CHECK(out.schema.size() == 4);
  CHECK(out.schema.name(3) == "lex");
  CHECK(out.sentences[0].tokens[1].columns[3] == "b-D");
  // "run fast": no finite verb (VB is non-finite), all zone D
  CHECK(out.sentences[1].tokens[0].columns[3] == "o-D");

  CHECK_THROWS_AS(annotate_lexicographic_column(c, "lemma", "chunk", "lex"), SchemaError);
}
