#include "doctest.h"

#include "dkg/norms.hpp"

using namespace dkg;

namespace {

Grid corpus_grid(const char* id) {
  return Grid::load_file(std::string(DKG_DATA_DIR "/grids/") + id + ".txt");
}

NormLabel label_of(const Grid& g, const std::string& text) {
  return classify(g, parse_instruction(text)).first;
}

}  // namespace

TEST_CASE("label names and parsing") {
  CHECK(norm_label_name(NormLabel::NoViolation) == "No Violation");
  CHECK(norm_label_name(NormLabel::MannerViolation) == "Manner Violation");
  CHECK(norm_label_from_text("Quantity Violation. Too few keys.") ==
        NormLabel::QuantityViolation);
  CHECK(norm_label_from_text("no violation") == NormLabel::NoViolation);
  CHECK(norm_label_from_text("Relevance Violation") == NormLabel::RelationViolation);
  CHECK(norm_label_from_text("relation violation") == NormLabel::RelationViolation);
  CHECK_FALSE(norm_label_from_text("gibberish").has_value());
}

TEST_CASE("instruction types map onto labels bijectively") {
  const char* types[] = {"Clear", "Incomplete", "Invalid", "Irrelevant", "Ambiguous"};
  NormLabel labels[] = {NormLabel::NoViolation, NormLabel::QuantityViolation,
                        NormLabel::QualityViolation, NormLabel::RelationViolation,
                        NormLabel::MannerViolation};
  for (int i = 0; i < 5; ++i) {
    CHECK(label_for_instruction_type(types[i]) == labels[i]);
    CHECK(instruction_type_for_label(labels[i]) == types[i]);
  }
  CHECK_FALSE(label_for_instruction_type("Weird").has_value());
}

TEST_CASE("classify covers every branch on the reference grid") {
  Grid g = corpus_grid("appendix-1");

  SUBCASE("clear instruction for the cheapest useful key") {
    auto [label, ev] = classify(g, parse_instruction("Can you get the yellow key?"));
    CHECK(label == NormLabel::NoViolation);
    REQUIRE(ev.inferred_gem.has_value());
    CHECK(*ev.inferred_gem == Position{7, 7});
    CHECK(ev.required_keys == KeyMultiset{{Color::Yellow, 1}});
  }
  SUBCASE("mentioning only the red key misses the yellow requirement") {
    auto [label, ev] = classify(g, parse_instruction("Can you get the red key?"));
    CHECK(label == NormLabel::QuantityViolation);
    REQUIRE(ev.inferred_gem.has_value());
    CHECK(*ev.inferred_gem == Position{7, 0});
    CHECK(ev.detail.find("does not mention the yellow key") != std::string::npos);
  }
  SUBCASE("bare plural 'keys' resolves to the cheapest gem and under-specifies") {
    auto [label, ev] = classify(g, parse_instruction("Can you pass me the keys?"));
    CHECK(label == NormLabel::QuantityViolation);
    CHECK(*ev.inferred_gem == Position{7, 7});
  }
  SUBCASE("nonexistent key color is a quality violation") {
    auto [label, ev] = classify(g, parse_instruction("Can you get the blue key?"));
    CHECK(label == NormLabel::QualityViolation);
    CHECK(ev.detail == "There is no blue key on the grid.");
  }
  SUBCASE("colored gems never exist") {
    CHECK(label_of(g, "Can you get the blue gem?") == NormLabel::QualityViolation);
  }
  SUBCASE("out-of-domain text is a relation violation") {
    CHECK(label_of(g, "Can you dance?") == NormLabel::RelationViolation);
    CHECK(label_of(g, "What time is it?") == NormLabel::RelationViolation);
  }
  SUBCASE("a plain gem request picks the closest gem") {
    auto [label, ev] = classify(g, parse_instruction("Can you get the gem?"));
    CHECK(label == NormLabel::NoViolation);
    CHECK(*ev.inferred_gem == Position{0, 7});
    CHECK(ev.required_keys.empty());
  }
}

TEST_CASE("classify precedence: relation beats quality beats manner") {
  Grid g = corpus_grid("g12");  // two equally close gems, no keys or doors
  // Out-of-domain first, even though the grid is ambiguous.
  CHECK(label_of(g, "Please sing a song.") == NormLabel::RelationViolation);
  // A nonexistent object is quality, not manner.
  CHECK(label_of(g, "Can you get the red key?") == NormLabel::QualityViolation);
  // Only the well-formed gem request is ambiguous.
  auto [label, ev] = classify(g, parse_instruction("Can you get the gem?"));
  CHECK(label == NormLabel::MannerViolation);
  REQUIRE(ev.candidate_gems.size() == 2);
  CHECK(ev.candidate_gems[0] == Position{2, 0});
  CHECK(ev.candidate_gems[1] == Position{2, 8});
}

TEST_CASE("an existing but useless key is a relation violation") {
  Grid g = corpus_grid("g10");  // free gem plus a stray red key
  CHECK(label_of(g, "Can you get the red key?") == NormLabel::RelationViolation);
  CHECK(label_of(g, "Can you get the gem?") == NormLabel::NoViolation);
}

TEST_CASE("quantity handles specified, singular, and plural counts") {
  Grid g = corpus_grid("g07");  // one gem behind two blue doors, two blue keys
  CHECK(label_of(g, "Can you pass me two blue keys?") == NormLabel::NoViolation);
  CHECK(label_of(g, "Can you pass me one blue key?") == NormLabel::QuantityViolation);
  CHECK(label_of(g, "Can you pass me the blue key?") == NormLabel::QuantityViolation);
  auto [label, ev] = classify(g, parse_instruction("Can you pass me the blue keys?"));
  CHECK(label == NormLabel::QuantityViolation);
  CHECK(ev.detail.find("does not say how many; 2 are needed") != std::string::npos);
  // Over-asking is not flagged.
  CHECK(label_of(g, "Can you pass me three blue keys?") == NormLabel::NoViolation);
}

TEST_CASE("two same-color doors to different gems are ambiguous") {
  Grid g = corpus_grid("g13");
  auto [label, ev] = classify(g, parse_instruction("Unlock the red door."));
  CHECK(label == NormLabel::MannerViolation);
  CHECK(ev.detail.find("equally close to the human") != std::string::npos);
  CHECK(ev.candidate_gems.size() == 2);
}

TEST_CASE("classify requires a gem on the grid") {
  Grid g = Grid::parse("m..\n..h");
  CHECK_THROWS_AS(classify(g, parse_instruction("get the key")), NormError);
}

TEST_CASE("infer_response produces a simulable plan for planful labels") {
  Grid g = corpus_grid("appendix-1");
  SemanticInstruction s = parse_instruction("Can you get the red key?");
  auto [label, ev] = classify(g, s);
  OracleResponse r = infer_response(g, s, label);
  CHECK(r.label == NormLabel::QuantityViolation);
  REQUIRE(r.plan.has_value());
  CHECK(simulate(g, *r.plan).ok);
  CHECK(r.options.empty());
  CHECK(r.nl_text.find("I will collect the keys at (0, 0) and (1, 0)") != std::string::npos);
  CHECK(r.nl_text.find("There are one red key, one yellow key, one red door, and two yellow "
                       "doors on the grid.") == 0);
}

TEST_CASE("infer_response offers clarification options for question labels") {
  Grid g = corpus_grid("appendix-1");

  SUBCASE("quality: one option per present key color plus a 'both' option") {
    OracleResponse r = respond(g, "Can you get the blue key?");
    CHECK(r.label == NormLabel::QualityViolation);
    CHECK_FALSE(r.plan.has_value());
    REQUIRE(r.options.size() == 3);
    CHECK(r.options[0].description == "the red key");
    CHECK(r.options[1].description == "the yellow key");
    CHECK(r.options[2].description == "both of them");
    CHECK(r.nl_text.find("Do you want me to collect the red key, the yellow key, or both of "
                         "them?") != std::string::npos);
  }
  SUBCASE("relation gets the same key-color menu") {
    OracleResponse r = respond(g, "Can you dance?");
    CHECK(r.label == NormLabel::RelationViolation);
    CHECK(r.options.size() == 3);
  }
}

TEST_CASE("manner options enumerate the ambiguous referents") {
  OracleResponse gems = respond(corpus_grid("g12"), "Can you get the gem?");
  REQUIRE(gems.options.size() == 2);
  CHECK(gems.options[0].description == "the gem at (2, 0)");
  CHECK(gems.options[1].description == "the gem at (2, 8)");
  CHECK(gems.options[0].kind == ObjectKind::Gem);

  OracleResponse doors = respond(corpus_grid("g13"), "Unlock the red door.");
  REQUIRE(doors.options.size() == 3);
  CHECK(doors.options[0].description == "the red door at (2, 1)");
  CHECK(doors.options[1].description == "the red door at (2, 7)");
  CHECK(doors.options[2].description == "both of them");
  CHECK(doors.nl_text.find("Do you want me to unlock the red door at (2, 1), the red door at "
                           "(2, 7), or both of them?") != std::string::npos);
}

TEST_CASE("render_nl covers the no-keys-needed case") {
  OracleResponse r = respond(corpus_grid("g10"), "Can you get the gem?");
  CHECK(r.label == NormLabel::NoViolation);
  REQUIRE(r.plan.has_value());
  CHECK(r.plan->actions.empty());
  CHECK(r.nl_text.find("The gem is directly reachable, so no keys are needed.") !=
        std::string::npos);
}

TEST_CASE("respond is deterministic") {
  Grid g = corpus_grid("appendix-1");
  OracleResponse a = respond(g, "Can you pass me the keys?");
  OracleResponse b = respond(g, "Can you pass me the keys?");
  CHECK(a.nl_text == b.nl_text);
  CHECK(a.label == b.label);
}
