#include "doctest.h"

#include "dkg/grid.hpp"

using namespace dkg;

namespace {

const char* kAppendixPath = DKG_DATA_DIR "/grids/appendix-1.txt";

const char* kAppendixBody =
    "r...mWWg\n"
    "y.WW.WW.\n"
    "WWWW.WW.\n"
    ".R....h.\n"
    ".W.WWWW.\n"
    ".W.WWWWY\n"
    "YW.WWWW.\n"
    "gWgWWWWg";

}  // namespace

TEST_CASE("parse/render round-trips the appendix grid") {
  Grid g = Grid::load_file(kAppendixPath);
  CHECK(g.id() == "appendix-1");
  CHECK(g.width() == 8);
  CHECK(g.height() == 8);
  CHECK(g.render() == kAppendixBody);
  CHECK(Grid::parse(g.render()) == g);
}

TEST_CASE("bracketed matrix block re-parses to the same grid") {
  Grid g = Grid::load_file(kAppendixPath);
  std::string block = g.render_matrix_block();
  CHECK(block.substr(0, 2) == "[[");
  CHECK(Grid::parse(block) == g);
}

TEST_CASE("coord renders with a space after the comma") {
  CHECK(coord({3, 6}) == "(3, 6)");
  CHECK(coord({0, 0}) == "(0, 0)");
}

TEST_CASE("describe produces the reference listing for the appendix-1 grid") {
  Grid g = Grid::load_file(kAppendixPath);
  std::string d = g.describe();
  CHECK(d.find("My position (Labeled as 'm'): (0, 4)") == 0);
  CHECK(d.find("Human (Labeled as 'h'): (3, 6)") != std::string::npos);
  CHECK(d.find("Red key (Labeled as 'r'): (0, 0) --> Total Red key: 1") != std::string::npos);
  CHECK(d.find("Yellow key (Labeled as 'y'): (1, 0) --> Total Yellow key: 1") !=
        std::string::npos);
  CHECK(d.find("Red door (Labeled as 'R'): (3, 1) --> Total Red door: 1") != std::string::npos);
  CHECK(d.find("Yellow doors (Labeled as 'Y'): (5, 7), (6, 0) --> Total Yellow doors: 2") !=
        std::string::npos);
  CHECK(d.find("Gems (Labeled as 'g'): (0, 7), (7, 0), (7, 2), (7, 7) --> Total Gems: 4") !=
        std::string::npos);
  CHECK(d.find("--> Total Walls: 32") != std::string::npos);
  CHECK(d.find("--> Total Empty spaces: 21") != std::string::npos);
}

TEST_CASE("describe omits absent kinds and uses singular forms") {
  Grid g = Grid::parse("m.g\n..h");
  std::string d = g.describe();
  CHECK(d.find("key") == std::string::npos);
  CHECK(d.find("door") == std::string::npos);
  CHECK(d.find("Gem (Labeled as 'g'): (0, 2) --> Total Gem: 1") != std::string::npos);
}

TEST_CASE("parse rejects malformed grids") {
  CHECK_THROWS_WITH_AS(Grid::parse("m.x\nh.g"), doctest::Contains("UnknownCharacter"),
                       GridError);
  CHECK_THROWS_WITH_AS(Grid::parse("m.g\nh."), doctest::Contains("NonRectangular"), GridError);
  CHECK_THROWS_WITH_AS(Grid::parse("m.g\n..."), doctest::Contains("MissingHuman"), GridError);
  CHECK_THROWS_WITH_AS(Grid::parse("..g\nh.."), doctest::Contains("MissingAgent"), GridError);
  CHECK_THROWS_WITH_AS(Grid::parse("mmg\nh.."), doctest::Contains("DuplicateAgent"), GridError);
  CHECK_THROWS_WITH_AS(Grid::parse("m.g\nhh."), doctest::Contains("DuplicateHuman"), GridError);
  CHECK_THROWS_AS(Grid::parse(""), GridError);
}

TEST_CASE("validate requires a gem") {
  Grid g = Grid::parse("m..\n..h");
  CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("MissingGem"), GridError);
  Grid ok = Grid::parse("m.g\n..h");
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("locate is row-major and counts are consistent") {
  Grid g = Grid::load_file(kAppendixPath);
  auto gems = g.locate(CellKind::Gem);
  REQUIRE(gems.size() == 4);
  CHECK(gems[0] == Position{0, 7});
  CHECK(gems[1] == Position{7, 0});
  CHECK(gems[2] == Position{7, 2});
  CHECK(gems[3] == Position{7, 7});
  CHECK(g.count(CellKind::Wall) == 32);
  CHECK(g.count(CellKind::Empty) == 21);
  CHECK(g.count(CellKind::Door, Color::Yellow) == 2);
  CHECK(g.count(CellKind::Door, Color::Red) == 1);
  CHECK(g.count(CellKind::Key, Color::Blue) == 0);
}

TEST_CASE("decoration characters are stripped during parse") {
  Grid plain = Grid::parse("m.g\n..h");
  Grid quoted = Grid::parse("[['m', '.', 'g'],\n ['.', '.', 'h']]");
  CHECK(quoted == plain);
}
