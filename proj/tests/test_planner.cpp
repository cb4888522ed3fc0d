#include "doctest.h"

#include <random>

#include "dkg/planner.hpp"

using namespace dkg;

namespace {

Grid appendix() { return Grid::load_file(DKG_DATA_DIR "/grids/appendix-1.txt"); }

}  // namespace

TEST_CASE("shortest_path respects the door budget") {
  Grid g = Grid::parse("h.R.g\nWWWWW\nm....");
  auto blocked = shortest_path(g, {0, 0}, {0, 4}, {});
  CHECK_FALSE(blocked.has_value());
  auto open = shortest_path(g, {0, 0}, {0, 4}, {{Color::Red, 1}});
  REQUIRE(open.has_value());
  CHECK(open->steps() == 4);
  CHECK(open->cells.front() == Position{0, 0});
  CHECK(open->cells.back() == Position{0, 4});
}

TEST_CASE("one key per door: two doors of a color need two keys") {
  Grid g = Grid::parse("h.R.R.g\nWWWWWWW\nm.r.r..");
  CHECK_FALSE(shortest_path(g, {0, 0}, {0, 6}, {{Color::Red, 1}}).has_value());
  CHECK(shortest_path(g, {0, 0}, {0, 6}, {{Color::Red, 2}}).has_value());
}

TEST_CASE("analyze_gem on the appendix grid") {
  Grid g = appendix();
  Position human = g.human();

  GemAnalysis far = analyze_gem(g, human, {7, 0});
  CHECK(far.required_keys == KeyMultiset{{Color::Red, 1}, {Color::Yellow, 1}});

  GemAnalysis free = analyze_gem(g, human, {0, 7});
  CHECK(free.required_keys.empty());
  REQUIRE(free.human_cost.has_value());
  CHECK(*free.human_cost == 4);

  GemAnalysis yellow = analyze_gem(g, human, {7, 7});
  CHECK(yellow.required_keys == KeyMultiset{{Color::Yellow, 1}});
  REQUIRE(yellow.human_cost.has_value());
  CHECK(*yellow.human_cost == 5);

  GemAnalysis open = analyze_gem(g, human, {7, 2});
  CHECK(open.required_keys.empty());
  REQUIRE(open.human_cost.has_value());
  CHECK(*open.human_cost == 8);
}

TEST_CASE("analyze_gem prefers fewer keys over fewer steps") {
  // Short way through a door, long way around: keys minimized first.
  Grid g = Grid::parse("h.R.g\n....W\n....W\nm....");
  GemAnalysis a = analyze_gem(g, {0, 0}, {0, 4});
  CHECK(a.required_keys.empty());  // no red key exists, so the long way is the only way
  Grid g2 = Grid::parse("h.R.g\nr...W\n....W\nm....");
  GemAnalysis a2 = analyze_gem(g2, {0, 0}, {0, 4});
  CHECK(a2.required_keys.empty());  // still prefers the key-free detour
  REQUIRE(a2.human_cost.has_value());
  CHECK(*a2.human_cost > 4);
}

TEST_CASE("brute force agrees with analyze_gem on the appendix grid") {
  Grid g = appendix();
  for (Position gem : g.locate(CellKind::Gem)) {
    GemAnalysis a = analyze_gem(g, g.human(), gem);
    auto brute = brute_force_required_keys(g, g.human(), gem);
    REQUIRE(brute.has_value());
    CHECK(a.required_keys == *brute);
  }
}

TEST_CASE("brute force agrees with analyze_gem on random grids") {
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<int> cell_die(0, 9);
  int grids_checked = 0, gems_checked = 0;
  while (grids_checked < 60) {
    std::vector<std::vector<Cell>> cells(6, std::vector<Cell>(6));
    for (auto& row : cells)
      for (auto& c : row) {
        switch (cell_die(rng)) {
          case 0: case 1: c = Cell{CellKind::Wall}; break;
          case 2: c = Cell{CellKind::Key, Color::Red}; break;
          case 3: c = Cell{CellKind::Door, Color::Red}; break;
          case 4: c = Cell{CellKind::Key, Color::Yellow}; break;
          case 5: c = Cell{CellKind::Door, Color::Yellow}; break;
          case 6: c = Cell{CellKind::Gem}; break;
          default: c = Cell{CellKind::Empty}; break;
        }
      }
    cells[0][0] = Cell{CellKind::Human};
    cells[5][5] = Cell{CellKind::Agent};
    Grid g = Grid::from_cells(cells);
    if (g.count(CellKind::Gem) == 0) continue;
    ++grids_checked;
    for (Position gem : g.locate(CellKind::Gem)) {
      GemAnalysis a = analyze_gem(g, {0, 0}, gem);
      auto brute = brute_force_required_keys(g, {0, 0}, gem);
      CHECK(a.human_cost.has_value() == brute.has_value());
      if (brute) {
        // Several key multisets can be tied for minimal size on random
        // grids; both searches must agree on that size and return a
        // feasible set.
        CHECK(total_keys(a.required_keys) == total_keys(*brute));
        CHECK(shortest_path(g, {0, 0}, gem, a.required_keys).has_value());
      }
      ++gems_checked;
    }
  }
  CHECK(gems_checked > 60);
}

TEST_CASE("agent_fetch_plan collects both appendix keys and delivers them") {
  Grid g = appendix();
  PlanResult pr = agent_fetch_plan(g, {{Color::Red, 1}, {Color::Yellow, 1}});
  auto* plan = std::get_if<Plan>(&pr);
  REQUIRE(plan != nullptr);

  std::vector<Position> pickups;
  std::vector<Color> passed;
  for (const auto& a : plan->actions) {
    if (a.kind == AgentAction::Kind::PickUp) pickups.push_back(a.pos);
    if (a.kind == AgentAction::Kind::PassKeys) passed = a.colors;
  }
  REQUIRE(pickups.size() == 2);
  CHECK(pickups[0] == Position{0, 0});
  CHECK(pickups[1] == Position{1, 0});
  CHECK(passed == std::vector<Color>{Color::Red, Color::Yellow});

  SimResult sim = simulate(g, *plan);
  CHECK(sim.ok);
  // Delivery happens from a cell 4-adjacent to the human.
  int dr = std::abs(sim.state.agent.row - g.human().row);
  int dc = std::abs(sim.state.agent.col - g.human().col);
  CHECK(dr + dc == 1);
  CHECK(sim.state.passed == KeyMultiset{{Color::Red, 1}, {Color::Yellow, 1}});
}

TEST_CASE("agent_fetch_plan with no needed keys is an empty plan") {
  Grid g = appendix();
  PlanResult pr = agent_fetch_plan(g, {});
  auto* plan = std::get_if<Plan>(&pr);
  REQUIRE(plan != nullptr);
  CHECK(plan->actions.empty());
  CHECK(plan->total_steps == 0);
  CHECK(simulate(g, *plan).ok);
}

TEST_CASE("agent_fetch_plan reports insufficient keys") {
  Grid g = appendix();
  PlanResult pr = agent_fetch_plan(g, {{Color::Blue, 1}});
  auto* err = std::get_if<PlanError>(&pr);
  REQUIRE(err != nullptr);
  CHECK(err->kind == PlanErrorKind::InsufficientKeys);
  REQUIRE(err->color.has_value());
  CHECK(*err->color == Color::Blue);
}

TEST_CASE("agent_fetch_plan reports blocked delivery") {
  // The key is on the agent's side; the human is sealed behind a door.
  Grid g = Grid::parse("m.r.Rh\nWWWWWW\ng.....");
  PlanResult pr = agent_fetch_plan(g, {{Color::Red, 1}});
  auto* err = std::get_if<PlanError>(&pr);
  REQUIRE(err != nullptr);
  CHECK(err->kind == PlanErrorKind::CannotReachHuman);
}

TEST_CASE("simulate rejects invalid plans") {
  Grid g = appendix();

  SUBCASE("path must start at the agent") {
    Plan p;
    AgentAction move{AgentAction::Kind::MoveAlong, Path{{{1, 4}, {2, 4}}}, {}, {}};
    p.actions.push_back(move);
    SimResult sim = simulate(g, p);
    CHECK_FALSE(sim.ok);
    CHECK(sim.violation_index == 0);
  }
  SUBCASE("path may not cross walls") {
    Plan p;
    AgentAction move{AgentAction::Kind::MoveAlong, Path{{{0, 4}, {0, 5}}}, {}, {}};
    p.actions.push_back(move);
    CHECK_FALSE(simulate(g, p).ok);
  }
  SUBCASE("pickup requires standing on the key") {
    Plan p;
    AgentAction pick{AgentAction::Kind::PickUp, {}, {0, 0}, {}};
    p.actions.push_back(pick);
    CHECK_FALSE(simulate(g, p).ok);
  }
  SUBCASE("passing requires holding the keys and standing next to the human") {
    Plan p;
    AgentAction pass{AgentAction::Kind::PassKeys, {}, {}, {Color::Red}};
    p.actions.push_back(pass);
    CHECK_FALSE(simulate(g, p).ok);
  }
}

TEST_CASE("total_keys and format_keys") {
  KeyMultiset ks{{Color::Red, 1}, {Color::Yellow, 2}};
  CHECK(total_keys(ks) == 3);
  CHECK(format_keys(ks) == "{red: 1, yellow: 2}");
  CHECK(total_keys({}) == 0);
}
