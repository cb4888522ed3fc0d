#pragma once

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "dkg/grid.hpp"

namespace dkg {

// Color -> count of keys. std::map keeps color order deterministic.
using KeyMultiset = std::map<Color, int>;

int total_keys(const KeyMultiset& ks);
std::string format_keys(const KeyMultiset& ks);

struct Path {
  std::vector<Position> cells;  // includes the start cell
  int steps() const { return cells.empty() ? 0 : static_cast<int>(cells.size()) - 1; }
};

struct AgentAction {
  enum class Kind { MoveAlong, PickUp, PassKeys, Unlock };
  Kind kind;
  Path path;                  // MoveAlong
  Position pos;               // PickUp / Unlock target
  std::vector<Color> colors;  // PassKeys, one entry per key handed over
};

struct Plan {
  std::vector<AgentAction> actions;
  int total_steps = 0;
};

struct GemAnalysis {
  Position gem;
  KeyMultiset required_keys;
  std::vector<Position> blocking_doors;  // row-major
  std::optional<int> human_cost;         // steps; nullopt == unreachable
};

enum class PlanErrorKind { InsufficientKeys, CannotReachHuman };

struct PlanError {
  PlanErrorKind kind;
  std::optional<Color> color;  // InsufficientKeys
};

using PlanResult = std::variant<Plan, PlanError>;

// BFS shortest path for the human side: doors of a color are passable
// while key budget remains; each distinct locked door traversed consumes
// one key of its color, and opened doors stay open. Neighbor order is
// up, down, left, right with lexicographic state tie-breaks.
std::optional<Path> shortest_path(const Grid& g, Position from, Position to,
                                  const KeyMultiset& openable);

// Minimal key requirement for the human (actor) to reach a gem:
// Dijkstra over (position, opened-door set), minimizing (total keys, steps)
// lexicographically. Door openings per color are capped by the keys
// available on the grid.
GemAnalysis analyze_gem(const Grid& g, Position actor, Position gem);

// Independent oracle for analyze_gem: enumerate key submultisets in
// ascending total size (then color order) and test reachability with the
// budgeted BFS. nullopt when no submultiset reaches the gem.
std::optional<KeyMultiset> brute_force_required_keys(const Grid& g, Position actor,
                                                     Position gem);

// Greedy fetch plan for the agent: nearest needed key instance by BFS
// distance (ties row-major), then move 4-adjacent to the human and pass
// the keys. Agent movement never crosses walls, locked doors, or the
// human. needed == {} yields an empty plan.
PlanResult agent_fetch_plan(const Grid& g, const KeyMultiset& needed);

struct SimState {
  Position agent;
  KeyMultiset held;
  KeyMultiset passed;
  std::vector<Position> opened_doors;
};

struct SimResult {
  bool ok = false;
  int violation_index = -1;  // first violating action
  std::string reason;
  SimState state;
};

SimResult simulate(const Grid& g, const Plan& plan);

}  // namespace dkg
