#include "dkg/planner.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace dkg {

int total_keys(const KeyMultiset& ks) {
  int n = 0;
  for (const auto& [c, k] : ks) n += k;
  return n;
}

std::string format_keys(const KeyMultiset& ks) {
  std::string out = "{";
  bool first = true;
  for (const auto& [c, k] : ks) {
    if (k == 0) continue;
    if (!first) out += ", ";
    first = false;
    out += std::string(color_name(c)) + ": " + std::to_string(k);
  }
  return out + "}";
}

namespace {

constexpr int kDR[] = {-1, 1, 0, 0};  // up, down, left, right
constexpr int kDC[] = {0, 0, -1, 1};

struct DoorIndex {
  std::vector<Position> doors;  // row-major
  std::vector<Color> colors;

  explicit DoorIndex(const Grid& g) {
    doors = g.locate(CellKind::Door);
    for (Position p : doors) colors.push_back(g.at(p).color);
  }
  int index_of(Position p) const {
    for (size_t i = 0; i < doors.size(); ++i)
      if (doors[i] == p) return static_cast<int>(i);
    return -1;
  }
};

int opened_of_color(const DoorIndex& di, uint32_t mask, Color c) {
  int n = 0;
  for (size_t i = 0; i < di.doors.size(); ++i)
    if ((mask >> i) & 1u && di.colors[i] == c) ++n;
  return n;
}

KeyMultiset keys_for_mask(const DoorIndex& di, uint32_t mask) {
  KeyMultiset ks;
  for (size_t i = 0; i < di.doors.size(); ++i)
    if ((mask >> i) & 1u) ks[di.colors[i]] += 1;
  return ks;
}

}  // namespace

std::optional<Path> shortest_path(const Grid& g, Position from, Position to,
                                  const KeyMultiset& openable) {
  if (!g.in_bounds(from) || !g.in_bounds(to)) return std::nullopt;
  DoorIndex di(g);
  using State = std::pair<Position, uint32_t>;
  std::map<State, State> parent;
  std::queue<State> q;
  State start{from, 0};
  parent[start] = start;
  q.push(start);
  auto budget = [&](Color c) {
    auto it = openable.find(c);
    return it == openable.end() ? 0 : it->second;
  };
  std::optional<State> goal;
  while (!q.empty() && !goal) {
    auto [pos, mask] = q.front();
    q.pop();
    if (pos == to) {
      goal = State{pos, mask};
      break;
    }
    for (int d = 0; d < 4; ++d) {
      Position np{pos.row + kDR[d], pos.col + kDC[d]};
      if (!g.in_bounds(np)) continue;
      const Cell& cell = g.at(np);
      if (cell.kind == CellKind::Wall) continue;
      uint32_t nmask = mask;
      if (cell.kind == CellKind::Door) {
        int idx = di.index_of(np);
        if (!((mask >> idx) & 1u)) {
          if (opened_of_color(di, mask, cell.color) >= budget(cell.color)) continue;
          nmask = mask | (1u << idx);
        }
      }
      State ns{np, nmask};
      if (parent.count(ns)) continue;
      parent[ns] = {pos, mask};
      q.push(ns);
    }
  }
  if (!goal) return std::nullopt;
  Path path;
  State s = *goal;
  while (!(parent[s] == s)) {
    path.cells.push_back(s.first);
    s = parent[s];
  }
  path.cells.push_back(from);
  std::reverse(path.cells.begin(), path.cells.end());
  return path;
}

GemAnalysis analyze_gem(const Grid& g, Position actor, Position gem) {
  DoorIndex di(g);
  KeyMultiset avail;
  for (Color c : kAllColors) avail[c] = g.count(CellKind::Key, c);

  // Dijkstra over (position, opened-door set) with lexicographic cost
  // (keys used, steps); the queue tie-breaks on the state encoding so the
  // chosen door set is deterministic.
  struct QEntry {
    int keys;
    int steps;
    uint32_t mask;
    int row, col;
    bool operator>(const QEntry& o) const {
      return std::tie(keys, steps, mask, row, col) >
             std::tie(o.keys, o.steps, o.mask, o.row, o.col);
    }
  };
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> pq;
  std::map<std::pair<Position, uint32_t>, std::pair<int, int>> best;  // -> (keys, steps)
  pq.push({0, 0, 0, actor.row, actor.col});
  best[{actor, 0}] = {0, 0};

  GemAnalysis out;
  out.gem = gem;
  while (!pq.empty()) {
    QEntry e = pq.top();
    pq.pop();
    Position pos{e.row, e.col};
    auto it = best.find({pos, e.mask});
    if (it != best.end() && std::pair(e.keys, e.steps) > it->second) continue;
    if (pos == gem) {
      out.required_keys = keys_for_mask(di, e.mask);
      for (size_t i = 0; i < di.doors.size(); ++i)
        if ((e.mask >> i) & 1u) out.blocking_doors.push_back(di.doors[i]);
      out.human_cost = e.steps;
      return out;
    }
    for (int d = 0; d < 4; ++d) {
      Position np{pos.row + kDR[d], pos.col + kDC[d]};
      if (!g.in_bounds(np)) continue;
      const Cell& cell = g.at(np);
      if (cell.kind == CellKind::Wall) continue;
      int nkeys = e.keys;
      uint32_t nmask = e.mask;
      if (cell.kind == CellKind::Door) {
        int idx = di.index_of(np);
        if (!((e.mask >> idx) & 1u)) {
          if (opened_of_color(di, e.mask, cell.color) >= avail[cell.color]) continue;
          nmask |= 1u << idx;
          ++nkeys;
        }
      }
      auto key = std::pair(np, nmask);
      auto cost = std::pair(nkeys, e.steps + 1);
      auto bit = best.find(key);
      if (bit != best.end() && bit->second <= cost) continue;
      best[key] = cost;
      pq.push({nkeys, e.steps + 1, nmask, np.row, np.col});
    }
  }
  out.human_cost = std::nullopt;  // unreachable even with every key
  return out;
}

std::optional<KeyMultiset> brute_force_required_keys(const Grid& g, Position actor,
                                                     Position gem) {
  int maxr = g.count(CellKind::Key, Color::Red);
  int maxy = g.count(CellKind::Key, Color::Yellow);
  int maxb = g.count(CellKind::Key, Color::Blue);
  for (int total = 0; total <= maxr + maxy + maxb; ++total) {
    for (int r = 0; r <= std::min(total, maxr); ++r) {
      for (int y = 0; y <= std::min(total - r, maxy); ++y) {
        int b = total - r - y;
        if (b > maxb) continue;
        KeyMultiset ks;
        if (r) ks[Color::Red] = r;
        if (y) ks[Color::Yellow] = y;
        if (b) ks[Color::Blue] = b;
        if (shortest_path(g, actor, gem, ks)) return ks;
      }
    }
  }
  return std::nullopt;
}

namespace {

// Agent-side BFS distances; the agent never crosses walls, doors, or the human.
std::map<Position, std::pair<int, Position>> agent_bfs(const Grid& g, Position from) {
  std::map<Position, std::pair<int, Position>> dist;  // -> (steps, parent)
  std::queue<Position> q;
  dist[from] = {0, from};
  q.push(from);
  while (!q.empty()) {
    Position pos = q.front();
    q.pop();
    for (int d = 0; d < 4; ++d) {
      Position np{pos.row + kDR[d], pos.col + kDC[d]};
      if (!g.in_bounds(np) || dist.count(np)) continue;
      const Cell& cell = g.at(np);
      if (cell.kind == CellKind::Wall || cell.kind == CellKind::Door ||
          cell.kind == CellKind::Human)
        continue;
      dist[np] = {dist[pos].first + 1, pos};
      q.push(np);
    }
  }
  return dist;
}

Path trace(const std::map<Position, std::pair<int, Position>>& dist, Position from,
           Position to) {
  Path p;
  Position cur = to;
  while (!(cur == from)) {
    p.cells.push_back(cur);
    cur = dist.at(cur).second;
  }
  p.cells.push_back(from);
  std::reverse(p.cells.begin(), p.cells.end());
  return p;
}

}  // namespace

PlanResult agent_fetch_plan(const Grid& g, const KeyMultiset& needed) {
  Plan plan;
  if (total_keys(needed) == 0) return plan;

  for (const auto& [c, n] : needed)
    if (n > g.count(CellKind::Key, c)) return PlanError{PlanErrorKind::InsufficientKeys, c};

  Position cur = g.agent();
  KeyMultiset remaining = needed;
  std::set<Position> picked;
  std::vector<Color> collected;
  while (total_keys(remaining) > 0) {
    auto dist = agent_bfs(g, cur);
    std::optional<Position> choice;
    int best_d = 0;
    for (const auto& [c, n] : remaining) {
      if (n == 0) continue;
      for (Position kp : g.locate(CellKind::Key, c)) {
        if (picked.count(kp)) continue;
        auto it = dist.find(kp);
        if (it == dist.end()) continue;
        int d = it->second.first;
        if (!choice || d < best_d || (d == best_d && kp < *choice)) {
          choice = kp;
          best_d = d;
        }
      }
    }
    if (!choice) {
      for (const auto& [c, n] : remaining)
        if (n > 0) return PlanError{PlanErrorKind::InsufficientKeys, c};
      return PlanError{PlanErrorKind::InsufficientKeys, std::nullopt};
    }
    if (best_d > 0) {
      AgentAction mv{AgentAction::Kind::MoveAlong};
      mv.path = trace(dist, cur, *choice);
      plan.total_steps += mv.path.steps();
      plan.actions.push_back(std::move(mv));
    }
    AgentAction pk{AgentAction::Kind::PickUp};
    pk.pos = *choice;
    plan.actions.push_back(pk);
    Color c = g.at(*choice).color;
    remaining[c] -= 1;
    collected.push_back(c);
    picked.insert(*choice);
    cur = *choice;
  }

  // Deliver: move to a cell 4-adjacent to the human, then pass the keys.
  auto dist = agent_bfs(g, cur);
  Position h = g.human();
  std::optional<Position> target;
  int best_d = 0;
  for (int d = 0; d < 4; ++d) {
    Position np{h.row + kDR[d], h.col + kDC[d]};
    auto it = dist.find(np);
    if (it == dist.end()) continue;
    int steps = it->second.first;
    if (!target || steps < best_d || (steps == best_d && np < *target)) {
      target = np;
      best_d = steps;
    }
  }
  if (!target) return PlanError{PlanErrorKind::CannotReachHuman, std::nullopt};
  if (best_d > 0) {
    AgentAction mv{AgentAction::Kind::MoveAlong};
    mv.path = trace(dist, cur, *target);
    plan.total_steps += mv.path.steps();
    plan.actions.push_back(std::move(mv));
  }
  AgentAction pass{AgentAction::Kind::PassKeys};
  std::sort(collected.begin(), collected.end());
  pass.colors = collected;
  plan.actions.push_back(std::move(pass));
  return plan;
}

SimResult simulate(const Grid& g, const Plan& plan) {
  SimResult res;
  res.state.agent = g.agent();
  std::set<Position> picked, opened;
  Position human = g.human();
  auto fail = [&](int i, std::string why) {
    res.ok = false;
    res.violation_index = i;
    res.reason = std::move(why);
    return res;
  };
  auto adjacent = [](Position a, Position b) {
    return std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1;
  };
  for (size_t i = 0; i < plan.actions.size(); ++i) {
    const AgentAction& a = plan.actions[i];
    int idx = static_cast<int>(i);
    switch (a.kind) {
      case AgentAction::Kind::MoveAlong: {
        if (a.path.cells.empty()) return fail(idx, "empty movement path");
        if (!(a.path.cells.front() == res.state.agent))
          return fail(idx, "path does not start at agent position");
        for (size_t j = 1; j < a.path.cells.size(); ++j) {
          Position p = a.path.cells[j];
          if (!g.in_bounds(p)) return fail(idx, "path leaves the grid at " + coord(p));
          if (!adjacent(a.path.cells[j - 1], p))
            return fail(idx, "path cells not 4-adjacent at " + coord(p));
          const Cell& cell = g.at(p);
          if (cell.kind == CellKind::Wall) return fail(idx, "path crosses wall at " + coord(p));
          if (cell.kind == CellKind::Door && !opened.count(p))
            return fail(idx, "path crosses locked door at " + coord(p));
        }
        res.state.agent = a.path.cells.back();
        break;
      }
      case AgentAction::Kind::PickUp: {
        if (g.at(a.pos).kind != CellKind::Key || picked.count(a.pos))
          return fail(idx, "no key to pick up at " + coord(a.pos));
        if (!(res.state.agent == a.pos))
          return fail(idx, "agent not at key position " + coord(a.pos));
        picked.insert(a.pos);
        res.state.held[g.at(a.pos).color] += 1;
        break;
      }
      case AgentAction::Kind::PassKeys: {
        if (!adjacent(res.state.agent, human))
          return fail(idx, "agent not adjacent to human");
        KeyMultiset want;
        for (Color c : a.colors) want[c] += 1;
        for (const auto& [c, n] : want)
          if (res.state.held[c] < n)
            return fail(idx, std::string("passing keys not held: ") + std::string(color_name(c)));
        for (const auto& [c, n] : want) {
          res.state.held[c] -= n;
          res.state.passed[c] += n;
        }
        break;
      }
      case AgentAction::Kind::Unlock: {
        if (g.at(a.pos).kind != CellKind::Door || opened.count(a.pos))
          return fail(idx, "no locked door at " + coord(a.pos));
        if (!adjacent(res.state.agent, a.pos))
          return fail(idx, "agent not adjacent to door " + coord(a.pos));
        Color c = g.at(a.pos).color;
        if (res.state.held[c] < 1)
          return fail(idx, std::string("unlocking without a ") + std::string(color_name(c)) + " key");
        res.state.held[c] -= 1;
        opened.insert(a.pos);
        break;
      }
    }
  }
  res.ok = true;
  res.state.opened_doors.assign(opened.begin(), opened.end());
  return res;
}

}  // namespace dkg
