#include "dkg/grid.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dkg {

std::string_view color_name(Color c) {
  switch (c) {
    case Color::Red: return "red";
    case Color::Yellow: return "yellow";
    case Color::Blue: return "blue";
  }
  return "?";
}

std::optional<Color> color_from_word(std::string_view w) {
  if (w == "red") return Color::Red;
  if (w == "yellow") return Color::Yellow;
  if (w == "blue") return Color::Blue;
  return std::nullopt;
}

std::string coord(const Position& p) {
  return "(" + std::to_string(p.row) + ", " + std::to_string(p.col) + ")";
}

char cell_to_char(const Cell& c) {
  switch (c.kind) {
    case CellKind::Wall: return 'W';
    case CellKind::Empty: return '.';
    case CellKind::Gem: return 'g';
    case CellKind::Human: return 'h';
    case CellKind::Agent: return 'm';
    case CellKind::Key:
      switch (c.color) {
        case Color::Red: return 'r';
        case Color::Yellow: return 'y';
        case Color::Blue: return 'b';
      }
      break;
    case CellKind::Door:
      switch (c.color) {
        case Color::Red: return 'R';
        case Color::Yellow: return 'Y';
        case Color::Blue: return 'B';
      }
      break;
  }
  return '?';
}

std::optional<Cell> cell_from_char(char ch) {
  switch (ch) {
    case 'W': return Cell{CellKind::Wall};
    case '.': return Cell{CellKind::Empty};
    case 'g': return Cell{CellKind::Gem};
    case 'h': return Cell{CellKind::Human};
    case 'm': return Cell{CellKind::Agent};
    case 'r': return Cell{CellKind::Key, Color::Red};
    case 'y': return Cell{CellKind::Key, Color::Yellow};
    case 'b': return Cell{CellKind::Key, Color::Blue};
    case 'R': return Cell{CellKind::Door, Color::Red};
    case 'Y': return Cell{CellKind::Door, Color::Yellow};
    case 'B': return Cell{CellKind::Door, Color::Blue};
    default: return std::nullopt;
  }
}

Grid Grid::parse(const std::string& text, std::string id) {
  Grid g;
  g.id_ = std::move(id);
  std::istringstream in(text);
  std::string line;
  int row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (first && line.rfind("# id:", 0) == 0) {
      std::string name = line.substr(5);
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t\r") + 1);
      if (g.id_.empty()) g.id_ = name;
      first = false;
      continue;
    }
    first = false;
    std::vector<Cell> cells;
    int col = 0;
    for (char ch : line) {
      if (ch == '[' || ch == ']' || ch == '\'' || ch == '"' || ch == ' ' ||
          ch == '\t' || ch == '\r' || ch == ',')
        continue;
      auto cell = cell_from_char(ch);
      if (!cell)
        throw GridError("UnknownCharacter '" + std::string(1, ch) + "' at (" +
                        std::to_string(row) + ", " + std::to_string(col) + ")");
      cells.push_back(*cell);
      ++col;
    }
    if (cells.empty()) continue;
    if (!g.cells_.empty() && cells.size() != g.cells_[0].size())
      throw GridError("NonRectangular: row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(g.cells_[0].size()));
    g.cells_.push_back(std::move(cells));
    ++row;
  }
  if (g.cells_.empty()) throw GridError("empty grid document");

  auto humans = g.locate(CellKind::Human);
  auto agents = g.locate(CellKind::Agent);
  if (humans.empty()) throw GridError("MissingHuman");
  if (humans.size() > 1) throw GridError("DuplicateHuman at " + coord(humans[1]));
  if (agents.empty()) throw GridError("MissingAgent");
  if (agents.size() > 1) throw GridError("DuplicateAgent at " + coord(agents[1]));
  return g;
}

Grid Grid::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GridError("cannot open grid file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Grid Grid::from_cells(std::vector<std::vector<Cell>> cells, std::string id) {
  Grid g;
  g.cells_ = std::move(cells);
  g.id_ = std::move(id);
  for (const auto& row : g.cells_)
    if (row.size() != g.cells_[0].size()) throw GridError("NonRectangular");
  return g;
}

Position Grid::agent() const {
  auto v = locate(CellKind::Agent);
  if (v.empty()) throw GridError("MissingAgent");
  return v[0];
}

Position Grid::human() const {
  auto v = locate(CellKind::Human);
  if (v.empty()) throw GridError("MissingHuman");
  return v[0];
}

std::string Grid::render() const {
  std::string out;
  for (int r = 0; r < height(); ++r) {
    if (r > 0) out += '\n';
    for (int c = 0; c < width(); ++c) out += cell_to_char(cells_[r][c]);
  }
  return out;
}

std::string Grid::render_matrix_block() const {
  std::string out;
  for (int r = 0; r < height(); ++r) {
    out += (r == 0) ? "[[" : " [";
    for (int c = 0; c < width(); ++c) {
      if (c > 0) out += ' ';
      out += '\'';
      out += cell_to_char(cells_[r][c]);
      out += '\'';
    }
    out += (r == height() - 1) ? "]]" : "]\n";
  }
  return out;
}

std::vector<Position> Grid::locate(CellKind kind) const {
  std::vector<Position> out;
  for (int r = 0; r < height(); ++r)
    for (int c = 0; c < width(); ++c)
      if (cells_[r][c].kind == kind) out.push_back({r, c});
  return out;
}

std::vector<Position> Grid::locate(CellKind kind, Color color) const {
  std::vector<Position> out;
  for (int r = 0; r < height(); ++r)
    for (int c = 0; c < width(); ++c)
      if (cells_[r][c].kind == kind && cells_[r][c].color == color)
        out.push_back({r, c});
  return out;
}

int Grid::count(CellKind kind) const { return static_cast<int>(locate(kind).size()); }
int Grid::count(CellKind kind, Color color) const {
  return static_cast<int>(locate(kind, color).size());
}

namespace {

std::string cap(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(out[0]));
  return out;
}

std::string join_coords(const std::vector<Position>& ps) {
  std::string out;
  for (size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ", ";
    out += coord(ps[i]);
  }
  return out;
}

// "Red key (Labeled as 'r'): (0, 0) --> Total Red key: 1"
void listing_line(std::string& out, const std::string& singular,
                  const std::string& plural, char label,
                  const std::vector<Position>& ps) {
  if (ps.empty()) return;
  const std::string& name = ps.size() == 1 ? singular : plural;
  out += name + " (Labeled as '" + label + "'): " + join_coords(ps) +
         " --> Total " + name + ": " + std::to_string(ps.size()) + "\n";
}

}  // namespace

std::string Grid::describe() const {
  std::string out;
  out += "My position (Labeled as 'm'): " + coord(agent()) + "\n";
  out += "Human (Labeled as 'h'): " + coord(human()) + "\n";
  for (Color c : kAllColors) {
    std::string name = cap(color_name(c));
    listing_line(out, name + " key", name + " keys",
                 cell_to_char(Cell{CellKind::Key, c}), locate(CellKind::Key, c));
  }
  for (Color c : kAllColors) {
    std::string name = cap(color_name(c));
    listing_line(out, name + " door", name + " doors",
                 cell_to_char(Cell{CellKind::Door, c}), locate(CellKind::Door, c));
  }
  listing_line(out, "Gem", "Gems", 'g', locate(CellKind::Gem));
  listing_line(out, "Wall", "Walls", 'W', locate(CellKind::Wall));
  listing_line(out, "Empty space", "Empty spaces", '.', locate(CellKind::Empty));
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

void Grid::validate() const {
  if (count(CellKind::Gem) == 0) throw GridError("MissingGem");
}

}  // namespace dkg
