#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dkg {

enum class Color { Red, Yellow, Blue };

constexpr Color kAllColors[] = {Color::Red, Color::Yellow, Color::Blue};

std::string_view color_name(Color c);                       // "red"
std::optional<Color> color_from_word(std::string_view w);   // open vocabulary words return nullopt

struct Position {
  int row = 0;
  int col = 0;
  auto operator<=>(const Position&) const = default;
};

// "(row, col)" with a space after the comma, matching the grid listing format.
std::string coord(const Position& p);

enum class CellKind { Wall, Empty, Key, Door, Gem, Human, Agent };

struct Cell {
  CellKind kind = CellKind::Empty;
  Color color = Color::Red;  // meaningful only for Key and Door

  bool operator==(const Cell& o) const {
    if (kind != o.kind) return false;
    if (kind == CellKind::Key || kind == CellKind::Door) return color == o.color;
    return true;
  }
};

char cell_to_char(const Cell& c);
std::optional<Cell> cell_from_char(char ch);

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable rectangular gridworld. Character code: 'r'/'y'/'b' keys,
// 'R'/'Y'/'B' doors, 'g' gem, 'W' wall, '.' empty, 'm' agent, 'h' human.
// Green is unsupported on-grid; 'g' is reserved for gems.
class Grid {
 public:
  // Accepts a plain character matrix, one row per line. Decoration
  // characters ([ ] ' " and spaces) are stripped, so the bracketed
  // matrix form used inside prompts parses too. An optional leading
  // "# id: <string>" line names the grid.
  static Grid parse(const std::string& text, std::string id = "");
  static Grid load_file(const std::string& path);

  // Relaxed builder for tests; skips the one-human/one-agent checks.
  static Grid from_cells(std::vector<std::vector<Cell>> cells, std::string id = "");

  int height() const { return static_cast<int>(cells_.size()); }
  int width() const { return cells_.empty() ? 0 : static_cast<int>(cells_[0].size()); }
  bool in_bounds(Position p) const {
    return p.row >= 0 && p.row < height() && p.col >= 0 && p.col < width();
  }
  const Cell& at(Position p) const { return cells_[p.row][p.col]; }
  const std::string& id() const { return id_; }

  Position agent() const;
  Position human() const;

  std::string render() const;              // plain matrix, inverse of parse
  std::string render_matrix_block() const; // bracketed matrix used in prompts
  std::string describe() const;            // object listing with coordinates and totals

  std::vector<Position> locate(CellKind kind) const;                  // row-major
  std::vector<Position> locate(CellKind kind, Color color) const;     // row-major
  int count(CellKind kind) const;
  int count(CellKind kind, Color color) const;

  // Checks invariants not enforced at parse: at least one gem.
  void validate() const;

  bool operator==(const Grid& o) const { return cells_ == o.cells_; }

 private:
  Grid() = default;
  std::vector<std::vector<Cell>> cells_;
  std::string id_;
};

}  // namespace dkg
