#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pcgnn/rng.hpp"

namespace pcgnn {

enum class GameId { Maze, Mario };

struct TileInfo {
    int index;
    char glyph;
    bool solid;
    bool hazard;
};

class Tileset {
public:
    Tileset(GameId game, std::vector<TileInfo> tiles);

    GameId game() const { return game_; }
    int size() const { return static_cast<int>(tiles_.size()); }
    char glyph(int index) const { return tiles_[index].glyph; }
    bool solid(int index) const { return tiles_[index].solid; }
    bool hazard(int index) const { return tiles_[index].hazard; }
    std::optional<int> index_of(char glyph) const;

private:
    GameId game_;
    std::vector<TileInfo> tiles_;
    std::array<std::int8_t, 256> by_glyph_;
};

// Maze: empty '.', wall '#'.
const Tileset& maze_tileset();
// Mario: empty '-', solid 'X', brick 'S', question '?', coin 'o', enemy 'E'.
const Tileset& mario_tileset();
const Tileset& tileset_for(GameId game);

struct Level {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> cells;  // row-major, cells[y * width + x]
    const Tileset* tileset = nullptr;

    Level() = default;
    Level(int width, int height, const Tileset& tileset, std::uint8_t fill = 0);

    int at(int x, int y) const { return cells[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { cells[static_cast<std::size_t>(y) * width + x] = v; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool solid_at(int x, int y) const { return tileset->solid(at(x, y)); }
    bool hazard_at(int x, int y) const { return tileset->hazard(at(x, y)); }

    bool operator==(const Level& other) const {
        return width == other.width && height == other.height && tileset == other.tileset &&
               cells == other.cells;
    }
};

struct LevelParseError : std::runtime_error {
    LevelParseError(const std::string& msg, int line, int column)
        : std::runtime_error(msg), line(line), column(column) {}
    int line;    // 0-based
    int column;  // 0-based
};

// Row-major neighborhood of a cell, center excluded, -1 where the window
// leaves the level.
struct PaddedWindow {
    std::vector<int> values;
    int context = 1;
};

Level parse_level(std::string_view text, const Tileset& tileset);

// One text line per row, trailing newline; inverse of parse_level.
std::string serialize_level(const Level& level);

Level random_level(int width, int height, const Tileset& tileset, Rng& rng);

PaddedWindow padded_window(const Level& level, int x, int y, int context_size);
void padded_window_into(const Level& level, int x, int y, int context_size, std::vector<int>& out);

// Number of -1 entries a window at (x, y) contains, in closed form.
int padded_window_negative_count(int x, int y, int context_size, int width, int height);

// PGM (P2) rendering, one gray value per tile, tile_index scaled to 0..255.
std::string render_pgm(const Level& level);

}  // namespace pcgnn
