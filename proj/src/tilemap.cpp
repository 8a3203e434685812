#include "pcgnn/tilemap.hpp"

#include <sstream>

namespace pcgnn {

Tileset::Tileset(GameId game, std::vector<TileInfo> tiles) : game_(game), tiles_(std::move(tiles)) {
    by_glyph_.fill(-1);
    for (const auto& t : tiles_) {
        by_glyph_[static_cast<unsigned char>(t.glyph)] = static_cast<std::int8_t>(t.index);
    }
}

std::optional<int> Tileset::index_of(char glyph) const {
    std::int8_t idx = by_glyph_[static_cast<unsigned char>(glyph)];
    if (idx < 0) return std::nullopt;
    return static_cast<int>(idx);
}

const Tileset& maze_tileset() {
    static const Tileset ts(GameId::Maze, {
                                              {0, '.', false, false},
                                              {1, '#', true, false},
                                          });
    return ts;
}

const Tileset& mario_tileset() {
    static const Tileset ts(GameId::Mario, {
                                               {0, '-', false, false},
                                               {1, 'X', true, false},
                                               {2, 'S', true, false},
                                               {3, '?', true, false},
                                               {4, 'o', false, false},
                                               {5, 'E', false, true},
                                           });
    return ts;
}

const Tileset& tileset_for(GameId game) {
    return game == GameId::Maze ? maze_tileset() : mario_tileset();
}

Level::Level(int width, int height, const Tileset& tileset, std::uint8_t fill)
    : width(width),
      height(height),
      cells(static_cast<std::size_t>(width) * height, fill),
      tileset(&tileset) {
    if (width < 1 || height < 1) throw std::invalid_argument("level dimensions must be positive");
}

Level parse_level(std::string_view text, const Tileset& tileset) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    // A trailing newline leaves no phantom row behind.
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw LevelParseError("empty level text", 0, 0);

    const int width = static_cast<int>(lines[0].size());
    const int height = static_cast<int>(lines.size());
    if (width == 0) throw LevelParseError("empty first line", 0, 0);

    Level level(width, height, tileset);
    for (int y = 0; y < height; ++y) {
        if (static_cast<int>(lines[y].size()) != width) {
            std::ostringstream msg;
            msg << "ragged line " << y << ": expected " << width << " glyphs, got "
                << lines[y].size();
            throw LevelParseError(msg.str(), y, static_cast<int>(lines[y].size()));
        }
        for (int x = 0; x < width; ++x) {
            auto idx = tileset.index_of(lines[y][x]);
            if (!idx) {
                std::ostringstream msg;
                msg << "unknown glyph '" << lines[y][x] << "' at (" << y << "," << x << ")";
                throw LevelParseError(msg.str(), y, x);
            }
            level.set(x, y, static_cast<std::uint8_t>(*idx));
        }
    }
    return level;
}

std::string serialize_level(const Level& level) {
    std::string out;
    out.reserve(static_cast<std::size_t>(level.height) * (level.width + 1));
    for (int y = 0; y < level.height; ++y) {
        for (int x = 0; x < level.width; ++x) out.push_back(level.tileset->glyph(level.at(x, y)));
        out.push_back('\n');
    }
    return out;
}

Level random_level(int width, int height, const Tileset& tileset, Rng& rng) {
    if (width < 2 || height < 2) throw std::invalid_argument("random_level needs width, height >= 2");
    Level level(width, height, tileset);
    const auto n = static_cast<std::uint64_t>(tileset.size());
    for (auto& cell : level.cells) cell = static_cast<std::uint8_t>(rng.below(n));
    return level;
}

void padded_window_into(const Level& level, int x, int y, int context_size, std::vector<int>& out) {
    if (!level.in_bounds(x, y)) throw std::out_of_range("padded_window center outside level");
    if (context_size < 1) throw std::invalid_argument("context_size must be >= 1");
    out.clear();
    for (int dy = -context_size; dy <= context_size; ++dy) {
        for (int dx = -context_size; dx <= context_size; ++dx) {
            if (dx == 0 && dy == 0) continue;  // center is the prediction target
            int nx = x + dx, ny = y + dy;
            out.push_back(level.in_bounds(nx, ny) ? level.at(nx, ny) : -1);
        }
    }
}

PaddedWindow padded_window(const Level& level, int x, int y, int context_size) {
    PaddedWindow window;
    window.context = context_size;
    padded_window_into(level, x, y, context_size, window.values);
    return window;
}

int padded_window_negative_count(int x, int y, int context_size, int width, int height) {
    const int c = context_size;
    const int side = 2 * c + 1;
    int in_x = std::min(x + c, width - 1) - std::max(x - c, 0) + 1;
    int in_y = std::min(y + c, height - 1) - std::max(y - c, 0) + 1;
    return side * side - in_x * in_y;
}

std::string render_pgm(const Level& level) {
    const int n = level.tileset->size();
    std::ostringstream out;
    out << "P2\n" << level.width << ' ' << level.height << "\n255\n";
    for (int y = 0; y < level.height; ++y) {
        for (int x = 0; x < level.width; ++x) {
            if (x) out << ' ';
            out << level.at(x, y) * 255 / (n - 1);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace pcgnn
