#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pcgnn/tilemap.hpp"

namespace pcgnn {

struct SearchResult {
    bool solvable = false;
    std::vector<std::pair<int, int>> trajectory;  // (x, y), start first
    std::int64_t expanded = 0;                    // states popped from the frontier
};

// A* with Manhattan heuristic over empty cells, 4-connected, from (0,0) to
// (width-1, height-1). Ties pop in (f, g, y, x) order so expansion counts are
// reproducible. A walled start aborts before any expansion.
SearchResult solve_maze(const Level& level);

struct PlatformerState {
    int x = 0;
    int y = 0;
    bool airborne = false;
    int jump_power_left = 0;  // 0..4; > 0 implies airborne
};

// Movement rules: a grounded state may step left/right or start a jump with
// power 1..4, where starting a jump is the first, strictly vertical tile of
// ascent and leaves power-1 units. While ascending, each step moves up one
// tile with an optional +-1 lateral shift; a solid cell (or the level border)
// directly above halts the jump and zeroes the remaining power. With no power
// left and no support below, each step falls one tile with an optional +-1
// lateral shift. Moves into solid or hazard cells or out of bounds are
// discarded.
std::vector<PlatformerState> platformer_successors(const PlatformerState& state, const Level& level);

// A* from the lowest supported cell of column 0 (falling entry at the top if
// the column has no support) to any state in the last column, heuristic =
// horizontal distance to the right edge.
SearchResult solve_platformer(const Level& level);

SearchResult solve_level(const Level& level, GameId game);

// "step,x,y" rows for plotting.
std::string trajectory_csv(const SearchResult& result);

}  // namespace pcgnn
