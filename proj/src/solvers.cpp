#include "pcgnn/solvers.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <tuple>

namespace pcgnn {
namespace {

constexpr int kMaxJumpPower = 4;

bool passable(const Level& level, int x, int y) {
    return level.in_bounds(x, y) && !level.solid_at(x, y) && !level.hazard_at(x, y);
}

bool has_support(const Level& level, int x, int y) {
    return y + 1 < level.height && level.solid_at(x, y + 1);
}

PlatformerState make_state(const Level& level, int x, int y, int power) {
    PlatformerState s;
    s.x = x;
    s.y = y;
    s.jump_power_left = power;
    s.airborne = power > 0 || !has_support(level, x, y);
    return s;
}

std::optional<PlatformerState> platformer_start(const Level& level) {
    for (int y = level.height - 1; y >= 0; --y) {
        if (passable(level, 0, y) && has_support(level, 0, y)) return make_state(level, 0, y, 0);
    }
    if (passable(level, 0, 0)) return make_state(level, 0, 0, 0);
    return std::nullopt;
}

}  // namespace

SearchResult solve_maze(const Level& level) {
    SearchResult result;
    const int w = level.width, h = level.height;
    if (level.solid_at(0, 0)) return result;  // no search happens at all

    const int goal = (h - 1) * w + (w - 1);
    const int start = 0;
    auto heuristic = [&](int idx) {
        int x = idx % w, y = idx / w;
        return (w - 1 - x) + (h - 1 - y);
    };

    std::vector<std::int64_t> best_g(static_cast<std::size_t>(w) * h,
                                     std::numeric_limits<std::int64_t>::max());
    std::vector<int> parent(static_cast<std::size_t>(w) * h, -1);
    std::vector<char> closed(static_cast<std::size_t>(w) * h, 0);

    using Entry = std::tuple<std::int64_t, std::int64_t, int, int>;  // f, g, y, x
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
    best_g[start] = 0;
    open.emplace(heuristic(start), 0, 0, 0);

    bool found = false;
    while (!open.empty()) {
        auto [f, g, y, x] = open.top();
        open.pop();
        int idx = y * w + x;
        if (closed[idx] || g != best_g[idx]) continue;
        closed[idx] = 1;
        ++result.expanded;
        if (idx == goal) {
            found = true;
            break;
        }
        static constexpr int dxs[4] = {0, 0, -1, 1};
        static constexpr int dys[4] = {-1, 1, 0, 0};
        for (int k = 0; k < 4; ++k) {
            int nx = x + dxs[k], ny = y + dys[k];
            if (!level.in_bounds(nx, ny) || level.solid_at(nx, ny)) continue;
            int nidx = ny * w + nx;
            std::int64_t ng = g + 1;
            if (ng < best_g[nidx]) {
                best_g[nidx] = ng;
                parent[nidx] = idx;
                open.emplace(ng + heuristic(nidx), ng, ny, nx);
            }
        }
    }

    if (!found) return result;
    result.solvable = true;
    for (int idx = goal; idx != -1; idx = parent[idx]) result.trajectory.emplace_back(idx % w, idx / w);
    std::reverse(result.trajectory.begin(), result.trajectory.end());
    return result;
}

std::vector<PlatformerState> platformer_successors(const PlatformerState& state, const Level& level) {
    std::vector<PlatformerState> out;
    const int x = state.x, y = state.y;
    const bool grounded = state.jump_power_left == 0 && has_support(level, x, y);

    if (grounded) {
        for (int dx : {-1, 1}) {
            if (passable(level, x + dx, y)) out.push_back(make_state(level, x + dx, y, 0));
        }
        if (passable(level, x, y - 1)) {
            for (int power = 1; power <= kMaxJumpPower; ++power) {
                out.push_back(make_state(level, x, y - 1, power - 1));
            }
        }
    } else if (state.jump_power_left > 0) {
        for (int dx : {-1, 0, 1}) {
            if (passable(level, x + dx, y - 1)) {
                out.push_back(make_state(level, x + dx, y - 1, state.jump_power_left - 1));
            }
        }
        bool head_blocked = y - 1 < 0 || level.solid_at(x, y - 1);
        if (head_blocked) out.push_back(make_state(level, x, y, 0));
    } else {
        for (int dx : {-1, 0, 1}) {
            if (passable(level, x + dx, y + 1)) out.push_back(make_state(level, x + dx, y + 1, 0));
        }
    }
    return out;
}

SearchResult solve_platformer(const Level& level) {
    SearchResult result;
    const int w = level.width, h = level.height;
    auto start = platformer_start(level);
    if (!start) return result;  // column 0 offers no entry

    const int states = w * h * (kMaxJumpPower + 1);
    auto encode = [&](const PlatformerState& s) {
        return (s.y * w + s.x) * (kMaxJumpPower + 1) + s.jump_power_left;
    };

    std::vector<std::int64_t> best_g(states, std::numeric_limits<std::int64_t>::max());
    std::vector<int> parent(states, -1);
    std::vector<char> closed(states, 0);

    // f, g, y, x, power
    using Entry = std::tuple<std::int64_t, std::int64_t, int, int, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;

    auto heuristic = [&](int x) { return w - 1 - x; };
    auto push = [&](const PlatformerState& s, std::int64_t g, int from) {
        int idx = encode(s);
        if (g < best_g[idx]) {
            best_g[idx] = g;
            parent[idx] = from;
            open.emplace(g + heuristic(s.x), g, s.y, s.x, s.jump_power_left);
        }
    };

    push(*start, 0, -1);
    int goal_idx = -1;
    while (!open.empty()) {
        auto [f, g, y, x, power] = open.top();
        open.pop();
        PlatformerState s = make_state(level, x, y, power);
        int idx = encode(s);
        if (closed[idx] || g != best_g[idx]) continue;
        closed[idx] = 1;
        ++result.expanded;
        if (x == w - 1) {
            goal_idx = idx;
            break;
        }
        for (const auto& next : platformer_successors(s, level)) push(next, g + 1, idx);
    }

    if (goal_idx < 0) return result;
    result.solvable = true;
    for (int idx = goal_idx; idx != -1; idx = parent[idx]) {
        int cell = idx / (kMaxJumpPower + 1);
        result.trajectory.emplace_back(cell % w, cell / w);
    }
    std::reverse(result.trajectory.begin(), result.trajectory.end());
    return result;
}

SearchResult solve_level(const Level& level, GameId game) {
    return game == GameId::Maze ? solve_maze(level) : solve_platformer(level);
}

std::string trajectory_csv(const SearchResult& result) {
    std::ostringstream out;
    out << "step,x,y\n";
    for (std::size_t i = 0; i < result.trajectory.size(); ++i) {
        out << i << ',' << result.trajectory[i].first << ',' << result.trajectory[i].second << '\n';
    }
    return out.str();
}

}  // namespace pcgnn
