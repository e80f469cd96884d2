#include "hire/grid/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace hire {

namespace {

// Headings: 0=N 1=E 2=S 3=W, y grows downward.
constexpr int kFx[4] = {0, 1, 0, -1};
constexpr int kFy[4] = {-1, 0, 1, 0};

bool walkable(Cell c) {
  return c == Cell::Floor || c == Cell::DoorOpen || c == Cell::Goal ||
         c == Cell::Lava;
}

// n door colors, distinct while the palette lasts, reshuffled per block of
// kNumColors when a layout needs more doors than there are colors.
std::vector<uint8_t> door_palette(Rng& rng, int n) {
  std::vector<uint8_t> out;
  while (static_cast<int>(out.size()) < n) {
    uint8_t block[kNumColors];
    for (int i = 0; i < kNumColors; ++i) block[i] = static_cast<uint8_t>(i + 1);
    for (int i = kNumColors - 1; i > 0; --i)
      std::swap(block[i], block[rng.uniform_int(0, i)]);
    for (int i = 0; i < kNumColors && static_cast<int>(out.size()) < n; ++i)
      out.push_back(block[i]);
  }
  return out;
}

}  // namespace

Family family_from_name(const std::string& s) {
  if (s == "MultiRoom") return Family::MultiRoom;
  if (s == "KeyCorridor") return Family::KeyCorridor;
  if (s == "DynamicObstacles") return Family::DynamicObstacles;
  throw std::invalid_argument("unknown env family: " + s);
}

const char* family_name(Family f) {
  switch (f) {
    case Family::MultiRoom: return "MultiRoom";
    case Family::KeyCorridor: return "KeyCorridor";
    case Family::DynamicObstacles: return "DynamicObstacles";
  }
  return "?";
}

void GridSpec::validate() const {
  if (family == Family::MultiRoom && n_rooms < 2)
    throw std::invalid_argument("MultiRoom needs n_rooms >= 2");
  if (family == Family::KeyCorridor && n_rooms < 2)
    throw std::invalid_argument("KeyCorridor needs n_rooms >= 2");
  if (family != Family::DynamicObstacles && room_size < 4)
    throw std::invalid_argument("room_size must be >= 4");
  if (family == Family::DynamicObstacles) {
    if (grid_w < 5 || grid_h < 5)
      throw std::invalid_argument("DynamicObstacles grid must be >= 5x5");
    int open = (grid_w - 2) * (grid_h - 2);
    if (n_obstacles < 1 || n_obstacles > open / 4)
      throw std::invalid_argument("n_obstacles out of range for grid size");
  }
  if (max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
}

int GridSpec::resolved_max_steps() const {
  if (max_steps > 0) return max_steps;
  switch (family) {
    case Family::MultiRoom: return 40 * n_rooms;
    case Family::KeyCorridor: return 30 * room_size * n_rooms;
    case Family::DynamicObstacles: return 4 * grid_w * grid_h;
  }
  return 256;
}

std::string GridSpec::task_label() const {
  switch (family) {
    case Family::MultiRoom:
      return "MultiRoom-N" + std::to_string(n_rooms) + "-S" +
             std::to_string(room_size);
    case Family::KeyCorridor:
      return "KeyCorridor-S" + std::to_string(room_size) + "-R" +
             std::to_string(n_rooms);
    case Family::DynamicObstacles:
      return "DynObstacles-" + std::to_string(grid_w) + "x" +
             std::to_string(grid_h) + "-O" + std::to_string(n_obstacles);
  }
  return "?";
}

GridWorld::GridWorld(const GridSpec& spec, uint64_t seed)
    : spec_(spec), rng_(seed) {
  spec_.validate();
  reset(seed);
}

void GridWorld::reset(uint64_t seed) {
  rng_ = Rng(seed);
  max_steps_ = spec_.resolved_max_steps();
  // A handful of fresh attempts if a layout comes out unsolvable; with the
  // constructive generators this should never trigger, but the check is
  // cheap insurance against a generator bug silently shipping broken mazes.
  for (int attempt = 0; attempt < 16; ++attempt) {
    t_ = 0;
    finished_ = false;
    carrying_key_ = false;
    obstacles_.clear();
    generate(rng_);
    bool ok;
    if (spec_.family == Family::KeyCorridor) {
      ok = reachable(ax_, ay_, Cell::Key, false) &&
           reachable(ax_, ay_, Cell::Goal, true);
    } else {
      ok = reachable(ax_, ay_, Cell::Goal, true);
    }
    if (ok) return;
  }
  throw std::runtime_error("unsolvable layout for seed " +
                           std::to_string(seed) + " (" +
                           std::string(family_name(spec_.family)) + ")");
}

void GridWorld::generate(Rng& rng) {
  switch (spec_.family) {
    case Family::MultiRoom: gen_multiroom(rng); break;
    case Family::KeyCorridor: gen_keycorridor(rng); break;
    case Family::DynamicObstacles: gen_dynobstacles(rng); break;
  }
}

// Chain of rooms in random directions, consecutive rooms sharing a wall with
// one connecting door. Built in unbounded coordinates, then translated onto
// a tight canvas.
void GridWorld::gen_multiroom(Rng& rng) {
  const int s = spec_.room_size;
  const int n = spec_.n_rooms;
  std::vector<std::pair<int, int>> origins;
  for (int restart = 0; restart < 200; ++restart) {
    origins.assign(1, {0, 0});
    while (static_cast<int>(origins.size()) < n) {
      auto [ox, oy] = origins.back();
      int dirs[4] = {0, 1, 2, 3};
      for (int i = 3; i > 0; --i)
        std::swap(dirs[i], dirs[rng.uniform_int(0, i)]);
      bool placed = false;
      for (int d : dirs) {
        int nx = ox + kFx[d] * (s - 1), ny = oy + kFy[d] * (s - 1);
        // Origins live on an (s-1)-spaced lattice, so rooms either coincide,
        // share a wall, touch corners, or are apart. Only a revisited origin
        // is a real collision; wall-sharing between non-consecutive rooms is
        // harmless (no door is carved there).
        bool clash = false;
        for (auto [px, py] : origins) {
          if (px == nx && py == ny) {
            clash = true;
            break;
          }
        }
        if (!clash) {
          origins.push_back({nx, ny});
          placed = true;
          break;
        }
      }
      if (!placed) break;
    }
    if (static_cast<int>(origins.size()) == n) break;
  }
  if (static_cast<int>(origins.size()) != n)
    throw std::runtime_error("multiroom chain placement failed");

  int min_x = origins[0].first, min_y = origins[0].second;
  int max_x = min_x, max_y = min_y;
  for (auto [x, y] : origins) {
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
  w_ = max_x - min_x + s;
  h_ = max_y - min_y + s;
  grid_.assign(static_cast<size_t>(w_) * h_, Cell::Wall);
  colors_.assign(grid_.size(), 0);
  for (auto& [x, y] : origins) {
    x -= min_x;
    y -= min_y;
  }
  for (auto [ox, oy] : origins)
    for (int y = oy + 1; y < oy + s - 1; ++y)
      for (int x = ox + 1; x < ox + s - 1; ++x) cell(x, y) = Cell::Floor;

  std::vector<uint8_t> palette = door_palette(rng, n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    auto [ax, ay] = origins[i];
    auto [bx, by] = origins[i + 1];
    int off = static_cast<int>(rng.uniform_int(1, s - 2));
    int dx, dy;
    if (ax == bx) {  // vertically adjacent, door in the shared horizontal wall
      dx = ax + off;
      dy = std::max(ay, by);
    } else {
      dx = std::max(ax, bx);
      dy = ay + off;
    }
    cell(dx, dy) = Cell::DoorClosed;
    color(dx, dy) = palette[i];
  }

  auto [fx, fy] = origins.front();
  ax_ = fx + 1 + static_cast<int>(rng.uniform_int(0, s - 3));
  ay_ = fy + 1 + static_cast<int>(rng.uniform_int(0, s - 3));
  heading_ = static_cast<int>(rng.uniform_int(0, 3));
  auto [gx, gy] = origins.back();
  int goal_x, goal_y;
  do {
    goal_x = gx + 1 + static_cast<int>(rng.uniform_int(0, s - 3));
    goal_y = gy + 1 + static_cast<int>(rng.uniform_int(0, s - 3));
  } while (goal_x == ax_ && goal_y == ay_);
  cell(goal_x, goal_y) = Cell::Goal;
}

// One vertical corridor with n_rooms stacked to its right. Every room opens
// onto the corridor through a door; one random room holds the key, another
// holds the goal behind a locked door.
void GridWorld::gen_keycorridor(Rng& rng) {
  const int s = spec_.room_size;
  const int n = spec_.n_rooms;
  w_ = s + 2;
  h_ = n * (s - 1) + 1;
  grid_.assign(static_cast<size_t>(w_) * h_, Cell::Wall);
  colors_.assign(grid_.size(), 0);
  for (int y = 1; y < h_ - 1; ++y) cell(1, y) = Cell::Floor;
  for (int i = 0; i < n; ++i) {
    int r0 = i * (s - 1);
    for (int y = r0 + 1; y < r0 + s - 1; ++y)
      for (int x = 3; x <= s; ++x) cell(x, y) = Cell::Floor;
  }
  int key_room = static_cast<int>(rng.uniform_int(0, n - 1));
  int goal_room;
  do {
    goal_room = static_cast<int>(rng.uniform_int(0, n - 1));
  } while (goal_room == key_room);
  std::vector<uint8_t> palette = door_palette(rng, n);
  for (int i = 0; i < n; ++i) {
    int r0 = i * (s - 1);
    int door_y = r0 + 1 + static_cast<int>(rng.uniform_int(0, s - 3));
    cell(2, door_y) = (i == goal_room) ? Cell::DoorLocked : Cell::DoorClosed;
    color(2, door_y) = palette[i];
  }
  auto room_cell = [&](int room) {
    int r0 = room * (s - 1);
    int x = 3 + static_cast<int>(rng.uniform_int(0, s - 3));
    int y = r0 + 1 + static_cast<int>(rng.uniform_int(0, s - 3));
    return std::pair<int, int>{x, y};
  };
  auto [kx, ky] = room_cell(key_room);
  cell(kx, ky) = Cell::Key;
  color(kx, ky) = palette[goal_room];  // key matches the locked door
  auto [gx, gy] = room_cell(goal_room);
  cell(gx, gy) = Cell::Goal;
  ax_ = 1;
  ay_ = 1 + static_cast<int>(rng.uniform_int(0, h_ - 3));
  heading_ = static_cast<int>(rng.uniform_int(0, 3));
}

// Bordered open room, fixed start and goal corners, moving obstacles.
void GridWorld::gen_dynobstacles(Rng& rng) {
  w_ = spec_.grid_w;
  h_ = spec_.grid_h;
  grid_.assign(static_cast<size_t>(w_) * h_, Cell::Wall);
  colors_.assign(grid_.size(), 0);
  for (int y = 1; y < h_ - 1; ++y)
    for (int x = 1; x < w_ - 1; ++x) cell(x, y) = Cell::Floor;
  ax_ = 1;
  ay_ = 1;
  heading_ = 1;
  cell(w_ - 2, h_ - 2) = Cell::Goal;
  int placed = 0, tries = 0;
  while (placed < spec_.n_obstacles) {
    if (++tries > 1000)
      throw std::runtime_error("obstacle placement failed");
    int x = static_cast<int>(rng.uniform_int(1, w_ - 2));
    int y = static_cast<int>(rng.uniform_int(1, h_ - 2));
    if (cell(x, y) != Cell::Floor || (x == ax_ && y == ay_)) continue;
    cell(x, y) = Cell::Obstacle;
    obstacles_.push_back({x, y});
    ++placed;
  }
}

void GridWorld::move_obstacles() {
  for (auto& [x, y] : obstacles_) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      int d = static_cast<int>(rng_.uniform_int(0, 3));
      int nx = x + kFx[d], ny = y + kFy[d];
      if (!in_bounds(nx, ny)) continue;
      if (cell(nx, ny) != Cell::Floor) continue;
      if (nx == ax_ && ny == ay_) continue;  // never run the agent over
      cell(x, y) = Cell::Floor;
      cell(nx, ny) = Cell::Obstacle;
      x = nx;
      y = ny;
      break;
    }
  }
}

StepResult GridWorld::step(int action) {
  if (finished_) throw std::logic_error("step() on a finished episode");
  if (action < 0 || action >= kNumActions)
    throw std::invalid_argument("action index out of range: " +
                                std::to_string(action));
  ++t_;
  if (spec_.family == Family::DynamicObstacles) move_obstacles();

  StepResult res;
  int fx = ax_ + kFx[heading_], fy = ay_ + kFy[heading_];
  Cell front = in_bounds(fx, fy) ? at(fx, fy) : Cell::Wall;
  switch (action) {
    case kLeft: heading_ = (heading_ + 3) % 4; break;
    case kRight: heading_ = (heading_ + 1) % 4; break;
    case kForward:
      if (front == Cell::Obstacle) {
        res.done = true;
        res.reward = -1.0;
      } else if (walkable(front)) {
        ax_ = fx;
        ay_ = fy;
        if (front == Cell::Goal) {
          res.done = true;
          res.reward = 1.0 - 0.9 * (static_cast<double>(t_) / max_steps_);
        }
      }
      break;
    case kPickup:
      if (front == Cell::Key && !carrying_key_) {
        carrying_key_ = true;
        cell(fx, fy) = Cell::Floor;
        color(fx, fy) = 0;
      }
      break;
    case kToggle:
      if (front == Cell::DoorClosed) cell(fx, fy) = Cell::DoorOpen;
      else if (front == Cell::DoorOpen) cell(fx, fy) = Cell::DoorClosed;
      else if (front == Cell::DoorLocked && carrying_key_)
        cell(fx, fy) = Cell::DoorOpen;
      break;
  }
  if (!res.done && t_ >= max_steps_) res.truncated = true;
  finished_ = res.done || res.truncated;
  return res;
}

void GridWorld::write_obs(Eigen::Ref<Eigen::VectorXd> out) const {
  out.setZero();
  int f = heading_;
  int rx = -kFy[f], ry = kFx[f];  // right-hand vector
  for (int vy = 0; vy < kViewSize; ++vy) {
    int ahead = (kViewSize - 1) - vy;
    for (int vx = 0; vx < kViewSize; ++vx) {
      int lat = vx - kViewSize / 2;
      int wx = ax_ + ahead * kFx[f] + lat * rx;
      int wy = ay_ + ahead * kFy[f] + lat * ry;
      bool in = in_bounds(wx, wy);
      Cell c = in ? at(wx, wy) : Cell::Wall;
      int base = (vy * kViewSize + vx) * kCellWidth;
      out[base + static_cast<int>(c)] = 1.0;
      int col = in ? color_at(wx, wy) : 0;
      if (col > 0) out[base + kCellChannels + (col - 1)] = 1.0;
    }
  }
  out[kViewSize * kViewSize * kCellWidth + heading_] = 1.0;
  out[kObsDim - 1] = carrying_key_ ? 1.0 : 0.0;
}

Eigen::VectorXd GridWorld::obs() const {
  Eigen::VectorXd v(kObsDim);
  write_obs(v);
  return v;
}

bool GridWorld::reachable(int from_x, int from_y, Cell target,
                          bool locked_passable) const {
  auto passes = [&](Cell c) {
    if (c == Cell::Wall) return false;
    if (c == Cell::DoorLocked) return locked_passable;
    return true;
  };
  std::vector<char> seen(grid_.size(), 0);
  std::deque<std::pair<int, int>> queue{{from_x, from_y}};
  seen[from_y * w_ + from_x] = 1;
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    if (at(x, y) == target) return true;
    for (int d = 0; d < 4; ++d) {
      int nx = x + kFx[d], ny = y + kFy[d];
      if (!in_bounds(nx, ny) || seen[ny * w_ + nx]) continue;
      if (!passes(at(nx, ny))) continue;
      seen[ny * w_ + nx] = 1;
      queue.push_back({nx, ny});
    }
  }
  return false;
}

std::string GridWorld::render_ascii() const {
  static const char glyph[] = {'#', '.', '/', '+', 'L', 'K', 'G', 'O', '~'};
  static const char agent[] = {'^', '>', 'v', '<'};
  std::string out;
  out.reserve(static_cast<size_t>((w_ + 1) * h_));
  for (int y = 0; y < h_; ++y) {
    for (int x = 0; x < w_; ++x) {
      if (x == ax_ && y == ay_) out += agent[heading_];
      else out += glyph[static_cast<int>(at(x, y))];
    }
    out += '\n';
  }
  return out;
}

}  // namespace hire
