#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hire/util/rng.hpp"

namespace hire {

enum class Family { MultiRoom, KeyCorridor, DynamicObstacles };

Family family_from_name(const std::string& s);
const char* family_name(Family f);

struct GridSpec {
  Family family = Family::MultiRoom;
  int n_rooms = 4;
  int room_size = 5;
  int grid_w = 8;   // DynamicObstacles room size; derived for the others
  int grid_h = 8;
  int max_steps = 0;  // 0 = family default
  int n_obstacles = 4;

  void validate() const;
  int resolved_max_steps() const;
  // Short human label, e.g. "MultiRoom-N4-S5".
  std::string task_label() const;
};

enum class Cell : uint8_t {
  Wall, Floor, DoorOpen, DoorClosed, DoorLocked, Key, Goal, Obstacle, Lava
};
constexpr int kCellChannels = 9;

// Doors (and keys) carry one of six colors so that otherwise identical
// local views from different rooms stay distinguishable.
constexpr int kNumColors = 6;
constexpr int kCellWidth = kCellChannels + kNumColors;

// Egocentric view geometry: a 7x7 crop with the agent at the bottom-center
// looking "up" the window, per cell a type one-hot plus a color one-hot,
// then a 4-way heading one-hot and a carried-key indicator.
constexpr int kViewSize = 7;
constexpr int kObsDim = kViewSize * kViewSize * kCellWidth + 4 + 1;

enum Action { kLeft = 0, kRight = 1, kForward = 2, kPickup = 3, kToggle = 4 };
constexpr int kNumActions = 5;

struct StepResult {
  double reward = 0.0;
  bool done = false;       // terminal: goal reached or collision
  bool truncated = false;  // time limit hit without a terminal event
};

class GridWorld {
 public:
  GridWorld(const GridSpec& spec, uint64_t seed);

  // Regenerates the layout from a fresh seed and rewinds the step counter.
  void reset(uint64_t seed);
  StepResult step(int action);
  void write_obs(Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd obs() const;

  bool finished() const { return finished_; }
  int t() const { return t_; }
  int width() const { return w_; }
  int height() const { return h_; }
  Cell at(int x, int y) const { return grid_[y * w_ + x]; }
  // 0 = uncolored, 1..kNumColors otherwise
  int color_at(int x, int y) const { return colors_[y * w_ + x]; }
  int agent_x() const { return ax_; }
  int agent_y() const { return ay_; }
  int heading() const { return heading_; }
  bool carrying_key() const { return carrying_key_; }
  const GridSpec& spec() const { return spec_; }

  std::string render_ascii() const;

  // Reachability check used by generation and by tests: BFS over passable
  // cells. locked_passable controls whether locked doors count as open.
  bool reachable(int from_x, int from_y, Cell target,
                 bool locked_passable) const;

 private:
  void generate(Rng& rng);
  void gen_multiroom(Rng& rng);
  void gen_keycorridor(Rng& rng);
  void gen_dynobstacles(Rng& rng);
  void move_obstacles();
  Cell& cell(int x, int y) { return grid_[y * w_ + x]; }
  uint8_t& color(int x, int y) { return colors_[y * w_ + x]; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < w_ && y >= 0 && y < h_;
  }

  GridSpec spec_;
  int w_ = 0, h_ = 0;
  std::vector<Cell> grid_;
  std::vector<uint8_t> colors_;
  int ax_ = 0, ay_ = 0;
  int heading_ = 0;  // 0=N 1=E 2=S 3=W
  bool carrying_key_ = false;
  int t_ = 0;
  bool finished_ = false;
  int max_steps_ = 0;
  std::vector<std::pair<int, int>> obstacles_;
  Rng rng_;  // drives generation, then obstacle motion
};

}  // namespace hire
