#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace maze {

// Two-player common-payoff cooking gridworld. Player 1 is the "agent" seat,
// player 2 the "partner" seat; seats are never swapped.

enum class Cell : std::uint8_t {
  Floor,
  Counter,
  OnionDispenser,
  DishDispenser,
  Pot,
  Serving,
};

enum class Dir : std::uint8_t { North, South, East, West };

// Action indices are part of the policy interface: 0..5.
enum class Action : std::uint8_t { North, South, East, West, Stay, Interact };
constexpr int kNumActions = 6;

enum class Item : std::uint8_t { None, Onion, Dish, Soup };

enum class Role : std::uint8_t { Agent, Partner };

inline int other_player(int p) { return 1 - p; }
inline int player_index(Role r) { return r == Role::Agent ? 0 : 1; }
inline Role role_of_player(int p) { return p == 0 ? Role::Agent : Role::Partner; }

struct Start {
  int row = 0;
  int col = 0;
  Dir facing = Dir::North;
};

class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Layout {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::vector<Cell> grid;  // row-major
  std::array<Start, 2> starts{};
  int cook_time = 20;
  int horizon = 400;

  // Feature cell lists, row-major order; pot/counter state arrays in
  // GameState are parallel to these.
  std::vector<std::pair<int, int>> pot_cells;
  std::vector<std::pair<int, int>> counter_cells;

  Cell at(int r, int c) const { return grid[static_cast<size_t>(r) * cols + c]; }
  bool in_bounds(int r, int c) const {
    return r >= 0 && r < rows && c >= 0 && c < cols;
  }
  bool is_floor(int r, int c) const {
    return in_bounds(r, c) && at(r, c) == Cell::Floor;
  }
  int pot_index(int r, int c) const;      // -1 if not a pot cell
  int counter_index(int r, int c) const;  // -1 if not a counter cell
};

// Parses the ASCII grid format: X=counter, O=onion dispenser, D=dish
// dispenser, P=pot, S=serving, space=floor, 1/2=player starts (on floor).
// Validates rectangularity, closed boundary, start markers, and that every
// feature cell is adjacent to at least one floor cell.
Layout parse_layout(std::string_view text, int cook_time, int horizon,
                    std::string name = "layout");

Layout load_layout_file(const std::string& path, int cook_time, int horizon,
                        std::string name);

enum class PotPhase : std::uint8_t { Filling, Cooking, Ready };

struct Pot {
  std::uint8_t onions = 0;
  int progress = 0;
  PotPhase phase = PotPhase::Filling;

  bool operator==(const Pot&) const = default;
};

struct PlayerState {
  int row = 0;
  int col = 0;
  Dir facing = Dir::North;
  Item held = Item::None;

  bool operator==(const PlayerState&) const = default;
};

struct GameState {
  const Layout* layout = nullptr;
  int t = 0;
  std::array<PlayerState, 2> players{};
  std::vector<Pot> pots;           // parallel to layout->pot_cells
  std::vector<Item> counters;      // parallel to layout->counter_cells
  // Cumulative bookkeeping; makes conservation checks and reporting cheap.
  long onions_dispensed = 0;
  long dishes_dispensed = 0;
  long soups_delivered = 0;

  bool done() const { return t >= layout->horizon; }
  bool operator==(const GameState&) const = default;
};

struct JointAction {
  Action agent = Action::Stay;
  Action partner = Action::Stay;

  Action of(int player) const { return player == 0 ? agent : partner; }
};

enum class ShapedEvent : std::uint8_t { OnionPotted, DishPicked, SoupPicked };

struct StepOutcome {
  GameState next;
  double sparse_reward = 0.0;  // shared scalar: 0, R_deliver, or 2*R_deliver
  std::vector<std::pair<int, ShapedEvent>> shaped_events;  // (player, event)
  bool done = false;
};

struct EnvConfig {
  double deliver_reward = 20.0;
  double onion_potted = 3.0;
  double dish_picked = 3.0;
  double soup_picked = 5.0;

  double shaped_value(ShapedEvent e) const {
    switch (e) {
      case ShapedEvent::OnionPotted: return onion_potted;
      case ShapedEvent::DishPicked: return dish_picked;
      case ShapedEvent::SoupPicked: return soup_picked;
    }
    return 0.0;
  }
};

GameState reset(const Layout& layout);

// Deterministic simultaneous-move transition. Movement: moving into non-floor
// or into the other player's current cell only turns; two moves into the same
// cell cancel both. Interacts resolve player 1 then player 2. Pots with three
// onions advance one cook step at the end of every step, including the step
// they were filled. Throws if `state` is already done.
StepOutcome step(const GameState& state, JointAction joint,
                 const EnvConfig& cfg);

// --- observations ---

struct ObsSpec {
  int rows = 0;
  int cols = 0;
  int channels = 0;

  int size() const { return rows * cols * channels; }
  static ObsSpec for_layout(const Layout& layout);
};

constexpr int kObsChannels = 29;

// Role-conditioned lossless encoding; all values in [0,1]. The self/other
// position, facing and held-item planes swap between roles, everything else
// is role-independent.
void encode_observation(const GameState& state, Role role,
                        std::vector<double>& out);
std::vector<double> encode_observation(const GameState& state, Role role);

// Step delta for a direction.
inline std::pair<int, int> dir_delta(Dir d) {
  switch (d) {
    case Dir::North: return {-1, 0};
    case Dir::South: return {1, 0};
    case Dir::East: return {0, 1};
    case Dir::West: return {0, -1};
  }
  return {0, 0};
}

}  // namespace maze
