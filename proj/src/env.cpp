#include "maze/env.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace maze {

int Layout::pot_index(int r, int c) const {
  for (size_t i = 0; i < pot_cells.size(); ++i) {
    if (pot_cells[i].first == r && pot_cells[i].second == c)
      return static_cast<int>(i);
  }
  return -1;
}

int Layout::counter_index(int r, int c) const {
  for (size_t i = 0; i < counter_cells.size(); ++i) {
    if (counter_cells[i].first == r && counter_cells[i].second == c)
      return static_cast<int>(i);
  }
  return -1;
}

Layout parse_layout(std::string_view text, int cook_time, int horizon,
                    std::string name) {
  if (cook_time <= 0) throw LayoutError("cook_time must be positive");
  if (horizon <= 0) throw LayoutError("horizon must be positive");

  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : text) {
      if (ch == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 3) throw LayoutError("layout too small");

  const size_t cols = lines[0].size();
  for (const auto& l : lines) {
    if (l.size() != cols) throw LayoutError("non-rectangular layout text");
  }
  if (cols < 3) throw LayoutError("layout too small");

  Layout out;
  out.name = std::move(name);
  out.rows = static_cast<int>(lines.size());
  out.cols = static_cast<int>(cols);
  out.cook_time = cook_time;
  out.horizon = horizon;
  out.grid.assign(static_cast<size_t>(out.rows) * out.cols, Cell::Floor);

  bool seen[2] = {false, false};
  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < out.cols; ++c) {
      const char ch = lines[r][c];
      Cell cell;
      switch (ch) {
        case 'X': cell = Cell::Counter; break;
        case 'O': cell = Cell::OnionDispenser; break;
        case 'D': cell = Cell::DishDispenser; break;
        case 'P': cell = Cell::Pot; break;
        case 'S': cell = Cell::Serving; break;
        case ' ': cell = Cell::Floor; break;
        case '1':
        case '2': {
          const int p = ch - '1';
          if (seen[p])
            throw LayoutError(std::string("duplicate start marker '") + ch + "'");
          seen[p] = true;
          out.starts[p] = Start{r, c, Dir::North};
          cell = Cell::Floor;
          break;
        }
        default:
          throw LayoutError(std::string("unknown layout symbol '") + ch + "'");
      }
      out.grid[static_cast<size_t>(r) * out.cols + c] = cell;
    }
  }
  if (!seen[0]) throw LayoutError("missing start marker '1'");
  if (!seen[1]) throw LayoutError("missing start marker '2'");
  if (out.starts[0].row == out.starts[1].row &&
      out.starts[0].col == out.starts[1].col)
    throw LayoutError("player starts coincide");

  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < out.cols; ++c) {
      const bool boundary =
          r == 0 || c == 0 || r == out.rows - 1 || c == out.cols - 1;
      if (boundary && out.at(r, c) == Cell::Floor)
        throw LayoutError("open boundary: floor cell on the grid edge");
    }
  }

  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < out.cols; ++c) {
      const Cell cell = out.at(r, c);
      if (cell == Cell::Pot) out.pot_cells.emplace_back(r, c);
      if (cell == Cell::Counter) out.counter_cells.emplace_back(r, c);
      if (cell == Cell::Pot || cell == Cell::Serving ||
          cell == Cell::OnionDispenser || cell == Cell::DishDispenser) {
        bool adjacent_floor = false;
        for (Dir d : {Dir::North, Dir::South, Dir::East, Dir::West}) {
          auto [dr, dc] = dir_delta(d);
          if (out.is_floor(r + dr, c + dc)) adjacent_floor = true;
        }
        if (!adjacent_floor)
          throw LayoutError("unreachable feature cell at (" +
                            std::to_string(r) + "," + std::to_string(c) + ")");
      }
    }
  }
  return out;
}

Layout load_layout_file(const std::string& path, int cook_time, int horizon,
                        std::string name) {
  std::ifstream in(path);
  if (!in) throw LayoutError("cannot open layout file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_layout(ss.str(), cook_time, horizon, std::move(name));
}

GameState reset(const Layout& layout) {
  GameState s;
  s.layout = &layout;
  s.t = 0;
  for (int p = 0; p < 2; ++p) {
    s.players[p].row = layout.starts[p].row;
    s.players[p].col = layout.starts[p].col;
    s.players[p].facing = layout.starts[p].facing;
    s.players[p].held = Item::None;
  }
  s.pots.assign(layout.pot_cells.size(), Pot{});
  s.counters.assign(layout.counter_cells.size(), Item::None);
  return s;
}

namespace {

Dir action_dir(Action a) {
  switch (a) {
    case Action::North: return Dir::North;
    case Action::South: return Dir::South;
    case Action::East: return Dir::East;
    case Action::West: return Dir::West;
    default: return Dir::North;
  }
}

bool is_move(Action a) {
  return a == Action::North || a == Action::South || a == Action::East ||
         a == Action::West;
}

void resolve_interact(GameState& s, int p, const EnvConfig& cfg,
                      StepOutcome& out) {
  const Layout& L = *s.layout;
  PlayerState& me = s.players[p];
  auto [dr, dc] = dir_delta(me.facing);
  const int fr = me.row + dr;
  const int fc = me.col + dc;
  if (!L.in_bounds(fr, fc)) return;

  switch (L.at(fr, fc)) {
    case Cell::OnionDispenser:
      if (me.held == Item::None) {
        me.held = Item::Onion;
        s.onions_dispensed++;
      }
      break;
    case Cell::DishDispenser:
      if (me.held == Item::None) {
        me.held = Item::Dish;
        s.dishes_dispensed++;
        out.shaped_events.emplace_back(p, ShapedEvent::DishPicked);
      }
      break;
    case Cell::Pot: {
      Pot& pot = s.pots[L.pot_index(fr, fc)];
      if (me.held == Item::Onion && pot.phase == PotPhase::Filling) {
        pot.onions++;
        me.held = Item::None;
        out.shaped_events.emplace_back(p, ShapedEvent::OnionPotted);
        if (pot.onions == 3) pot.phase = PotPhase::Cooking;
      } else if (me.held == Item::Dish && pot.phase == PotPhase::Ready) {
        me.held = Item::Soup;
        pot = Pot{};
        out.shaped_events.emplace_back(p, ShapedEvent::SoupPicked);
      }
      break;
    }
    case Cell::Serving:
      if (me.held == Item::Soup) {
        me.held = Item::None;
        s.soups_delivered++;
        out.sparse_reward += cfg.deliver_reward;
      }
      break;
    case Cell::Counter: {
      Item& slot = s.counters[L.counter_index(fr, fc)];
      if (me.held != Item::None && slot == Item::None) {
        slot = me.held;
        me.held = Item::None;
      } else if (me.held == Item::None && slot != Item::None) {
        me.held = slot;
        slot = Item::None;
      }
      break;
    }
    case Cell::Floor:
      break;
  }
}

}  // namespace

StepOutcome step(const GameState& state, JointAction joint,
                 const EnvConfig& cfg) {
  if (state.done()) throw std::logic_error("step() on a finished episode");

  StepOutcome out;
  out.next = state;
  GameState& s = out.next;
  const Layout& L = *s.layout;

  // Movement phase: compute targets, then cancel conflicts.
  std::array<std::pair<int, int>, 2> target;
  for (int p = 0; p < 2; ++p) {
    PlayerState& me = s.players[p];
    target[p] = {me.row, me.col};
    const Action a = joint.of(p);
    if (!is_move(a)) continue;
    me.facing = action_dir(a);
    auto [dr, dc] = dir_delta(me.facing);
    const int tr = me.row + dr;
    const int tc = me.col + dc;
    if (!L.is_floor(tr, tc)) continue;
    const PlayerState& other = state.players[other_player(p)];
    if (tr == other.row && tc == other.col) continue;  // bump or swap
    target[p] = {tr, tc};
  }
  if (target[0] == target[1]) {
    target[0] = {state.players[0].row, state.players[0].col};
    target[1] = {state.players[1].row, state.players[1].col};
  }
  for (int p = 0; p < 2; ++p) {
    s.players[p].row = target[p].first;
    s.players[p].col = target[p].second;
  }

  // Interact phase, player 1 then player 2.
  for (int p = 0; p < 2; ++p) {
    if (joint.of(p) == Action::Interact) resolve_interact(s, p, cfg, out);
  }

  // Cook tick.
  for (Pot& pot : s.pots) {
    if (pot.phase == PotPhase::Cooking) {
      pot.progress++;
      if (pot.progress >= L.cook_time) {
        pot.progress = L.cook_time;
        pot.phase = PotPhase::Ready;
      }
    }
  }

  s.t++;
  out.done = s.done();
  return out;
}

ObsSpec ObsSpec::for_layout(const Layout& layout) {
  return ObsSpec{layout.rows, layout.cols, kObsChannels};
}

namespace {
// Channel indices of the observation encoding.
enum ObsChannel : int {
  kChCounter = 0,
  kChOnionDisp = 1,
  kChDishDisp = 2,
  kChServing = 3,
  kChPotOnions0 = 4,  // ..7: pot onion count one-hot
  kChCookProgress = 8,
  kChPlacedOnion = 9,
  kChPlacedDish = 10,
  kChPlacedSoup = 11,
  kChSelfPos = 12,
  kChSelfFacing0 = 13,  // ..16, indexed by Dir
  kChOtherPos = 17,
  kChOtherFacing0 = 18,  // ..21
  kChSelfHeldOnion = 22,
  kChSelfHeldDish = 23,
  kChSelfHeldSoup = 24,
  kChOtherHeldOnion = 25,
  kChOtherHeldDish = 26,
  kChOtherHeldSoup = 27,
  kChTimeLeft = 28,
};
}  // namespace

void encode_observation(const GameState& state, Role role,
                        std::vector<double>& out) {
  const Layout& L = *state.layout;
  const int cells = L.rows * L.cols;
  out.assign(static_cast<size_t>(cells) * kObsChannels, 0.0);

  auto plane = [&](int ch) { return out.data() + static_cast<size_t>(ch) * cells; };
  auto idx = [&](int r, int c) { return r * L.cols + c; };

  for (int r = 0; r < L.rows; ++r) {
    for (int c = 0; c < L.cols; ++c) {
      switch (L.at(r, c)) {
        case Cell::Counter: plane(kChCounter)[idx(r, c)] = 1.0; break;
        case Cell::OnionDispenser: plane(kChOnionDisp)[idx(r, c)] = 1.0; break;
        case Cell::DishDispenser: plane(kChDishDisp)[idx(r, c)] = 1.0; break;
        case Cell::Serving: plane(kChServing)[idx(r, c)] = 1.0; break;
        default: break;
      }
    }
  }

  for (size_t i = 0; i < L.pot_cells.size(); ++i) {
    const auto [r, c] = L.pot_cells[i];
    const Pot& pot = state.pots[i];
    plane(kChPotOnions0 + pot.onions)[idx(r, c)] = 1.0;
    plane(kChCookProgress)[idx(r, c)] =
        static_cast<double>(pot.progress) / L.cook_time;
  }

  for (size_t i = 0; i < L.counter_cells.size(); ++i) {
    const auto [r, c] = L.counter_cells[i];
    switch (state.counters[i]) {
      case Item::Onion: plane(kChPlacedOnion)[idx(r, c)] = 1.0; break;
      case Item::Dish: plane(kChPlacedDish)[idx(r, c)] = 1.0; break;
      case Item::Soup: plane(kChPlacedSoup)[idx(r, c)] = 1.0; break;
      case Item::None: break;
    }
  }

  const int self = player_index(role);
  const int pair[2] = {self, other_player(self)};
  const int pos_ch[2] = {kChSelfPos, kChOtherPos};
  const int face_ch[2] = {kChSelfFacing0, kChOtherFacing0};
  const int held_ch[2] = {kChSelfHeldOnion, kChOtherHeldOnion};
  for (int k = 0; k < 2; ++k) {
    const PlayerState& pl = state.players[pair[k]];
    const int at = idx(pl.row, pl.col);
    plane(pos_ch[k])[at] = 1.0;
    plane(face_ch[k] + static_cast<int>(pl.facing))[at] = 1.0;
    switch (pl.held) {
      case Item::Onion: plane(held_ch[k] + 0)[at] = 1.0; break;
      case Item::Dish: plane(held_ch[k] + 1)[at] = 1.0; break;
      case Item::Soup: plane(held_ch[k] + 2)[at] = 1.0; break;
      case Item::None: break;
    }
  }

  const double time_left =
      static_cast<double>(L.horizon - state.t) / L.horizon;
  double* tp = plane(kChTimeLeft);
  for (int i = 0; i < cells; ++i) tp[i] = time_left;
}

std::vector<double> encode_observation(const GameState& state, Role role) {
  std::vector<double> out;
  encode_observation(state, role, out);
  return out;
}

}  // namespace maze
