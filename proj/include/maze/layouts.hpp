#pragma once

#include <string>
#include <vector>

#include "maze/env.hpp"

namespace maze {

struct LayoutPreset {
  std::string name;
  std::string file;  // relative to the layouts directory
  int cook_time;
  int horizon;
};

// Named presets over the shipped grid files. The *_mini presets reuse a grid
// with a shorter horizon and cook time for desk-scale runs.
const std::vector<LayoutPreset>& layout_presets();

// Resolves `name` against the presets (or treats it as a path to a .layout
// file when it contains a '/'). `layouts_dir` defaults to the directory baked
// in at configure time. Optional overrides replace the preset cook/horizon.
Layout load_builtin_layout(const std::string& name,
                           const std::string& layouts_dir = "",
                           int cook_time_override = -1,
                           int horizon_override = -1);

std::string default_layouts_dir();

}  // namespace maze
