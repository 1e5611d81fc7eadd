#include "maze/layouts.hpp"

#ifndef MAZE_LAYOUTS_DIR
#define MAZE_LAYOUTS_DIR "layouts"
#endif

namespace maze {

const std::vector<LayoutPreset>& layout_presets() {
  static const std::vector<LayoutPreset> presets = {
      {"cr", "cr.layout", 20, 400},
      {"aa", "aa.layout", 20, 400},
      {"aa2", "aa2.layout", 20, 400},
      {"fc", "fc.layout", 20, 400},
      {"cr_mini", "cr.layout", 10, 100},
      {"fc_mini", "fc.layout", 5, 100},
      {"fetch", "fetch.layout", 50, 100},
  };
  return presets;
}

std::string default_layouts_dir() { return MAZE_LAYOUTS_DIR; }

Layout load_builtin_layout(const std::string& name,
                           const std::string& layouts_dir,
                           int cook_time_override, int horizon_override) {
  const std::string dir = layouts_dir.empty() ? default_layouts_dir() : layouts_dir;
  if (name.find('/') != std::string::npos) {
    return load_layout_file(name, cook_time_override > 0 ? cook_time_override : 20,
                            horizon_override > 0 ? horizon_override : 400, name);
  }
  for (const auto& p : layout_presets()) {
    if (p.name == name) {
      return load_layout_file(
          dir + "/" + p.file,
          cook_time_override > 0 ? cook_time_override : p.cook_time,
          horizon_override > 0 ? horizon_override : p.horizon, p.name);
    }
  }
  throw LayoutError("unknown layout: " + name);
}

}  // namespace maze
