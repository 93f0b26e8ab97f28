#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace tempo {

// Byte-exact copies of the files under core/assets, compiled into the
// library. Names are paths relative to that directory, e.g.
// "prompts/fluency_v1.txt".
std::optional<std::string_view> find_asset(std::string_view name);
std::vector<std::string_view> asset_names();

}  // namespace tempo
