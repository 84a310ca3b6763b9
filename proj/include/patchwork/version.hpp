#pragma once

namespace patchwork {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace patchwork
