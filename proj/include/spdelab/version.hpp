#pragma once

namespace spdelab {

inline constexpr const char* kVersion = "spdelab 1.0.0";

}  // namespace spdelab
