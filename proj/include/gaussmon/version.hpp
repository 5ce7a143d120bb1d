#pragma once

namespace gaussmon {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gaussmon
