#pragma once

namespace blockframe {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace blockframe
