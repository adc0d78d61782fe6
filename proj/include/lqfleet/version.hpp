#pragma once

namespace lqfleet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lqfleet
