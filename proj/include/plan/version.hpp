#pragma once

namespace plan {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace plan
