#pragma once

namespace moss {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace moss
