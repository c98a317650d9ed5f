#pragma once

namespace itw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace itw
