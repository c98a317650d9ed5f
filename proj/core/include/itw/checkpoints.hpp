#pragma once

#include <cstdint>

namespace itw {

/// Checkpoint classification along a path walk. Jump times carry a
/// pre_jump/post_jump pair; the post value is the cadlag value.
enum class CheckpointKind : std::uint8_t { grid = 0, pre_jump = 1, post_jump = 2 };

inline const char* to_string(CheckpointKind k) {
  switch (k) {
    case CheckpointKind::grid: return "grid";
    case CheckpointKind::pre_jump: return "pre_jump";
    case CheckpointKind::post_jump: return "post_jump";
  }
  return "?";
}

}  // namespace itw
