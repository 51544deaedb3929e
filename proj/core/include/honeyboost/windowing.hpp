#pragma once

#include <cstddef>
#include <vector>

#include "honeyboost/ingest.hpp"

namespace honeyboost {

inline constexpr Seconds kDefaultWindowSize = 7 * 24 * 60 * 60;
inline constexpr Seconds kDefaultStep = 60 * 60;

enum class WindowKind { Sliding, Expanding };

/// Sliding windows cover [t_start, t_end). Expanding windows keep t_start at
/// the stream start and are sliced with a closed upper end.
struct Window {
  std::size_t index = 0;
  Seconds t_start = 0;
  Seconds t_end = 0;
  WindowKind kind = WindowKind::Sliding;

  friend bool operator==(const Window&, const Window&) = default;
};

/// Window i spans [t0 + i*step, t0 + i*step + size); the sequence stops at the
/// last window with t_end <= t1. Throws WindowError when no full window fits
/// or when size/step are not positive.
std::vector<Window> sliding_windows(Seconds t0, Seconds t1, Seconds size, Seconds step);

/// Stream start rounded down to a whole hour; window 0 begins here.
Seconds window_origin(const EventStream& stream) noexcept;

/// Records with t_start <= timestamp < t_end.
EventStream window_slice(const EventStream& stream, const Window& w);

/// Records with timestamp <= t_end.
EventStream expanding_slice(const EventStream& stream, Seconds t_end);

}  // namespace honeyboost
