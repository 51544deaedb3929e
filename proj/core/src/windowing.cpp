#include "honeyboost/windowing.hpp"

#include <algorithm>
#include <string>

#include "honeyboost/error.hpp"

namespace honeyboost {

namespace {

std::size_t lower_index(std::span<const ProtocolRecord> recs, Seconds t) {
  const auto it = std::partition_point(recs.begin(), recs.end(),
                                       [t](const ProtocolRecord& r) { return r.timestamp < t; });
  return static_cast<std::size_t>(it - recs.begin());
}

std::size_t upper_index(std::span<const ProtocolRecord> recs, Seconds t) {
  const auto it = std::partition_point(recs.begin(), recs.end(),
                                       [t](const ProtocolRecord& r) { return r.timestamp <= t; });
  return static_cast<std::size_t>(it - recs.begin());
}

Seconds floor_div(Seconds a, Seconds b) {
  Seconds q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::vector<Window> sliding_windows(Seconds t0, Seconds t1, Seconds size, Seconds step) {
  if (size <= 0 || step <= 0) throw WindowError("window size and step must be positive");
  if (t1 < t0 + size) {
    throw WindowError("no full window: span " + std::to_string(t1 - t0) +
                      "s is shorter than window size " + std::to_string(size) + "s");
  }
  const auto count = static_cast<std::size_t>((t1 - t0 - size) / step) + 1;
  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Seconds start = t0 + static_cast<Seconds>(i) * step;
    out.push_back(Window{i, start, start + size, WindowKind::Sliding});
  }
  return out;
}

Seconds window_origin(const EventStream& stream) noexcept {
  constexpr Seconds kHour = 3600;
  return floor_div(stream.t_min(), kHour) * kHour;
}

EventStream window_slice(const EventStream& stream, const Window& w) {
  const auto recs = stream.records();
  return stream.subrange(lower_index(recs, w.t_start), lower_index(recs, w.t_end));
}

EventStream expanding_slice(const EventStream& stream, Seconds t_end) {
  return stream.subrange(0, upper_index(stream.records(), t_end));
}

}  // namespace honeyboost
