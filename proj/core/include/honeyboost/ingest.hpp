#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace honeyboost {

using Seconds = std::int64_t;

// Declaration order fixes the tie-break order inside a merged stream.
enum class Protocol : std::uint8_t { Arp = 0, Tcp = 1, Udp = 2 };

inline constexpr std::array<Protocol, 3> kAllProtocols{Protocol::Arp, Protocol::Tcp,
                                                       Protocol::Udp};

std::string_view to_string(Protocol p) noexcept;
std::optional<Protocol> parse_protocol(std::string_view name) noexcept;

struct ArpFeatures {
  std::int64_t count = 0;
  // Distinct IP addresses the node tried to resolve; never above count.
  std::int64_t degree = 0;

  friend bool operator==(const ArpFeatures&, const ArpFeatures&) = default;
};

struct TcpFeatures {
  std::int64_t num_ports = 0;
  std::int64_t count = 0;
  double avg_len = 0.0;
  std::int64_t count_fin = 0;
  std::int64_t count_syn = 0;
  std::int64_t count_rst = 0;
  std::int64_t count_psh = 0;
  std::int64_t count_ack = 0;
  std::int64_t count_urg = 0;
  std::int64_t count_ece = 0;
  std::int64_t count_cwr = 0;

  friend bool operator==(const TcpFeatures&, const TcpFeatures&) = default;
};

struct UdpFeatures {
  std::int64_t num_ports = 0;
  std::int64_t count = 0;
  double avg_len = 0.0;

  friend bool operator==(const UdpFeatures&, const UdpFeatures&) = default;
};

/// One aggregation interval of one node under one protocol. The protocol is
/// carried by the active alternative of `features`, so a record can never
/// hold a block that disagrees with its protocol.
struct ProtocolRecord {
  Seconds timestamp = 0;
  std::string node;
  std::variant<ArpFeatures, TcpFeatures, UdpFeatures> features;

  Protocol protocol() const noexcept { return static_cast<Protocol>(features.index()); }
  const ArpFeatures* arp() const noexcept { return std::get_if<ArpFeatures>(&features); }
  const TcpFeatures* tcp() const noexcept { return std::get_if<TcpFeatures>(&features); }
  const UdpFeatures* udp() const noexcept { return std::get_if<UdpFeatures>(&features); }

  friend bool operator==(const ProtocolRecord&, const ProtocolRecord&) = default;
};

inline constexpr std::size_t kTcpDims = 11;
inline constexpr std::size_t kUdpDims = 3;

// Numeric attributes in file column order.
std::array<double, kTcpDims> numeric_attributes(const TcpFeatures& f) noexcept;
std::array<double, kUdpDims> numeric_attributes(const UdpFeatures& f) noexcept;

/// Throws ValidationError (carrying `row`) for negative counters, a negative
/// or non-finite avg_len, or an ARP degree above its count.
void validate(const ProtocolRecord& record, std::size_t row);

/// Time-ordered, immutable sequence of records. Copies and slices share the
/// underlying storage, so slicing a stream is O(1).
class EventStream {
 public:
  EventStream() = default;

  /// `records` must already be ordered by (timestamp, node, protocol).
  static EventStream from_sorted(std::vector<ProtocolRecord> records);

  std::span<const ProtocolRecord> records() const noexcept;
  std::size_t size() const noexcept { return end_ - begin_; }
  bool empty() const noexcept { return begin_ == end_; }

  // Both are 0 for an empty stream.
  Seconds t_min() const noexcept;
  Seconds t_max() const noexcept;

  /// Records [first, last) of this stream, sharing storage.
  EventStream subrange(std::size_t first, std::size_t last) const;

 private:
  std::shared_ptr<const std::vector<ProtocolRecord>> storage_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
};

std::span<const std::string_view> csv_columns(Protocol p) noexcept;

/// Parses one per-protocol feature file. Row numbers in errors are 1-based
/// line numbers of the file (the header is line 1).
std::vector<ProtocolRecord> parse_protocol_csv(const std::filesystem::path& path,
                                               Protocol protocol);
std::vector<ProtocolRecord> parse_protocol_csv(std::istream& in, Protocol protocol,
                                               std::string_view source = "<stream>");

/// Writes the header for `protocol` and every record of that protocol.
void write_protocol_csv(std::ostream& out, std::span<const ProtocolRecord> records,
                        Protocol protocol);

/// Stable merge ordered by (timestamp, node, protocol). Throws
/// EmptyStreamError when the union is empty.
EventStream merge_streams(std::vector<std::vector<ProtocolRecord>> parts);

/// Ground truth: every node with at least one TCP or UDP record, mapped to the
/// earliest such timestamp.
std::map<std::string, Seconds> honeypot_positives(const EventStream& stream);

// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

}  // namespace honeyboost
