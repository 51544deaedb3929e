#include "honeyboost/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "honeyboost/error.hpp"

namespace honeyboost {

namespace {

constexpr std::array<std::string_view, 4> kArpColumns{"timestamp", "node", "count", "degree"};
constexpr std::array<std::string_view, 13> kTcpColumns{
    "timestamp", "node",      "num_ports", "count",     "avg_len",   "count_fin", "count_syn",
    "count_rst", "count_psh", "count_ack", "count_urg", "count_ece", "count_cwr"};
constexpr std::array<std::string_view, 5> kUdpColumns{"timestamp", "node", "num_ports", "count",
                                                      "avg_len"};

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string row_prefix(std::string_view source, std::size_t row) {
  std::ostringstream os;
  os << source << ": row " << row << ": ";
  return os.str();
}

class RowReader {
 public:
  RowReader(std::span<const std::string_view> fields, std::span<const std::string_view> names,
            std::string_view source, std::size_t row)
      : fields_(fields), names_(names), source_(source), row_(row) {}

  std::int64_t integer(std::size_t i) const {
    const auto f = fields_[i];
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size()) {
      throw ParseError(row_prefix(source_, row_) + "cannot parse integer '" + std::string(f) +
                           "' in column '" + std::string(names_[i]) + "'",
                       row_);
    }
    return v;
  }

  double real(std::size_t i) const {
    const auto f = fields_[i];
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
      throw ParseError(row_prefix(source_, row_) + "cannot parse number '" + std::string(f) +
                           "' in column '" + std::string(names_[i]) + "'",
                       row_);
    }
    return v;
  }

 private:
  std::span<const std::string_view> fields_;
  std::span<const std::string_view> names_;
  std::string_view source_;
  std::size_t row_;
};

void check_header(std::span<const std::string_view> got, std::span<const std::string_view> want,
                  std::string_view source) {
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (i >= got.size() || got[i] != want[i]) {
      const bool present = std::find(got.begin(), got.end(), want[i]) != got.end();
      throw SchemaError(std::string(source) + ": " +
                        (present ? "column out of order: '" : "missing column: '") +
                        std::string(want[i]) + "'");
    }
  }
  if (got.size() > want.size()) {
    throw SchemaError(std::string(source) + ": unexpected column: '" +
                      std::string(got[want.size()]) + "'");
  }
}

void require_non_negative(std::int64_t v, std::string_view name, std::size_t row) {
  if (v < 0) {
    throw ValidationError("row " + std::to_string(row) + ": negative " + std::string(name), row);
  }
}

}  // namespace

std::string_view to_string(Protocol p) noexcept {
  switch (p) {
    case Protocol::Arp:
      return "ARP";
    case Protocol::Tcp:
      return "TCP";
    case Protocol::Udp:
      return "UDP";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view name) noexcept {
  std::string upper(name);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "ARP") return Protocol::Arp;
  if (upper == "TCP") return Protocol::Tcp;
  if (upper == "UDP") return Protocol::Udp;
  return std::nullopt;
}

std::array<double, kTcpDims> numeric_attributes(const TcpFeatures& f) noexcept {
  return {static_cast<double>(f.num_ports), static_cast<double>(f.count), f.avg_len,
          static_cast<double>(f.count_fin), static_cast<double>(f.count_syn),
          static_cast<double>(f.count_rst), static_cast<double>(f.count_psh),
          static_cast<double>(f.count_ack), static_cast<double>(f.count_urg),
          static_cast<double>(f.count_ece), static_cast<double>(f.count_cwr)};
}

std::array<double, kUdpDims> numeric_attributes(const UdpFeatures& f) noexcept {
  return {static_cast<double>(f.num_ports), static_cast<double>(f.count), f.avg_len};
}

void validate(const ProtocolRecord& record, std::size_t row) {
  const auto check_len = [row](double len) {
    if (!(len >= 0.0) || !std::isfinite(len)) {
      throw ValidationError("row " + std::to_string(row) + ": avg_len must be >= 0", row);
    }
  };
  if (const auto* a = record.arp()) {
    require_non_negative(a->count, "count", row);
    require_non_negative(a->degree, "degree", row);
    if (a->degree > a->count) {
      throw ValidationError("row " + std::to_string(row) + ": ARP degree " +
                                std::to_string(a->degree) + " exceeds count " +
                                std::to_string(a->count),
                            row);
    }
  } else if (const auto* t = record.tcp()) {
    require_non_negative(t->num_ports, "num_ports", row);
    require_non_negative(t->count, "count", row);
    check_len(t->avg_len);
    const std::array<std::pair<std::int64_t, std::string_view>, 8> flags{{
        {t->count_fin, "count_fin"},
        {t->count_syn, "count_syn"},
        {t->count_rst, "count_rst"},
        {t->count_psh, "count_psh"},
        {t->count_ack, "count_ack"},
        {t->count_urg, "count_urg"},
        {t->count_ece, "count_ece"},
        {t->count_cwr, "count_cwr"},
    }};
    for (const auto& [v, name] : flags) require_non_negative(v, name, row);
  } else if (const auto* u = record.udp()) {
    require_non_negative(u->num_ports, "num_ports", row);
    require_non_negative(u->count, "count", row);
    check_len(u->avg_len);
  }
}

EventStream EventStream::from_sorted(std::vector<ProtocolRecord> records) {
  EventStream s;
  s.end_ = records.size();
  s.storage_ = std::make_shared<const std::vector<ProtocolRecord>>(std::move(records));
  return s;
}

std::span<const ProtocolRecord> EventStream::records() const noexcept {
  if (!storage_) return {};
  return std::span<const ProtocolRecord>(*storage_).subspan(begin_, end_ - begin_);
}

Seconds EventStream::t_min() const noexcept {
  return empty() ? 0 : (*storage_)[begin_].timestamp;
}

Seconds EventStream::t_max() const noexcept {
  return empty() ? 0 : (*storage_)[end_ - 1].timestamp;
}

EventStream EventStream::subrange(std::size_t first, std::size_t last) const {
  last = std::min(last, size());
  first = std::min(first, last);
  EventStream s;
  s.storage_ = storage_;
  s.begin_ = begin_ + first;
  s.end_ = begin_ + last;
  return s;
}

std::span<const std::string_view> csv_columns(Protocol p) noexcept {
  switch (p) {
    case Protocol::Arp:
      return kArpColumns;
    case Protocol::Tcp:
      return kTcpColumns;
    case Protocol::Udp:
      return kUdpColumns;
  }
  return {};
}

std::vector<ProtocolRecord> parse_protocol_csv(const std::filesystem::path& path,
                                               Protocol protocol) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_protocol_csv(in, protocol, path.string());
}

std::vector<ProtocolRecord> parse_protocol_csv(std::istream& in, Protocol protocol,
                                               std::string_view source) {
  const auto columns = csv_columns(protocol);
  std::string line;
  std::size_t row = 0;

  // Header, skipping leading blank lines and a UTF-8 byte order mark.
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    check_header(split_fields(line), columns, source);
    have_header = true;
    break;
  }
  if (!have_header) throw SchemaError(std::string(source) + ": missing header row");

  std::vector<ProtocolRecord> out;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != columns.size()) {
      throw ParseError(row_prefix(source, row) + "expected " + std::to_string(columns.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       row);
    }
    const RowReader r(fields, columns, source, row);

    ProtocolRecord rec;
    rec.timestamp = r.integer(0);
    if (fields[1].empty()) throw ParseError(row_prefix(source, row) + "empty node", row);
    rec.node = std::string(fields[1]);
    switch (protocol) {
      case Protocol::Arp:
        rec.features = ArpFeatures{r.integer(2), r.integer(3)};
        break;
      case Protocol::Tcp:
        rec.features = TcpFeatures{r.integer(2),  r.integer(3),  r.real(4),
                                   r.integer(5),  r.integer(6),  r.integer(7),
                                   r.integer(8),  r.integer(9),  r.integer(10),
                                   r.integer(11), r.integer(12)};
        break;
      case Protocol::Udp:
        rec.features = UdpFeatures{r.integer(2), r.integer(3), r.real(4)};
        break;
    }
    try {
      validate(rec, row);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(source) + ": " + e.what(), row);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_protocol_csv(std::ostream& out, std::span<const ProtocolRecord> records,
                        Protocol protocol) {
  const auto columns = csv_columns(protocol);
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& rec : records) {
    if (rec.protocol() != protocol) continue;
    out << rec.timestamp << ',' << rec.node;
    if (const auto* a = rec.arp()) {
      out << ',' << a->count << ',' << a->degree;
    } else if (const auto* t = rec.tcp()) {
      out << ',' << t->num_ports << ',' << t->count << ',' << format_real(t->avg_len) << ','
          << t->count_fin << ',' << t->count_syn << ',' << t->count_rst << ',' << t->count_psh
          << ',' << t->count_ack << ',' << t->count_urg << ',' << t->count_ece << ','
          << t->count_cwr;
    } else if (const auto* u = rec.udp()) {
      out << ',' << u->num_ports << ',' << u->count << ',' << format_real(u->avg_len);
    }
    out << '\n';
  }
}

EventStream merge_streams(std::vector<std::vector<ProtocolRecord>> parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  if (total == 0) throw EmptyStreamError("no records in any input");

  std::vector<ProtocolRecord> merged;
  merged.reserve(total);
  for (auto& p : parts) {
    std::move(p.begin(), p.end(), std::back_inserter(merged));
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const ProtocolRecord& a, const ProtocolRecord& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     if (a.node != b.node) return a.node < b.node;
                     return a.protocol() < b.protocol();
                   });
  return EventStream::from_sorted(std::move(merged));
}

std::map<std::string, Seconds> honeypot_positives(const EventStream& stream) {
  std::map<std::string, Seconds> out;
  for (const auto& rec : stream.records()) {
    if (rec.protocol() == Protocol::Arp) continue;
    auto [it, inserted] = out.try_emplace(rec.node, rec.timestamp);
    if (!inserted) it->second = std::min(it->second, rec.timestamp);
  }
  return out;
}

}  // namespace honeyboost
