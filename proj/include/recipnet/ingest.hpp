#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recipnet/core.hpp"
#include "recipnet/io_util.hpp"

// Edge-log and demographics ingestion. Malformed records are counted and
// skipped so analyses stay runnable on dirty logs; only structural problems
// (bad header, duplicate demographics) abort.

namespace recipnet {

// Interns player names to dense ids in first-appearance order.
class PlayerTable {
 public:
  PlayerId intern(std::string_view name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    const auto id = static_cast<PlayerId>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
  }

  const std::string& name(PlayerId id) const { return names_.at(id); }

  std::optional<PlayerId> find(std::string_view name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return names_.size(); }

 private:
  // names_ is a deque so interned string_views stay stable.
  std::deque<std::string> names_;
  std::unordered_map<std::string_view, PlayerId> ids_;
};

enum class RejectReason : int {
  BadFieldCount = 0,
  BadTimestamp,
  SelfLoop,
  BadLayer,
  BadTrustLevel,
  UnexpectedAttr,
  BadExperience,
  kCount,
};

inline const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::BadFieldCount: return "bad_field_count";
    case RejectReason::BadTimestamp: return "bad_timestamp";
    case RejectReason::SelfLoop: return "self_loop";
    case RejectReason::BadLayer: return "bad_layer";
    case RejectReason::BadTrustLevel: return "bad_trust_level";
    case RejectReason::UnexpectedAttr: return "unexpected_attr";
    case RejectReason::BadExperience: return "bad_experience";
    default: return "?";
  }
}

struct IngestReport {
  std::int64_t records_read = 0;
  std::int64_t records_accepted = 0;
  std::int64_t records_rejected = 0;
  std::array<std::int64_t, static_cast<std::size_t>(RejectReason::kCount)>
      reject_counts{};
  std::array<std::int64_t, kLayerCount> layer_counts{};
  std::optional<Timestamp> min_ts;
  std::optional<Timestamp> max_ts;

  // First few rejected lines kept for diagnostics (1-based line numbers,
  // counting the header as line 1).
  struct RejectSample {
    std::int64_t line = 0;
    RejectReason reason = RejectReason::BadFieldCount;
  };
  std::vector<RejectSample> samples;

  void reject(std::int64_t line, RejectReason reason) {
    ++records_rejected;
    ++reject_counts[static_cast<std::size_t>(reason)];
    if (samples.size() < 100) samples.push_back({line, reason});
  }
};

struct ParsedEdgeLog {
  std::vector<Event> events;  // in file order, unsorted
  PlayerTable players;
  IngestReport report;
};

namespace detail {

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

// Splits on commas into at most N+1 pieces; returns false when the field
// count differs from N.
template <std::size_t N>
inline bool split_exact(std::string_view line,
                        std::array<std::string_view, N>& out) {
  std::size_t field = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      if (field >= N) return false;
      out[field++] = line.substr(start, i - start);
      start = i + 1;
    }
  }
  return field == N;
}

inline bool parse_int64(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace detail

inline constexpr std::string_view kEdgeLogHeader = "ts,src,dst,layer,attr";
inline constexpr std::string_view kDemographicsHeader = "player,gender,experience";

// Parses the edge-log CSV. Header must be exactly `ts,src,dst,layer,attr`.
// Bad records are rejected and counted; parsing always continues.
inline ParsedEdgeLog parse_edge_log(std::istream& in) {
  ParsedEdgeLog result;
  std::string raw;
  if (!std::getline(in, raw)) {
    throw std::runtime_error("edge log: empty input, expected header");
  }
  if (detail::strip_cr(raw) != kEdgeLogHeader) {
    throw std::runtime_error("edge log: bad header, expected '" +
                             std::string(kEdgeLogHeader) + "'");
  }

  std::int64_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::strip_cr(raw);
    if (line.empty()) continue;  // blank lines are not records
    ++result.report.records_read;

    std::array<std::string_view, 5> f;
    if (!detail::split_exact(line, f)) {
      result.report.reject(line_no, RejectReason::BadFieldCount);
      continue;
    }
    std::int64_t ts = 0;
    if (!detail::parse_int64(f[0], ts) || ts < 0) {
      result.report.reject(line_no, RejectReason::BadTimestamp);
      continue;
    }
    if (f[1].empty() || f[2].empty()) {
      result.report.reject(line_no, RejectReason::BadFieldCount);
      continue;
    }
    if (f[1] == f[2]) {
      result.report.reject(line_no, RejectReason::SelfLoop);
      continue;
    }
    const std::optional<Layer> layer = layer_from_name(f[3]);
    if (!layer) {
      result.report.reject(line_no, RejectReason::BadLayer);
      continue;
    }
    std::optional<TrustLevel> trust_level;
    if (*layer == Layer::Trust) {
      std::int64_t code = 0;
      if (!detail::parse_int64(f[4], code) || code < 0 || code > 4) {
        result.report.reject(line_no, RejectReason::BadTrustLevel);
        continue;
      }
      trust_level = static_cast<TrustLevel>(code);
    } else if (!f[4].empty()) {
      result.report.reject(line_no, RejectReason::UnexpectedAttr);
      continue;
    }

    Event e;
    e.ts = ts;
    e.src = result.players.intern(f[1]);
    e.dst = result.players.intern(f[2]);
    e.layer = *layer;
    e.trust_level = trust_level;
    result.events.push_back(e);

    ++result.report.records_accepted;
    ++result.report.layer_counts[static_cast<std::size_t>(*layer)];
    if (!result.report.min_ts || ts < *result.report.min_ts) {
      result.report.min_ts = ts;
    }
    if (!result.report.max_ts || ts > *result.report.max_ts) {
      result.report.max_ts = ts;
    }
  }
  return result;
}

// Writes events back to the edge-log CSV format.
inline void write_edge_csv(const std::vector<Event>& events,
                           const PlayerTable& players, std::ostream& out) {
  out << kEdgeLogHeader << "\n";
  for (const Event& e : events) {
    out << e.ts << ',' << players.name(e.src) << ',' << players.name(e.dst)
        << ',' << layer_name(e.layer) << ',';
    if (e.trust_level) {
      out << static_cast<int>(*e.trust_level);
    }
    out << "\n";
  }
}

// Collapses chat events to one per (ordered pair, UTC day), keeping the
// earliest timestamp of each group. Other layers pass through. The relative
// input order of surviving events is preserved.
inline std::vector<Event> sessionize_chat(const std::vector<Event>& events) {
  // Pick the representative (minimum by total order) of every chat group.
  std::unordered_map<std::uint64_t, std::map<std::int64_t, std::size_t>> best;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.layer != Layer::Chat) continue;
    auto& by_day = best[pair_key(e.src, e.dst)];
    auto [it, inserted] = by_day.emplace(day_index(e.ts), i);
    if (!inserted && event_less(e, events[it->second])) it->second = i;
  }
  std::vector<Event> out;
  out.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.layer != Layer::Chat) {
      out.push_back(e);
      continue;
    }
    const auto& by_day = best.at(pair_key(e.src, e.dst));
    if (by_day.at(day_index(e.ts)) == i) out.push_back(e);
  }
  return out;
}

struct DemographicsTable {
  std::map<PlayerId, PlayerDemographics> records;
  std::int64_t records_read = 0;
  std::int64_t records_accepted = 0;
  std::int64_t records_rejected = 0;

  const PlayerDemographics* find(PlayerId player) const {
    auto it = records.find(player);
    return it == records.end() ? nullptr : &it->second;
  }
};

// Parses the demographics CSV. A duplicate player id is a hard error; a
// negative or malformed experience rejects only that record. Unrecognized
// gender tokens map to Unknown.
inline DemographicsTable parse_demographics(std::istream& in,
                                            PlayerTable& players) {
  DemographicsTable table;
  std::string raw;
  if (!std::getline(in, raw)) {
    throw std::runtime_error("demographics: empty input, expected header");
  }
  if (detail::strip_cr(raw) != kDemographicsHeader) {
    throw std::runtime_error("demographics: bad header, expected '" +
                             std::string(kDemographicsHeader) + "'");
  }
  while (std::getline(in, raw)) {
    const std::string_view line = detail::strip_cr(raw);
    if (line.empty()) continue;
    ++table.records_read;

    std::array<std::string_view, 3> f;
    if (!detail::split_exact(line, f) || f[0].empty()) {
      ++table.records_rejected;
      continue;
    }
    std::int64_t experience = 0;
    if (!detail::parse_int64(f[2], experience) || experience < 0) {
      ++table.records_rejected;
      continue;
    }
    Gender gender = Gender::Unknown;
    if (f[1] == "M") gender = Gender::Male;
    else if (f[1] == "F") gender = Gender::Female;

    const PlayerId id = players.intern(f[0]);
    PlayerDemographics rec{id, gender, experience};
    auto [it, inserted] = table.records.emplace(id, rec);
    if (!inserted) {
      throw std::runtime_error("demographics: duplicate player '" +
                               std::string(f[0]) + "'");
    }
    ++table.records_accepted;
  }
  return table;
}

inline void write_demographics_csv(const std::vector<PlayerDemographics>& recs,
                                   const PlayerTable& players,
                                   std::ostream& out) {
  out << kDemographicsHeader << "\n";
  for (const PlayerDemographics& d : recs) {
    const char* g = d.gender == Gender::Male   ? "M"
                    : d.gender == Gender::Female ? "F"
                                                 : "?";
    out << players.name(d.player) << ',' << g << ',' << d.experience << "\n";
  }
}

}  // namespace recipnet
