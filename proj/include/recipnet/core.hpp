#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Core domain types: timestamped directed interaction events on three layers
// (chat, trade, trust) and an immutable time-sorted multigraph over them.

namespace recipnet {

using Timestamp = std::int64_t;  // UTC seconds since epoch, non-negative
using PlayerId = std::uint32_t;

inline constexpr std::int64_t kSecondsPerDay = 86400;

inline std::int64_t day_index(Timestamp ts) { return ts / kSecondsPerDay; }

inline double seconds_to_days(std::int64_t seconds) {
  return static_cast<double>(seconds) / static_cast<double>(kSecondsPerDay);
}

enum class Layer : std::uint8_t { Chat = 0, Trade = 1, Trust = 2 };

inline constexpr int kLayerCount = 3;

inline const char* layer_name(Layer layer) {
  switch (layer) {
    case Layer::Chat: return "chat";
    case Layer::Trade: return "trade";
    case Layer::Trust: return "trust";
  }
  return "?";
}

inline std::optional<Layer> layer_from_name(std::string_view name) {
  if (name == "chat") return Layer::Chat;
  if (name == "trade") return Layer::Trade;
  if (name == "trust") return Layer::Trust;
  return std::nullopt;
}

// House-access permission levels carried by trust edges. Integer codes are
// part of the file format.
enum class TrustLevel : std::uint8_t {
  Remove = 0,
  None = 1,
  Visitor = 2,
  Friend = 3,
  Trustee = 4,
};

inline const char* trust_level_name(TrustLevel level) {
  switch (level) {
    case TrustLevel::Remove: return "remove";
    case TrustLevel::None: return "none";
    case TrustLevel::Visitor: return "visitor";
    case TrustLevel::Friend: return "friend";
    case TrustLevel::Trustee: return "trustee";
  }
  return "?";
}

enum class Gender : std::uint8_t { Male, Female, Unknown };

struct PlayerDemographics {
  PlayerId player = 0;
  Gender gender = Gender::Unknown;
  std::int64_t experience = 0;  // non-negative experience level

  friend bool operator==(const PlayerDemographics&,
                         const PlayerDemographics&) = default;
};

// One timestamped directed typed interaction. trust_level is present exactly
// when layer == Trust.
struct Event {
  Timestamp ts = 0;
  PlayerId src = 0;
  PlayerId dst = 0;
  Layer layer = Layer::Chat;
  std::optional<TrustLevel> trust_level;

  friend bool operator==(const Event&, const Event&) = default;
};

// Total order used everywhere ties must break deterministically.
inline std::strong_ordering event_order(const Event& a, const Event& b) {
  if (auto c = a.ts <=> b.ts; c != 0) return c;
  if (auto c = a.src <=> b.src; c != 0) return c;
  if (auto c = a.dst <=> b.dst; c != 0) return c;
  if (auto c = a.layer <=> b.layer; c != 0) return c;
  return a.trust_level <=> b.trust_level;
}

inline bool event_less(const Event& a, const Event& b) {
  return event_order(a, b) < 0;
}

inline bool is_trust_grant(const Event& e) {
  return e.layer == Layer::Trust && e.trust_level &&
         *e.trust_level == TrustLevel::Trustee;
}

// After collapse_trust every non-grant trust event carries level Remove.
inline bool is_trust_revoke(const Event& e) {
  return e.layer == Layer::Trust && e.trust_level &&
         *e.trust_level != TrustLevel::Trustee;
}

// Inclusive observation window [start, end].
struct TimeWindow {
  Timestamp start = 0;
  Timestamp end = 0;

  bool contains(Timestamp ts) const { return ts >= start && ts <= end; }
  bool contains(const TimeWindow& other) const {
    return other.start >= start && other.end <= end;
  }
  TimeWindow intersect(const TimeWindow& other) const {
    return TimeWindow{std::max(start, other.start), std::min(end, other.end)};
  }
  bool valid() const { return start <= end; }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

// Set of layers as a small bitmask.
class LayerSet {
 public:
  LayerSet() = default;
  LayerSet(std::initializer_list<Layer> layers) {
    for (Layer l : layers) insert(l);
  }
  static LayerSet all() { return LayerSet{Layer::Chat, Layer::Trade, Layer::Trust}; }

  void insert(Layer l) { mask_ |= bit(l); }
  bool contains(Layer l) const { return (mask_ & bit(l)) != 0; }
  bool empty() const { return mask_ == 0; }

  friend bool operator==(const LayerSet&, const LayerSet&) = default;

 private:
  static std::uint8_t bit(Layer l) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(l));
  }
  std::uint8_t mask_ = 0;
};

inline std::uint64_t pair_key(PlayerId src, PlayerId dst) {
  return (static_cast<std::uint64_t>(src) << 32) | dst;
}

// Immutable after construction; safe to share across threads.
class TemporalMultigraph {
 public:
  struct PairEntry {
    PlayerId src = 0;
    PlayerId dst = 0;
    std::vector<std::uint32_t> offsets;  // into events(), time-ordered
  };
  struct NodeEntry {
    PlayerId player = 0;
    std::vector<std::uint32_t> offsets;  // incident events, time-ordered
  };

  TemporalMultigraph() = default;

  const std::vector<Event>& events() const { return events_; }
  const std::vector<PairEntry>& pairs() const { return pairs_; }
  const std::vector<NodeEntry>& nodes() const { return nodes_; }
  const TimeWindow& window() const { return window_; }

  std::span<const std::uint32_t> pair_events(PlayerId src, PlayerId dst) const {
    const PairEntry* entry = find_pair(src, dst);
    if (entry == nullptr) return {};
    return entry->offsets;
  }

  std::span<const std::uint32_t> node_events(PlayerId player) const {
    auto it = std::lower_bound(
        nodes_.begin(), nodes_.end(), player,
        [](const NodeEntry& e, PlayerId p) { return e.player < p; });
    if (it == nodes_.end() || it->player != player) return {};
    return it->offsets;
  }

  const PairEntry* find_pair(PlayerId src, PlayerId dst) const {
    const std::uint64_t key = pair_key(src, dst);
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), key,
                               [](const PairEntry& e, std::uint64_t k) {
                                 return pair_key(e.src, e.dst) < k;
                               });
    if (it == pairs_.end() || pair_key(it->src, it->dst) != key) return nullptr;
    return &*it;
  }

  friend TemporalMultigraph build_graph(std::vector<Event> events,
                                        TimeWindow window);

 private:
  std::vector<Event> events_;
  std::vector<PairEntry> pairs_;   // sorted by (src, dst)
  std::vector<NodeEntry> nodes_;   // sorted by player
  TimeWindow window_;
};

// Sorts events by the total order and builds both indexes. Events outside the
// window, self-loops, and trust-level mismatches are hard errors naming the
// offending input position.
inline TemporalMultigraph build_graph(std::vector<Event> events,
                                      TimeWindow window) {
  if (!window.valid()) {
    throw std::invalid_argument("build_graph: window start exceeds end");
  }
  if (window.start < 0) {
    throw std::invalid_argument("build_graph: window start is negative");
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.src == e.dst) {
      throw std::invalid_argument("build_graph: self-loop at event " +
                                  std::to_string(i));
    }
    if (!window.contains(e.ts)) {
      throw std::invalid_argument("build_graph: event " + std::to_string(i) +
                                  " outside window");
    }
    if ((e.layer == Layer::Trust) != e.trust_level.has_value()) {
      throw std::invalid_argument(
          "build_graph: trust level presence mismatch at event " +
          std::to_string(i));
    }
  }

  TemporalMultigraph graph;
  graph.window_ = window;
  std::sort(events.begin(), events.end(), event_less);
  graph.events_ = std::move(events);

  const auto n = static_cast<std::uint32_t>(graph.events_.size());

  // Pair index: offsets grouped by (src, dst), already time-ordered because
  // the event array is sorted and sort below is stable on equal keys.
  {
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                const Event& ea = graph.events_[a];
                const Event& eb = graph.events_[b];
                const std::uint64_t ka = pair_key(ea.src, ea.dst);
                const std::uint64_t kb = pair_key(eb.src, eb.dst);
                if (ka != kb) return ka < kb;
                return a < b;
              });
    for (std::uint32_t off : order) {
      const Event& e = graph.events_[off];
      if (graph.pairs_.empty() || graph.pairs_.back().src != e.src ||
          graph.pairs_.back().dst != e.dst) {
        graph.pairs_.push_back({e.src, e.dst, {}});
      }
      graph.pairs_.back().offsets.push_back(off);
    }
  }

  // Node index: every event appears under both endpoints.
  {
    std::vector<std::pair<PlayerId, std::uint32_t>> incid;
    incid.reserve(2 * static_cast<std::size_t>(n));
    for (std::uint32_t i = 0; i < n; ++i) {
      incid.emplace_back(graph.events_[i].src, i);
      incid.emplace_back(graph.events_[i].dst, i);
    }
    std::sort(incid.begin(), incid.end());
    for (const auto& [player, off] : incid) {
      if (graph.nodes_.empty() || graph.nodes_.back().player != player) {
        graph.nodes_.push_back({player, {}});
      }
      graph.nodes_.back().offsets.push_back(off);
    }
  }

  return graph;
}

// Keeps only events matching the layer set inside the sub-window (inclusive
// bounds) and rebuilds the indexes.
inline TemporalMultigraph restrict(const TemporalMultigraph& graph,
                                   LayerSet layers, TimeWindow window) {
  if (layers.empty()) {
    throw std::invalid_argument("restrict: empty layer set");
  }
  if (!graph.window().contains(window)) {
    throw std::invalid_argument("restrict: window not inside graph window");
  }
  std::vector<Event> kept;
  for (const Event& e : graph.events()) {
    if (layers.contains(e.layer) && window.contains(e.ts)) kept.push_back(e);
  }
  return build_graph(std::move(kept), window);
}

}  // namespace recipnet
