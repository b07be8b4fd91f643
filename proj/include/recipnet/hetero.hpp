#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "recipnet/core.hpp"
#include "recipnet/parallel.hpp"
#include "recipnet/reciprocity.hpp"

// Cross-layer overlay analyses: which layer carries the first reply to a
// pair's first interaction, and how low-barrier responses split between
// completed and incomplete trust requests. Trust events must be collapsed;
// only grants participate.

namespace recipnet {

// Tightest window covered by all three layers. Errors when a layer is absent
// or the intersection is empty.
inline TimeWindow common_layer_window(const TemporalMultigraph& graph) {
  std::array<std::optional<Timestamp>, kLayerCount> lo, hi;
  for (const Event& e : graph.events()) {
    auto& l = lo[static_cast<std::size_t>(e.layer)];
    auto& h = hi[static_cast<std::size_t>(e.layer)];
    if (!l || e.ts < *l) l = e.ts;
    if (!h || e.ts > *h) h = e.ts;
  }
  TimeWindow window{0, 0};
  bool first = true;
  for (int i = 0; i < kLayerCount; ++i) {
    if (!lo[i]) {
      throw std::runtime_error(std::string("common_layer_window: no ") +
                               layer_name(static_cast<Layer>(i)) + " events");
    }
    if (first) {
      window = {*lo[i], *hi[i]};
      first = false;
    } else {
      window = window.intersect({*lo[i], *hi[i]});
    }
  }
  if (!window.valid()) {
    throw std::runtime_error("common_layer_window: empty intersection");
  }
  return window;
}

// ---------------------------------------------------------------------------
// First-interaction response typing.
// ---------------------------------------------------------------------------

struct FirstResponseRow {
  std::int64_t first_forward_edges = 0;
  std::array<std::int64_t, kLayerCount> responses{};  // by responding layer
};

struct FirstResponseTable {
  std::array<FirstResponseRow, kLayerCount> rows;  // by forward layer

  FirstResponseRow& row(Layer l) { return rows[static_cast<std::size_t>(l)]; }
  const FirstResponseRow& row(Layer l) const {
    return rows[static_cast<std::size_t>(l)];
  }
};

// Per unordered pair: the earliest event of any layer fixes the initiator and
// the forward row; the earliest responder-to-initiator event(s) at or after
// it fill the response column(s). Equal-timestamp responses in several layers
// all count.
inline FirstResponseTable first_response_table(const TemporalMultigraph& graph,
                                               int threads = 1) {
  if (graph.events().empty()) {
    throw std::runtime_error("first_response_table: empty graph");
  }
  const auto pairs = unordered_pairs(graph);
  const auto& events = graph.events();

  const auto partials = parallel_chunk_map<FirstResponseTable>(
      pairs.size(), threads, [&](ChunkRange range) {
        FirstResponseTable part;
        std::vector<std::uint32_t> merged;
        for (std::size_t p = range.begin; p < range.end; ++p) {
          const auto [a, b] = pairs[p];
          detail::merge_pair_offsets(graph.pair_events(a, b),
                                     graph.pair_events(b, a), merged);

          const Event* forward = nullptr;
          for (std::uint32_t off : merged) {
            const Event& e = events[off];
            if (e.layer == Layer::Trust && !is_trust_grant(e)) continue;
            forward = &e;
            break;
          }
          if (forward == nullptr) continue;
          part.row(forward->layer).first_forward_edges += 1;

          // First response timestamp, then every layer tied at it.
          std::optional<Timestamp> t_resp;
          std::array<bool, kLayerCount> hit{};
          for (std::uint32_t off : merged) {
            const Event& e = events[off];
            if (e.layer == Layer::Trust && !is_trust_grant(e)) continue;
            if (e.src != forward->dst || e.ts < forward->ts) continue;
            if (t_resp && e.ts > *t_resp) break;
            t_resp = e.ts;
            hit[static_cast<std::size_t>(e.layer)] = true;
          }
          for (int l = 0; l < kLayerCount; ++l) {
            if (hit[l]) part.row(forward->layer).responses[l] += 1;
          }
        }
        return part;
      });

  FirstResponseTable table;
  for (const auto& part : partials) {
    for (int r = 0; r < kLayerCount; ++r) {
      table.rows[r].first_forward_edges += part.rows[r].first_forward_edges;
      for (int l = 0; l < kLayerCount; ++l) {
        table.rows[r].responses[l] += part.rows[r].responses[l];
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Complete vs. incomplete trust with response truncation.
// ---------------------------------------------------------------------------

struct TruncationPolicy {
  double horizon_days = 0.0;
};

// Mean first-partition trust response time over the graph. Errors when no
// trust partition closed.
inline TruncationPolicy mean_trust_response(const TemporalMultigraph& graph) {
  std::int64_t count = 0;
  std::int64_t seconds = 0;
  for (const PartitionRecord& rec : layer_partitions(graph, Layer::Trust)) {
    if (rec.index == 1 && rec.closed()) {
      ++count;
      seconds += *rec.t_backward - rec.t_forward;
    }
  }
  if (count == 0) {
    throw std::runtime_error("mean_trust_response: no closed trust partition");
  }
  return TruncationPolicy{seconds_to_days(seconds) /
                          static_cast<double>(count)};
}

struct TrustCompletionRow {
  std::int64_t forward_edges = 0;
  std::int64_t chat_responses = 0;
  std::int64_t trade_responses = 0;

  double chat_share() const {
    const std::int64_t total = chat_responses + trade_responses;
    return total == 0 ? 0.0
                      : static_cast<double>(chat_responses) /
                            static_cast<double>(total);
  }
  double trade_share() const {
    const std::int64_t total = chat_responses + trade_responses;
    return total == 0 ? 0.0
                      : static_cast<double>(trade_responses) /
                            static_cast<double>(total);
  }
};

struct TrustCompletionTable {
  TrustCompletionRow complete;
  TrustCompletionRow incomplete;
};

// For the first trust grant of each ordered pair at t0: the request is
// complete when the reverse grant lands within the horizon; chat and trade
// events from the responder strictly after t0 and no later than
// min(reply, t0 + horizon) count as responses.
inline TrustCompletionTable trust_completion_table(
    const TemporalMultigraph& graph, TruncationPolicy policy,
    int threads = 1) {
  if (!(policy.horizon_days > 0.0)) {
    throw std::invalid_argument("trust_completion_table: horizon <= 0");
  }
  const auto& events = graph.events();
  const auto& pair_entries = graph.pairs();
  const double horizon_seconds = policy.horizon_days * kSecondsPerDay;

  const auto partials = parallel_chunk_map<TrustCompletionTable>(
      pair_entries.size(), threads, [&](ChunkRange range) {
        TrustCompletionTable part;
        for (std::size_t p = range.begin; p < range.end; ++p) {
          const auto& entry = pair_entries[p];
          // First trust grant of this ordered pair.
          std::optional<Timestamp> t0;
          for (std::uint32_t off : entry.offsets) {
            if (is_trust_grant(events[off])) {
              t0 = events[off].ts;
              break;
            }
          }
          if (!t0) continue;

          // First reverse grant strictly after t0.
          std::optional<Timestamp> t_reply;
          for (std::uint32_t off : graph.pair_events(entry.dst, entry.src)) {
            const Event& e = events[off];
            if (is_trust_grant(e) && e.ts > *t0) {
              t_reply = e.ts;
              break;
            }
          }

          const double deadline = static_cast<double>(*t0) + horizon_seconds;
          const bool complete =
              t_reply && static_cast<double>(*t_reply) <= deadline;
          const double response_end =
              complete ? static_cast<double>(*t_reply) : deadline;

          std::int64_t chat = 0;
          std::int64_t trade = 0;
          for (std::uint32_t off : graph.pair_events(entry.dst, entry.src)) {
            const Event& e = events[off];
            if (e.ts <= *t0) continue;
            if (static_cast<double>(e.ts) > response_end) break;
            if (e.layer == Layer::Chat) ++chat;
            else if (e.layer == Layer::Trade) ++trade;
          }

          TrustCompletionRow& row = complete ? part.complete : part.incomplete;
          row.forward_edges += 1;
          row.chat_responses += chat;
          row.trade_responses += trade;
        }
        return part;
      });

  TrustCompletionTable table;
  for (const auto& part : partials) {
    table.complete.forward_edges += part.complete.forward_edges;
    table.complete.chat_responses += part.complete.chat_responses;
    table.complete.trade_responses += part.complete.trade_responses;
    table.incomplete.forward_edges += part.incomplete.forward_edges;
    table.incomplete.chat_responses += part.incomplete.chat_responses;
    table.incomplete.trade_responses += part.incomplete.trade_responses;
  }
  return table;
}

}  // namespace recipnet
