#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "recipnet/core.hpp"
#include "recipnet/parallel.hpp"

// Pair-timeline partitioning and reciprocation measurement. For each pair the
// timeline splits into partitions: a partition opens at a forward edge,
// closes at the first backward edge at or after it, and swallows the forward
// edges in between. Response time is the open-to-close delay.

namespace recipnet {

struct PartitionRecord {
  std::uint32_t index = 0;  // 1-based partition number within the pair
  Timestamp t_forward = 0;
  std::optional<Timestamp> t_backward;
  std::uint32_t subsumed_forward_count = 0;
  std::optional<double> response_time_days;

  bool closed() const { return t_backward.has_value(); }

  friend bool operator==(const PartitionRecord&,
                         const PartitionRecord&) = default;
};

// Both inputs must be sorted ascending. Backward edges arriving while no
// partition is open are ignored; a backward edge at exactly the opening time
// closes with response 0. A trailing unanswered partition subsumes every
// remaining forward edge.
inline std::vector<PartitionRecord> partition_pair(
    std::span<const Timestamp> forward, std::span<const Timestamp> backward) {
  for (std::size_t i = 1; i < forward.size(); ++i) {
    if (forward[i] < forward[i - 1]) {
      throw std::invalid_argument("partition_pair: forward not sorted");
    }
  }
  for (std::size_t i = 1; i < backward.size(); ++i) {
    if (backward[i] < backward[i - 1]) {
      throw std::invalid_argument("partition_pair: backward not sorted");
    }
  }

  std::vector<PartitionRecord> records;
  std::size_t i = 0;
  std::size_t j = 0;
  std::uint32_t index = 0;
  while (i < forward.size()) {
    PartitionRecord rec;
    rec.index = ++index;
    rec.t_forward = forward[i];
    ++i;
    while (j < backward.size() && backward[j] < rec.t_forward) ++j;
    if (j < backward.size()) {
      const Timestamp t2 = backward[j];
      ++j;
      while (i < forward.size() && forward[i] <= t2) {
        ++i;
        ++rec.subsumed_forward_count;
      }
      rec.t_backward = t2;
      rec.response_time_days = seconds_to_days(t2 - rec.t_forward);
    } else {
      rec.subsumed_forward_count =
          static_cast<std::uint32_t>(forward.size() - i);
      i = forward.size();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Trust collapse: Trustee grants stay grants, every lower level becomes a
// revocation (level Remove). Other layers pass through unchanged.
// ---------------------------------------------------------------------------

struct TrustCollapseReport {
  std::array<std::int64_t, 5> level_counts{};  // indexed by original code
  std::int64_t trust_edges = 0;                // collapsed to grant
  std::int64_t not_trust_edges = 0;            // collapsed to revocation

  std::int64_t total() const { return trust_edges + not_trust_edges; }
};

inline std::pair<std::vector<Event>, TrustCollapseReport> collapse_trust(
    std::vector<Event> events) {
  TrustCollapseReport report;
  for (Event& e : events) {
    if (e.layer != Layer::Trust || !e.trust_level) continue;
    ++report.level_counts[static_cast<std::size_t>(*e.trust_level)];
    if (*e.trust_level == TrustLevel::Trustee) {
      ++report.trust_edges;
    } else {
      ++report.not_trust_edges;
      e.trust_level = TrustLevel::Remove;
    }
  }
  return {std::move(events), report};
}

// ---------------------------------------------------------------------------
// Per-pair timelines for one layer. The pair's initiator is the source of the
// earliest relevant edge between the two players (total-order ties decide).
// Only Trustee-level events count as trust interactions.
// ---------------------------------------------------------------------------

struct PairTimeline {
  PlayerId initiator = 0;
  PlayerId responder = 0;
  std::vector<Timestamp> forward;
  std::vector<Timestamp> backward;
};

namespace detail {

inline bool layer_relevant(const Event& e, Layer layer) {
  if (e.layer != layer) return false;
  if (layer == Layer::Trust) return is_trust_grant(e);
  return true;
}

// Merges the two orientation offset lists of an unordered pair in ascending
// offset order (offsets index the sorted event array, so this is time order).
inline void merge_pair_offsets(std::span<const std::uint32_t> a,
                               std::span<const std::uint32_t> b,
                               std::vector<std::uint32_t>& out) {
  out.clear();
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    out.push_back(a[i] < b[j] ? a[i++] : b[j++]);
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
}

}  // namespace detail

// Canonical list of unordered pairs with at least one event, in deterministic
// (min id, max id) order of first appearance in the sorted pair index.
inline std::vector<std::pair<PlayerId, PlayerId>> unordered_pairs(
    const TemporalMultigraph& graph) {
  std::vector<std::pair<PlayerId, PlayerId>> pairs;
  for (const auto& entry : graph.pairs()) {
    if (entry.src < entry.dst) {
      pairs.emplace_back(entry.src, entry.dst);
    } else if (graph.find_pair(entry.dst, entry.src) == nullptr) {
      // Only the reversed orientation exists; keep it once.
      pairs.emplace_back(entry.dst, entry.src);
    }
  }
  return pairs;
}

// Builds the oriented timeline of one unordered pair for one layer. Returns
// nullopt when the pair has no relevant events.
inline std::optional<PairTimeline> pair_timeline(
    const TemporalMultigraph& graph, Layer layer, PlayerId a, PlayerId b) {
  const std::span<const std::uint32_t> ab = graph.pair_events(a, b);
  const std::span<const std::uint32_t> ba = graph.pair_events(b, a);
  std::vector<std::uint32_t> merged;
  detail::merge_pair_offsets(ab, ba, merged);

  PairTimeline tl;
  bool oriented = false;
  const auto& events = graph.events();
  for (std::uint32_t off : merged) {
    const Event& e = events[off];
    if (!detail::layer_relevant(e, layer)) continue;
    if (!oriented) {
      tl.initiator = e.src;
      tl.responder = e.dst;
      oriented = true;
    }
    if (e.src == tl.initiator) {
      tl.forward.push_back(e.ts);
    } else {
      tl.backward.push_back(e.ts);
    }
  }
  if (!oriented) return std::nullopt;
  return tl;
}

// ---------------------------------------------------------------------------
// Layer-level reciprocation statistics (multiple-reciprocation counting).
// ---------------------------------------------------------------------------

// Buckets: first, second, third, and everything later pooled as "other".
inline constexpr int kRecipBuckets = 4;

inline int partition_bucket(std::uint32_t index) {
  return index >= 4 ? 3 : static_cast<int>(index) - 1;
}

inline const char* bucket_name(int bucket) {
  switch (bucket) {
    case 0: return "first";
    case 1: return "second";
    case 2: return "third";
    case 3: return "other";
  }
  return "?";
}

struct ReciprocationStats {
  Layer layer = Layer::Chat;
  std::int64_t total_forward_edges = 0;
  std::array<std::int64_t, kRecipBuckets> reciprocation_counts{};
  std::array<std::int64_t, kRecipBuckets> response_seconds{};

  std::int64_t total_reciprocations() const {
    std::int64_t total = 0;
    for (std::int64_t c : reciprocation_counts) total += c;
    return total;
  }
  std::int64_t total_response_seconds() const {
    std::int64_t total = 0;
    for (std::int64_t s : response_seconds) total += s;
    return total;
  }
  double rate(int bucket) const {
    return total_forward_edges == 0
               ? 0.0
               : static_cast<double>(reciprocation_counts[bucket]) /
                     static_cast<double>(total_forward_edges);
  }
  double total_rate() const {
    return total_forward_edges == 0
               ? 0.0
               : static_cast<double>(total_reciprocations()) /
                     static_cast<double>(total_forward_edges);
  }
  std::optional<double> mean_response_days(int bucket) const {
    if (reciprocation_counts[bucket] == 0) return std::nullopt;
    return seconds_to_days(response_seconds[bucket]) /
           static_cast<double>(reciprocation_counts[bucket]);
  }
  std::optional<double> mean_response_days_overall() const {
    const std::int64_t n = total_reciprocations();
    if (n == 0) return std::nullopt;
    return seconds_to_days(total_response_seconds()) / static_cast<double>(n);
  }
};

inline ReciprocationStats reciprocation_stats(const TemporalMultigraph& graph,
                                              Layer layer, int threads = 1) {
  const auto pairs = unordered_pairs(graph);

  struct Partial {
    std::int64_t forwards = 0;
    std::array<std::int64_t, kRecipBuckets> counts{};
    std::array<std::int64_t, kRecipBuckets> seconds{};
  };

  const auto partials = parallel_chunk_map<Partial>(
      pairs.size(), threads, [&](ChunkRange range) {
        Partial part;
        for (std::size_t p = range.begin; p < range.end; ++p) {
          const auto tl = pair_timeline(graph, layer, pairs[p].first,
                                        pairs[p].second);
          if (!tl) continue;
          part.forwards += static_cast<std::int64_t>(tl->forward.size());
          for (const PartitionRecord& rec :
               partition_pair(tl->forward, tl->backward)) {
            if (!rec.closed()) continue;
            const int bucket = partition_bucket(rec.index);
            ++part.counts[bucket];
            part.seconds[bucket] += *rec.t_backward - rec.t_forward;
          }
        }
        return part;
      });

  ReciprocationStats stats;
  stats.layer = layer;
  for (const Partial& part : partials) {
    stats.total_forward_edges += part.forwards;
    for (int b = 0; b < kRecipBuckets; ++b) {
      stats.reciprocation_counts[b] += part.counts[b];
      stats.response_seconds[b] += part.seconds[b];
    }
  }
  return stats;
}

// All partition records of a layer, in canonical pair order.
inline std::vector<PartitionRecord> layer_partitions(
    const TemporalMultigraph& graph, Layer layer, int threads = 1) {
  const auto pairs = unordered_pairs(graph);
  const auto partials = parallel_chunk_map<std::vector<PartitionRecord>>(
      pairs.size(), threads, [&](ChunkRange range) {
        std::vector<PartitionRecord> part;
        for (std::size_t p = range.begin; p < range.end; ++p) {
          const auto tl = pair_timeline(graph, layer, pairs[p].first,
                                        pairs[p].second);
          if (!tl) continue;
          auto records = partition_pair(tl->forward, tl->backward);
          part.insert(part.end(), records.begin(), records.end());
        }
        return part;
      });
  std::vector<PartitionRecord> all;
  for (const auto& part : partials) {
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

// Histogram of closed-partition response times; bin k covers
// [k*bin_days, (k+1)*bin_days).
inline std::map<std::int64_t, std::int64_t> response_time_histogram(
    std::span<const PartitionRecord> partitions, double bin_days) {
  if (!(bin_days > 0.0)) {
    throw std::invalid_argument("response_time_histogram: bin_days <= 0");
  }
  std::map<std::int64_t, std::int64_t> hist;
  for (const PartitionRecord& rec : partitions) {
    if (!rec.closed()) continue;
    const auto bin =
        static_cast<std::int64_t>(*rec.response_time_days / bin_days);
    ++hist[bin];
  }
  return hist;
}

// ---------------------------------------------------------------------------
// Cancellation reciprocation and patience over collapsed trust events.
// ---------------------------------------------------------------------------

struct CancellationStats {
  std::int64_t mutual_trust_pairs = 0;
  std::int64_t cancellation_initiations = 0;
  std::int64_t cancellation_reciprocations = 0;
  std::int64_t cancellation_response_seconds = 0;

  std::int64_t one_way_grant_pairs = 0;
  std::int64_t waited_indefinitely = 0;
  std::int64_t downgraded_without_reply = 0;

  std::optional<double> mean_cancellation_response_days() const {
    if (cancellation_reciprocations == 0) return std::nullopt;
    return seconds_to_days(cancellation_response_seconds) /
           static_cast<double>(cancellation_reciprocations);
  }
  double waited_fraction() const {
    return one_way_grant_pairs == 0
               ? 0.0
               : static_cast<double>(waited_indefinitely) /
                     static_cast<double>(one_way_grant_pairs);
  }
  double downgraded_fraction() const {
    return one_way_grant_pairs == 0
               ? 0.0
               : static_cast<double>(downgraded_without_reply) /
                     static_cast<double>(one_way_grant_pairs);
  }
  double residual_fraction() const {
    return one_way_grant_pairs == 0
               ? 0.0
               : static_cast<double>(one_way_grant_pairs -
                                     waited_indefinitely -
                                     downgraded_without_reply) /
                     static_cast<double>(one_way_grant_pairs);
  }
};

// Expects trust events already collapsed to grant/revoke. Mutual-trust pairs
// are scanned for a first revocation (initiation) and a counter-revocation by
// the other side (reciprocation, ties allowed). Patience is measured over
// pairs whose grant stayed one-way to the end of the window.
inline CancellationStats cancellation_analysis(const TemporalMultigraph& graph,
                                               int threads = 1) {
  const auto pairs = unordered_pairs(graph);
  const auto& events = graph.events();

  const auto partials = parallel_chunk_map<CancellationStats>(
      pairs.size(), threads, [&](ChunkRange range) {
        CancellationStats part;
        std::vector<std::uint32_t> merged;
        for (std::size_t p = range.begin; p < range.end; ++p) {
          const auto [a, b] = pairs[p];
          detail::merge_pair_offsets(graph.pair_events(a, b),
                                     graph.pair_events(b, a), merged);

          std::optional<Timestamp> first_grant_ab, first_grant_ba;
          std::vector<std::pair<Timestamp, bool>> revokes;  // (ts, by_a)
          for (std::uint32_t off : merged) {
            const Event& e = events[off];
            if (e.layer != Layer::Trust) continue;
            if (is_trust_grant(e)) {
              auto& slot = e.src == a ? first_grant_ab : first_grant_ba;
              if (!slot) slot = e.ts;
            } else if (is_trust_revoke(e)) {
              revokes.emplace_back(e.ts, e.src == a);
            }
          }

          if (first_grant_ab && first_grant_ba) {
            ++part.mutual_trust_pairs;
            const Timestamp t_mutual =
                std::max(*first_grant_ab, *first_grant_ba);
            // First revocation by either side once mutual trust exists.
            const auto init = std::find_if(
                revokes.begin(), revokes.end(),
                [&](const auto& r) { return r.first >= t_mutual; });
            if (init != revokes.end()) {
              ++part.cancellation_initiations;
              const auto reply = std::find_if(
                  init + 1, revokes.end(), [&](const auto& r) {
                    return r.second != init->second && r.first >= init->first;
                  });
              if (reply != revokes.end()) {
                ++part.cancellation_reciprocations;
                part.cancellation_response_seconds +=
                    reply->first - init->first;
              }
            }
          } else if (first_grant_ab || first_grant_ba) {
            ++part.one_way_grant_pairs;
            const bool by_a = first_grant_ab.has_value();
            const Timestamp t_grant =
                by_a ? *first_grant_ab : *first_grant_ba;
            // Initiator's own downgrade and any trust action by the responder
            // after the grant.
            std::optional<Timestamp> t_down, t_reply;
            for (const auto& [ts, rev_by_a] : revokes) {
              if (ts < t_grant) continue;
              if (rev_by_a == by_a) {
                if (!t_down) t_down = ts;
              } else {
                if (!t_reply) t_reply = ts;
              }
            }
            if (!t_down && !t_reply) {
              ++part.waited_indefinitely;
            } else if (t_down && (!t_reply || *t_down < *t_reply)) {
              ++part.downgraded_without_reply;
            }
            // Anything else (responder revoked first) is the residual.
          }
        }
        return part;
      });

  CancellationStats stats;
  for (const CancellationStats& part : partials) {
    stats.mutual_trust_pairs += part.mutual_trust_pairs;
    stats.cancellation_initiations += part.cancellation_initiations;
    stats.cancellation_reciprocations += part.cancellation_reciprocations;
    stats.cancellation_response_seconds += part.cancellation_response_seconds;
    stats.one_way_grant_pairs += part.one_way_grant_pairs;
    stats.waited_indefinitely += part.waited_indefinitely;
    stats.downgraded_without_reply += part.downgraded_without_reply;
  }
  return stats;
}

}  // namespace recipnet
