#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

// Deterministic chunked parallelism: the chunk layout depends only on the
// item count, never on the thread count, and partial results are combined in
// chunk order. Analyses that aggregate with commutative integer accumulators
// therefore produce identical results for any --threads value.

namespace recipnet {

struct ChunkRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

inline std::vector<ChunkRange> make_chunks(std::size_t n_items) {
  std::vector<ChunkRange> chunks;
  if (n_items == 0) return chunks;
  const std::size_t target = 2048;  // items per chunk
  std::size_t n_chunks = (n_items + target - 1) / target;
  if (n_chunks > 256) n_chunks = 256;
  const std::size_t base = n_items / n_chunks;
  const std::size_t extra = n_items % n_chunks;
  std::size_t pos = 0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const std::size_t len = base + (c < extra ? 1 : 0);
    chunks.push_back({pos, pos + len});
    pos += len;
  }
  return chunks;
}

// fn(ChunkRange) -> Partial; returns partials indexed by chunk.
template <class Partial, class Fn>
std::vector<Partial> parallel_chunk_map(std::size_t n_items, int threads,
                                        Fn&& fn) {
  const std::vector<ChunkRange> chunks = make_chunks(n_items);
  std::vector<Partial> partials(chunks.size());
  if (chunks.empty()) return partials;

  if (threads <= 1 || chunks.size() == 1) {
    for (std::size_t c = 0; c < chunks.size(); ++c) partials[c] = fn(chunks[c]);
    return partials;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks.size()) return;
      partials[c] = fn(chunks[c]);
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), chunks.size());
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return partials;
}

}  // namespace recipnet
