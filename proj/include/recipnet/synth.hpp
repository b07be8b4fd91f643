#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "recipnet/core.hpp"
#include "recipnet/ingest.hpp"
#include "recipnet/rng.hpp"

// Seeded generative model of a barrier-coupled multilayer network. Every pair
// runs an exchange walk: a forward edge opens an exchange, a coin with the
// layer's reciprocation probability decides whether a reply follows after a
// power-law delay, and an unanswered exchange ends the pair's activity (any
// later forward could never open a new exchange). With that construction the
// aggregate measured reciprocation rate converges to the configured
// probability. Trust replies can be coupled to the responder's trade count
// through a logistic link. The generator records everything it plants, so
// downstream analytics can be checked exactly.

namespace recipnet {

// Discrete power-law sampler on {1..cutoff} with P(d) proportional to
// d^(-alpha), scaled by unit_days per step.
class PowerLawSampler {
 public:
  PowerLawSampler(double alpha, int cutoff) : alpha_(alpha), cutoff_(cutoff) {
    if (!(alpha > 1.0)) {
      throw std::invalid_argument("PowerLawSampler: alpha must exceed 1");
    }
    if (cutoff < 1 || cutoff > 2000000) {
      throw std::invalid_argument("PowerLawSampler: bad cutoff");
    }
    cumulative_.reserve(cutoff);
    double total = 0.0;
    for (int d = 1; d <= cutoff; ++d) {
      total += std::pow(static_cast<double>(d), -alpha);
      cumulative_.push_back(total);
    }
  }

  int sample(Rng& rng) const {
    const double u = rng.next_unit() * cumulative_.back();
    const auto it =
        std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<int>(it - cumulative_.begin()) + 1;
  }

  double mean() const {
    double num = 0.0;
    for (int d = 1; d <= cutoff_; ++d) {
      num += static_cast<double>(d) *
             std::pow(static_cast<double>(d), -alpha_);
    }
    return num / cumulative_.back();
  }

  double alpha() const { return alpha_; }
  int cutoff() const { return cutoff_; }

 private:
  double alpha_;
  int cutoff_;
  std::vector<double> cumulative_;
};

// Day-valued delay in {1..cutoff_days} with P(d) proportional to d^(-alpha).
inline int sample_power_law_delay(double alpha, int cutoff_days, Rng& rng) {
  if (!(alpha > 1.0) || cutoff_days < 1) {
    throw std::invalid_argument("sample_power_law_delay: bad parameters");
  }
  PowerLawSampler sampler(alpha, cutoff_days);
  return sampler.sample(rng);
}

// ---------------------------------------------------------------------------
// Configuration.
// ---------------------------------------------------------------------------

struct DelayConfig {
  double alpha = 2.0;
  int cutoff_units = 50;
  double unit_days = 1.0;  // sub-day delays need unit_days < 1

  double mean_days() const {
    return PowerLawSampler(alpha, cutoff_units).mean() * unit_days;
  }
  double cutoff_days() const { return cutoff_units * unit_days; }
};

// Unit size that makes the configured delay distribution hit a target mean.
inline double delay_unit_for_mean(double alpha, int cutoff_units,
                                  double target_mean_days) {
  return target_mean_days / PowerLawSampler(alpha, cutoff_units).mean();
}

struct LayerGenConfig {
  double pairs_per_player = 1.0;
  double forwards_per_pair_day = 0.01;  // arrival rate of the exchange walk
  double reciprocation_probability = 0.3;
  DelayConfig delay;
};

struct CouplingConfig {
  // Trust-reply probability: sigmoid(beta0 + beta_trade * trades from the
  // responder before the candidate reply time). beta0 defaults to
  // logit(trust reciprocation probability) so beta_trade = 0 reduces to the
  // plain barrier model.
  std::optional<double> beta0;
  double beta_trade = 0.0;
  // Fraction of trust pairs laid over an existing trade (or chat) pair so the
  // coupled signals actually overlap.
  double trust_overlap_trade = 0.0;
  double trust_overlap_chat = 0.0;
};

struct RevokeConfig {
  double after_mutual = 0.0;  // P(one side revokes after mutual trust)
  double reply = 0.0;         // P(the other side revokes back)
  double unanswered = 0.0;    // P(initiator downgrades an unanswered grant)
};

struct DemographicsConfig {
  double p_male = 0.45;
  double p_female = 0.35;  // remainder is unknown
  int max_experience = 100;
};

struct SynthConfig {
  int n_players = 2000;
  int window_days = 270;
  std::uint64_t seed = 1;
  LayerGenConfig chat;
  LayerGenConfig trade;
  LayerGenConfig trust;
  CouplingConfig coupling;
  RevokeConfig revoke;
  DemographicsConfig demographics;

  // Barrier calibration: reciprocation 0.326/0.263/0.140 and mean delays
  // 0.317/13/27 days for chat/trade/trust.
  static SynthConfig defaults() {
    SynthConfig c;
    c.chat.pairs_per_player = 2.0;
    c.chat.forwards_per_pair_day = 0.02;
    c.chat.reciprocation_probability = 0.326;
    c.chat.delay = {2.0, 70, delay_unit_for_mean(2.0, 70, 0.317)};
    c.trade.pairs_per_player = 1.0;
    c.trade.forwards_per_pair_day = 0.01;
    c.trade.reciprocation_probability = 0.263;
    c.trade.delay = {2.0, 50, delay_unit_for_mean(2.0, 50, 13.0)};
    c.trust.pairs_per_player = 0.5;
    c.trust.forwards_per_pair_day = 0.004;
    c.trust.reciprocation_probability = 0.140;
    c.trust.delay = {2.0, 50, delay_unit_for_mean(2.0, 50, 27.0)};
    c.coupling.trust_overlap_trade = 0.5;
    c.coupling.trust_overlap_chat = 0.5;
    c.revoke = {0.12, 0.2, 0.08};
    return c;
  }

  // Defaults plus a strong trade-to-trust link for overlay experiments.
  static SynthConfig coupled_defaults() {
    SynthConfig c = defaults();
    c.coupling.beta_trade = 0.35;
    c.coupling.trust_overlap_trade = 0.7;
    c.coupling.trust_overlap_chat = 0.5;
    return c;
  }

  void validate() const {
    if (n_players < 2) throw std::invalid_argument("synth: n_players < 2");
    if (window_days < 1) throw std::invalid_argument("synth: window_days < 1");
    for (const LayerGenConfig* l : {&chat, &trade, &trust}) {
      if (l->pairs_per_player < 0 || l->forwards_per_pair_day <= 0) {
        throw std::invalid_argument("synth: bad layer rates");
      }
      const double p = l->reciprocation_probability;
      if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument("synth: probability outside [0,1]");
      }
      if (!(l->delay.alpha > 1.0) || l->delay.cutoff_units < 1 ||
          l->delay.unit_days <= 0) {
        throw std::invalid_argument("synth: bad delay config");
      }
    }
    for (double p : {coupling.trust_overlap_trade, coupling.trust_overlap_chat,
                     revoke.after_mutual, revoke.reply, revoke.unanswered,
                     demographics.p_male, demographics.p_female}) {
      if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument("synth: probability outside [0,1]");
      }
    }
    if (demographics.p_male + demographics.p_female > 1.0) {
      throw std::invalid_argument("synth: gender probabilities exceed 1");
    }
  }
};

// ---------------------------------------------------------------------------
// Ground truth: what the generator planted, bucketed like the measured stats.
// ---------------------------------------------------------------------------

struct GroundTruthLayer {
  std::int64_t forwards = 0;
  std::array<std::int64_t, 4> closed{};            // first/second/third/other
  std::array<std::int64_t, 4> response_seconds{};  // same buckets
  std::int64_t open_partitions = 0;

  std::int64_t total_closed() const {
    std::int64_t t = 0;
    for (std::int64_t c : closed) t += c;
    return t;
  }
};

struct GroundTruth {
  std::array<GroundTruthLayer, kLayerCount> layers;

  GroundTruthLayer& layer(Layer l) {
    return layers[static_cast<std::size_t>(l)];
  }
  const GroundTruthLayer& layer(Layer l) const {
    return layers[static_cast<std::size_t>(l)];
  }
};

struct SynthOutput {
  std::vector<Event> events;  // sorted by the core total order
  PlayerTable players;
  std::vector<PlayerDemographics> demographics;
  GroundTruth truth;
  TimeWindow window;
};

// ---------------------------------------------------------------------------
// Generator.
// ---------------------------------------------------------------------------

namespace synth_detail {

struct PairList {
  std::vector<std::pair<PlayerId, PlayerId>> pairs;
  std::unordered_set<std::uint64_t> used;  // unordered keys

  static std::uint64_t unordered_key(PlayerId a, PlayerId b) {
    return pair_key(std::min(a, b), std::max(a, b));
  }
  bool add(PlayerId a, PlayerId b) {
    if (a == b) return false;
    if (!used.insert(unordered_key(a, b)).second) return false;
    pairs.emplace_back(a, b);
    return true;
  }
};

inline void sample_pairs(PairList& list, std::size_t count, int n_players,
                         Rng& rng) {
  std::size_t attempts = 0;
  const std::size_t max_attempts = 100 * count + 1000;
  while (list.pairs.size() < count) {
    if (++attempts > max_attempts) {
      throw std::runtime_error("synth: pair space too dense to sample");
    }
    const auto a = static_cast<PlayerId>(rng.below(n_players));
    auto b = static_cast<PlayerId>(rng.below(n_players - 1));
    if (b >= a) ++b;
    list.add(a, b);
  }
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double logit(double p) {
  const double eps = 1e-12;
  const double q = std::min(std::max(p, eps), 1.0 - eps);
  return std::log(q / (1.0 - q));
}

}  // namespace synth_detail

inline SynthOutput generate(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);

  SynthOutput out;
  out.window = {0, static_cast<Timestamp>(config.window_days) * kSecondsPerDay};
  const Timestamp t_end = out.window.end;

  // Players and demographics.
  char name_buf[16];
  for (int i = 0; i < config.n_players; ++i) {
    std::snprintf(name_buf, sizeof(name_buf), "p%06d", i);
    out.players.intern(name_buf);
  }
  for (int i = 0; i < config.n_players; ++i) {
    PlayerDemographics d;
    d.player = static_cast<PlayerId>(i);
    const double u = rng.next_unit();
    d.gender = u < config.demographics.p_male ? Gender::Male
               : u < config.demographics.p_male + config.demographics.p_female
                   ? Gender::Female
                   : Gender::Unknown;
    d.experience =
        rng.uniform_int(0, std::max(0, config.demographics.max_experience));
    out.demographics.push_back(d);
  }

  // Active pairs per layer. Trust pairs may be laid over trade pairs (the
  // trust initiator is the trade replier, so the responder's trade stream is
  // dense) and may pull a chat pair along for background responses.
  const auto pair_count = [&](const LayerGenConfig& l) {
    return static_cast<std::size_t>(
        std::llround(l.pairs_per_player * config.n_players));
  };
  synth_detail::PairList chat_pairs, trade_pairs, trust_pairs;
  synth_detail::sample_pairs(chat_pairs, pair_count(config.chat),
                             config.n_players, rng);
  synth_detail::sample_pairs(trade_pairs, pair_count(config.trade),
                             config.n_players, rng);
  {
    const std::size_t want = pair_count(config.trust);
    std::size_t attempts = 0;
    while (trust_pairs.pairs.size() < want) {
      if (++attempts > 100 * want + 1000) {
        throw std::runtime_error("synth: trust pair sampling stalled");
      }
      PlayerId a, b;
      bool coupled = false;
      if (!trade_pairs.pairs.empty() &&
          rng.bernoulli(config.coupling.trust_overlap_trade)) {
        const auto& tp =
            trade_pairs.pairs[rng.below(trade_pairs.pairs.size())];
        a = tp.second;  // trade replier grants trust
        b = tp.first;
        coupled = true;
      } else {
        a = static_cast<PlayerId>(rng.below(config.n_players));
        b = static_cast<PlayerId>(rng.below(config.n_players - 1));
        if (b >= a) ++b;
      }
      if (!trust_pairs.add(a, b)) continue;
      if (rng.bernoulli(config.coupling.trust_overlap_chat)) {
        chat_pairs.add(b, a);  // responder-to-initiator chat background
      }
      (void)coupled;
    }
  }

  // Exchange walk for one pair. close_probability receives the candidate
  // reply time; forwards consumed by a closed exchange are never emitted, and
  // an unanswered exchange ends the pair.
  struct WalkResult {
    std::int64_t closes = 0;
    Timestamp last_close = 0;
    std::optional<Timestamp> open_forward;  // unanswered trailing grant
  };
  std::unordered_map<std::uint64_t, std::vector<Timestamp>> trade_times;
  const auto run_pair =
      [&](Layer layer, PlayerId a, PlayerId b, const LayerGenConfig& cfg,
          const PowerLawSampler& delay_sampler, auto&& close_probability,
          GroundTruthLayer& gt) -> WalkResult {
    const std::int64_t n_arrivals = rng.poisson(
        cfg.forwards_per_pair_day * static_cast<double>(config.window_days));
    std::vector<Timestamp> arrivals(n_arrivals);
    for (auto& t : arrivals) t = rng.uniform_int(0, t_end);
    std::sort(arrivals.begin(), arrivals.end());

    const auto emit = [&](Timestamp ts, PlayerId src, PlayerId dst) {
      Event e;
      e.ts = ts;
      e.src = src;
      e.dst = dst;
      e.layer = layer;
      if (layer == Layer::Trust) e.trust_level = TrustLevel::Trustee;
      out.events.push_back(e);
      if (layer == Layer::Trade) {
        trade_times[pair_key(src, dst)].push_back(ts);
      }
    };

    WalkResult result;
    std::size_t i = 0;
    std::uint32_t exchange = 0;
    while (i < arrivals.size()) {
      const Timestamp t1 = arrivals[i];
      ++i;
      ++exchange;
      emit(t1, a, b);
      ++gt.forwards;

      const int units = delay_sampler.sample(rng);
      const auto delay_seconds = std::max<std::int64_t>(
          1, std::llround(units * cfg.delay.unit_days * kSecondsPerDay));
      const Timestamp t2 = t1 + delay_seconds;
      if (!rng.bernoulli(close_probability(t2)) || t2 > t_end) {
        ++gt.open_partitions;
        result.open_forward = t1;
        break;
      }
      emit(t2, b, a);
      const int bucket = exchange >= 4 ? 3 : static_cast<int>(exchange) - 1;
      ++gt.closed[bucket];
      gt.response_seconds[bucket] += delay_seconds;
      ++result.closes;
      result.last_close = t2;
      while (i < arrivals.size() && arrivals[i] <= t2) ++i;  // consumed
    }
    return result;
  };

  // Trade first: trust coupling reads the responder's trade stream.
  {
    const PowerLawSampler sampler(config.trade.delay.alpha,
                                  config.trade.delay.cutoff_units);
    const double p = config.trade.reciprocation_probability;
    for (const auto& [a, b] : trade_pairs.pairs) {
      run_pair(Layer::Trade, a, b, config.trade, sampler,
               [p](Timestamp) { return p; },
               out.truth.layer(Layer::Trade));
    }
  }
  {
    const PowerLawSampler sampler(config.chat.delay.alpha,
                                  config.chat.delay.cutoff_units);
    const double p = config.chat.reciprocation_probability;
    for (const auto& [a, b] : chat_pairs.pairs) {
      run_pair(Layer::Chat, a, b, config.chat, sampler,
               [p](Timestamp) { return p; },
               out.truth.layer(Layer::Chat));
    }
  }
  {
    const PowerLawSampler sampler(config.trust.delay.alpha,
                                  config.trust.delay.cutoff_units);
    const PowerLawSampler revoke_delay(2.0, 50);
    const double beta0 = config.coupling.beta0.value_or(
        synth_detail::logit(config.trust.reciprocation_probability));
    const double beta_trade = config.coupling.beta_trade;

    for (const auto& [a, b] : trust_pairs.pairs) {
      const auto responder_trades_it = trade_times.find(pair_key(b, a));
      const auto close_probability = [&](Timestamp t2) {
        std::int64_t pre_reply = 0;
        if (responder_trades_it != trade_times.end()) {
          const auto& times = responder_trades_it->second;
          pre_reply = std::lower_bound(times.begin(), times.end(), t2) -
                      times.begin();
        }
        return synth_detail::sigmoid(
            beta0 + beta_trade * static_cast<double>(pre_reply));
      };
      const WalkResult walk =
          run_pair(Layer::Trust, a, b, config.trust, sampler,
                   close_probability, out.truth.layer(Layer::Trust));

      // Optional cancellation activity; revocations never touch the
      // grant-based ground truth.
      const auto emit_revoke = [&](Timestamp ts, PlayerId src, PlayerId dst) {
        Event e;
        e.ts = ts;
        e.src = src;
        e.dst = dst;
        e.layer = Layer::Trust;
        e.trust_level = TrustLevel::Remove;
        out.events.push_back(e);
      };
      if (walk.closes > 0) {
        if (rng.bernoulli(config.revoke.after_mutual)) {
          const bool initiator_side = rng.bernoulli(0.5);
          const Timestamp t_rev =
              walk.last_close + revoke_delay.sample(rng) * kSecondsPerDay;
          if (t_rev <= t_end) {
            const PlayerId r_src = initiator_side ? a : b;
            const PlayerId r_dst = initiator_side ? b : a;
            emit_revoke(t_rev, r_src, r_dst);
            if (rng.bernoulli(config.revoke.reply)) {
              const Timestamp t_back =
                  t_rev + revoke_delay.sample(rng) * kSecondsPerDay;
              if (t_back <= t_end) emit_revoke(t_back, r_dst, r_src);
            }
          }
        }
      } else if (walk.open_forward &&
                 rng.bernoulli(config.revoke.unanswered)) {
        // Unanswered grant downgraded by its initiator.
        const Timestamp t_rev =
            *walk.open_forward + revoke_delay.sample(rng) * kSecondsPerDay;
        if (t_rev <= t_end) emit_revoke(t_rev, a, b);
      }
    }
  }

  std::sort(out.events.begin(), out.events.end(), event_less);
  return out;
}

}  // namespace recipnet
