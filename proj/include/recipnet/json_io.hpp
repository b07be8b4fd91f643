#pragma once

#include <string>

#include <json.hpp>

#include "recipnet/hetero.hpp"
#include "recipnet/ingest.hpp"
#include "recipnet/netstats.hpp"
#include "recipnet/predict.hpp"
#include "recipnet/reciprocity.hpp"
#include "recipnet/synth.hpp"

// JSON views of configs, reports, and tables. ordered_json keeps insertion
// order so emitted artifacts are byte-stable.

namespace recipnet {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Synth config round trip. Parsing starts from defaults and overrides the
// keys that are present, so partial configs stay valid.
// ---------------------------------------------------------------------------

inline ojson delay_to_json(const DelayConfig& d) {
  return ojson{{"alpha", d.alpha},
               {"cutoff_units", d.cutoff_units},
               {"unit_days", d.unit_days}};
}

inline void delay_from_json(const ojson& j, DelayConfig& d) {
  d.alpha = j.value("alpha", d.alpha);
  d.cutoff_units = j.value("cutoff_units", d.cutoff_units);
  d.unit_days = j.value("unit_days", d.unit_days);
}

inline ojson layer_gen_to_json(const LayerGenConfig& l) {
  return ojson{{"pairs_per_player", l.pairs_per_player},
               {"forwards_per_pair_day", l.forwards_per_pair_day},
               {"reciprocation_probability", l.reciprocation_probability},
               {"delay", delay_to_json(l.delay)}};
}

inline void layer_gen_from_json(const ojson& j, LayerGenConfig& l) {
  l.pairs_per_player = j.value("pairs_per_player", l.pairs_per_player);
  l.forwards_per_pair_day =
      j.value("forwards_per_pair_day", l.forwards_per_pair_day);
  l.reciprocation_probability =
      j.value("reciprocation_probability", l.reciprocation_probability);
  if (j.contains("delay")) delay_from_json(j.at("delay"), l.delay);
}

inline ojson synth_config_to_json(const SynthConfig& c) {
  ojson j;
  j["n_players"] = c.n_players;
  j["window_days"] = c.window_days;
  j["seed"] = c.seed;
  j["layers"] = ojson{{"chat", layer_gen_to_json(c.chat)},
                      {"trade", layer_gen_to_json(c.trade)},
                      {"trust", layer_gen_to_json(c.trust)}};
  j["coupling"] = ojson{
      {"beta0", c.coupling.beta0 ? ojson(*c.coupling.beta0) : ojson(nullptr)},
      {"beta_trade", c.coupling.beta_trade},
      {"trust_overlap_trade", c.coupling.trust_overlap_trade},
      {"trust_overlap_chat", c.coupling.trust_overlap_chat}};
  j["revoke"] = ojson{{"after_mutual", c.revoke.after_mutual},
                      {"reply", c.revoke.reply},
                      {"unanswered", c.revoke.unanswered}};
  j["demographics"] = ojson{{"p_male", c.demographics.p_male},
                            {"p_female", c.demographics.p_female},
                            {"max_experience", c.demographics.max_experience}};
  return j;
}

inline SynthConfig synth_config_from_json(const ojson& j) {
  SynthConfig c = SynthConfig::defaults();
  c.n_players = j.value("n_players", c.n_players);
  c.window_days = j.value("window_days", c.window_days);
  c.seed = j.value("seed", c.seed);
  if (j.contains("layers")) {
    const ojson& layers = j.at("layers");
    if (layers.contains("chat")) layer_gen_from_json(layers.at("chat"), c.chat);
    if (layers.contains("trade")) {
      layer_gen_from_json(layers.at("trade"), c.trade);
    }
    if (layers.contains("trust")) {
      layer_gen_from_json(layers.at("trust"), c.trust);
    }
  }
  if (j.contains("coupling")) {
    const ojson& cp = j.at("coupling");
    if (cp.contains("beta0") && !cp.at("beta0").is_null()) {
      c.coupling.beta0 = cp.at("beta0").get<double>();
    }
    c.coupling.beta_trade = cp.value("beta_trade", c.coupling.beta_trade);
    c.coupling.trust_overlap_trade =
        cp.value("trust_overlap_trade", c.coupling.trust_overlap_trade);
    c.coupling.trust_overlap_chat =
        cp.value("trust_overlap_chat", c.coupling.trust_overlap_chat);
  }
  if (j.contains("revoke")) {
    const ojson& rv = j.at("revoke");
    c.revoke.after_mutual = rv.value("after_mutual", c.revoke.after_mutual);
    c.revoke.reply = rv.value("reply", c.revoke.reply);
    c.revoke.unanswered = rv.value("unanswered", c.revoke.unanswered);
  }
  if (j.contains("demographics")) {
    const ojson& dm = j.at("demographics");
    c.demographics.p_male = dm.value("p_male", c.demographics.p_male);
    c.demographics.p_female = dm.value("p_female", c.demographics.p_female);
    c.demographics.max_experience =
        dm.value("max_experience", c.demographics.max_experience);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Reports and tables.
// ---------------------------------------------------------------------------

inline ojson ingest_report_to_json(const IngestReport& r) {
  ojson reasons;
  for (std::size_t i = 0; i < r.reject_counts.size(); ++i) {
    if (r.reject_counts[i] > 0) {
      reasons[reject_reason_name(static_cast<RejectReason>(i))] =
          r.reject_counts[i];
    }
  }
  ojson samples = ojson::array();
  for (const auto& s : r.samples) {
    samples.push_back(
        ojson{{"line", s.line}, {"reason", reject_reason_name(s.reason)}});
  }
  ojson j;
  j["records_read"] = r.records_read;
  j["records_accepted"] = r.records_accepted;
  j["records_rejected"] = r.records_rejected;
  j["reject_reasons"] = reasons;
  j["layer_counts"] =
      ojson{{"chat", r.layer_counts[0]},
            {"trade", r.layer_counts[1]},
            {"trust", r.layer_counts[2]}};
  j["min_ts"] = r.min_ts ? ojson(*r.min_ts) : ojson(nullptr);
  j["max_ts"] = r.max_ts ? ojson(*r.max_ts) : ojson(nullptr);
  j["reject_samples"] = samples;
  return j;
}

inline ojson collapse_report_to_json(const TrustCollapseReport& r) {
  ojson levels;
  for (int code = 0; code <= 4; ++code) {
    levels[trust_level_name(static_cast<TrustLevel>(code))] =
        r.level_counts[static_cast<std::size_t>(code)];
  }
  return ojson{{"level_counts", levels},
               {"trust_edges", r.trust_edges},
               {"not_trust_edges", r.not_trust_edges}};
}

inline ojson recip_stats_to_json(const ReciprocationStats& s) {
  ojson j;
  j["layer"] = layer_name(s.layer);
  j["total_forward_edges"] = s.total_forward_edges;
  for (int b = 0; b < kRecipBuckets; ++b) {
    ojson bucket;
    bucket["count"] = s.reciprocation_counts[b];
    bucket["rate"] = s.rate(b);
    const auto mean = s.mean_response_days(b);
    bucket["mean_response_days"] = mean ? ojson(*mean) : ojson(nullptr);
    j[bucket_name(b)] = bucket;
  }
  j["total"] = ojson{{"count", s.total_reciprocations()},
                     {"rate", s.total_rate()}};
  const auto overall = s.mean_response_days_overall();
  j["mean_response_days_overall"] =
      overall ? ojson(*overall) : ojson(nullptr);
  return j;
}

inline ojson cancellation_to_json(const CancellationStats& s) {
  ojson j;
  j["mutual_trust_pairs"] = s.mutual_trust_pairs;
  j["cancellation_initiations"] = s.cancellation_initiations;
  j["cancellation_reciprocations"] = s.cancellation_reciprocations;
  const auto mean = s.mean_cancellation_response_days();
  j["mean_cancellation_response_days"] = mean ? ojson(*mean) : ojson(nullptr);
  j["one_way_grant_pairs"] = s.one_way_grant_pairs;
  j["waited_indefinitely"] = s.waited_indefinitely;
  j["downgraded_without_reply"] = s.downgraded_without_reply;
  j["waited_fraction"] = s.waited_fraction();
  j["downgraded_fraction"] = s.downgraded_fraction();
  j["residual_fraction"] = s.residual_fraction();
  return j;
}

inline ojson power_law_fit_to_json(const PowerLawFit& f) {
  return ojson{{"exponent", f.exponent},
               {"intercept", f.intercept},
               {"r_squared", f.r_squared},
               {"points_used", f.points_used}};
}

inline ojson first_response_to_json(const FirstResponseTable& t) {
  ojson rows = ojson::array();
  for (int r = 0; r < kLayerCount; ++r) {
    const auto& row = t.rows[r];
    rows.push_back(ojson{{"forward_layer", layer_name(static_cast<Layer>(r))},
                         {"first_forward_edges", row.first_forward_edges},
                         {"chat_responses", row.responses[0]},
                         {"trade_responses", row.responses[1]},
                         {"trust_responses", row.responses[2]}});
  }
  return ojson{{"rows", rows}};
}

inline ojson trust_completion_to_json(const TrustCompletionTable& t) {
  const auto row = [](const char* name, const TrustCompletionRow& r) {
    return ojson{{"trust_type", name},
                 {"forward_edges", r.forward_edges},
                 {"chat_responses", r.chat_responses},
                 {"chat_share", r.chat_share()},
                 {"trade_responses", r.trade_responses},
                 {"trade_share", r.trade_share()}};
  };
  return ojson{
      {"rows", ojson::array(
                   {row("complete", t.complete), row("incomplete", t.incomplete)})}};
}

inline ojson model_report_to_json(const ModelReport& r,
                                  const std::vector<std::string>& names) {
  ojson folds = ojson::array();
  for (const FoldReport& f : r.folds) {
    ojson weights;
    for (std::size_t j = 0; j < names.size(); ++j) {
      weights[names[j]] = f.model.weights[j];
    }
    folds.push_back(ojson{{"cwa", f.cwa},
                          {"auc", f.auc},
                          {"avg_precision", f.precision},
                          {"avg_recall", f.recall},
                          {"f_measure", f.f1},
                          {"bias", f.model.bias},
                          {"weights", weights}});
  }
  return ojson{{"folds", folds},
               {"mean", ojson{{"cwa", r.mean_cwa},
                              {"auc", r.mean_auc},
                              {"avg_precision", r.mean_precision},
                              {"avg_recall", r.mean_recall},
                              {"f_measure", r.mean_f1}}}};
}

inline ojson ground_truth_to_json(const GroundTruth& gt,
                                  const SynthConfig& config) {
  const auto layer = [](const GroundTruthLayer& l) {
    const auto bucket = [&](const std::array<std::int64_t, 4>& a) {
      return ojson{{"first", a[0]},
                   {"second", a[1]},
                   {"third", a[2]},
                   {"other", a[3]}};
    };
    return ojson{{"forwards", l.forwards},
                 {"closed", bucket(l.closed)},
                 {"response_seconds", bucket(l.response_seconds)},
                 {"total_closed", l.total_closed()},
                 {"open_partitions", l.open_partitions}};
  };
  ojson j;
  j["layers"] = ojson{{"chat", layer(gt.layer(Layer::Chat))},
                      {"trade", layer(gt.layer(Layer::Trade))},
                      {"trust", layer(gt.layer(Layer::Trust))}};
  j["configured_mean_delay_days"] =
      ojson{{"chat", config.chat.delay.mean_days()},
            {"trade", config.trade.delay.mean_days()},
            {"trust", config.trust.delay.mean_days()}};
  j["config"] = synth_config_to_json(config);
  return j;
}

}  // namespace recipnet
