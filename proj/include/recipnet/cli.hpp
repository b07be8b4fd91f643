#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recipnet/io_util.hpp"
#include "recipnet/json_io.hpp"

// Command-line front end: every analysis as one subcommand emitting
// plot-ready CSV/JSON plus a run manifest. All randomness flows through
// --seed; results are identical for any --threads value.

namespace recipnet::cli {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Files and manifests.
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Collects inputs/outputs during a run and writes the manifest on success.
class ManifestBuilder {
 public:
  ManifestBuilder(std::string subcommand, std::vector<std::string> args)
      : subcommand_(std::move(subcommand)),
        args_(std::move(args)),
        start_(std::chrono::steady_clock::now()) {}

  void add_input(const std::string& path, const std::string& bytes) {
    inputs_.push_back(ojson{{"path", path},
                            {"sha256", Sha256::of(bytes)},
                            {"bytes", bytes.size()}});
  }
  void add_output(const std::string& path) { outputs_.push_back(path); }

  void write(const std::string& manifest_path) const {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start_);
    ojson j;
    j["tool"] = "recipnet";
    j["version"] = kVersion;
    j["subcommand"] = subcommand_;
    j["args"] = args_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["wall_clock_ms"] = elapsed.count();
    write_file(manifest_path, j.dump(2) + "\n");
  }

 private:
  std::string subcommand_;
  std::vector<std::string> args_;
  ojson inputs_ = ojson::array();
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Shared loading pipeline.
// ---------------------------------------------------------------------------

inline TimeWindow parse_window_flag(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw std::runtime_error("bad --window, expected START:END");
  }
  std::int64_t start = 0;
  std::int64_t end = 0;
  if (!detail::parse_int64(s.substr(0, colon), start) ||
      !detail::parse_int64(s.substr(colon + 1), end) || start > end ||
      start < 0) {
    throw std::runtime_error("bad --window, expected START:END epoch seconds");
  }
  return TimeWindow{start, end};
}

struct GraphBundle {
  TemporalMultigraph graph;
  PlayerTable players;
  IngestReport report;
  TrustCollapseReport collapse;
};

// Parse, optionally sessionize chat, collapse trust, and build the graph over
// the requested (or data-spanning) window.
inline GraphBundle load_graph(const std::string& edges_path,
                              const std::optional<std::string>& window_flag,
                              bool sessionize, ManifestBuilder& manifest) {
  const std::string bytes = read_file(edges_path);
  manifest.add_input(edges_path, bytes);
  std::istringstream in(bytes);
  ParsedEdgeLog parsed = parse_edge_log(in);
  log_info("parsed " + std::to_string(parsed.report.records_accepted) +
           " events from " + edges_path);

  GraphBundle bundle;
  bundle.players = std::move(parsed.players);
  bundle.report = parsed.report;

  std::vector<Event> events = std::move(parsed.events);
  if (sessionize) events = sessionize_chat(events);
  auto [collapsed, collapse_report] = collapse_trust(std::move(events));
  bundle.collapse = collapse_report;

  TimeWindow window{0, 0};
  if (window_flag) {
    window = parse_window_flag(*window_flag);
    std::erase_if(collapsed,
                  [&](const Event& e) { return !window.contains(e.ts); });
  } else if (!collapsed.empty()) {
    window = {bundle.report.min_ts.value_or(0), bundle.report.max_ts.value_or(0)};
  }
  bundle.graph = build_graph(std::move(collapsed), window);
  return bundle;
}

inline DemographicsTable load_demographics(const std::string& path,
                                           PlayerTable& players,
                                           ManifestBuilder& manifest) {
  const std::string bytes = read_file(path);
  manifest.add_input(path, bytes);
  std::istringstream in(bytes);
  return parse_demographics(in, players);
}

// ---------------------------------------------------------------------------
// CSV builders.
// ---------------------------------------------------------------------------

inline std::string stat_csv(
    const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out = "stat,value\n";
  for (const auto& [k, v] : rows) out += k + "," + v + "\n";
  return out;
}

inline std::string recip_stats_csv(const ReciprocationStats& s) {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("layer", layer_name(s.layer));
  rows.emplace_back("total_forward_edges",
                    format_int(s.total_forward_edges));
  for (int b = 0; b < kRecipBuckets; ++b) {
    const std::string name = bucket_name(b);
    rows.emplace_back(name + "_reciprocation_count",
                      format_int(s.reciprocation_counts[b]));
    rows.emplace_back(name + "_reciprocation_rate", format_double(s.rate(b)));
    const auto mean = s.mean_response_days(b);
    rows.emplace_back(name + "_mean_response_days",
                      mean ? format_double(*mean) : "");
  }
  rows.emplace_back("total_reciprocation_count",
                    format_int(s.total_reciprocations()));
  rows.emplace_back("total_reciprocation_rate",
                    format_double(s.total_rate()));
  const auto overall = s.mean_response_days_overall();
  rows.emplace_back("mean_response_days_overall",
                    overall ? format_double(*overall) : "");
  return stat_csv(rows);
}

inline std::string cancellation_csv(const CancellationStats& s) {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("mutual_trust_pairs", format_int(s.mutual_trust_pairs));
  rows.emplace_back("cancellation_initiations",
                    format_int(s.cancellation_initiations));
  rows.emplace_back("cancellation_reciprocations",
                    format_int(s.cancellation_reciprocations));
  const auto mean = s.mean_cancellation_response_days();
  rows.emplace_back("mean_cancellation_response_days",
                    mean ? format_double(*mean) : "");
  rows.emplace_back("one_way_grant_pairs", format_int(s.one_way_grant_pairs));
  rows.emplace_back("waited_indefinitely", format_int(s.waited_indefinitely));
  rows.emplace_back("downgraded_without_reply",
                    format_int(s.downgraded_without_reply));
  rows.emplace_back("waited_fraction", format_double(s.waited_fraction()));
  rows.emplace_back("downgraded_fraction",
                    format_double(s.downgraded_fraction()));
  rows.emplace_back("residual_fraction",
                    format_double(s.residual_fraction()));
  return stat_csv(rows);
}

inline std::string first_response_csv(const FirstResponseTable& t) {
  std::string out =
      "forward_layer,first_forward_edges,chat_responses,trade_responses,"
      "trust_responses\n";
  for (int r = 0; r < kLayerCount; ++r) {
    const auto& row = t.rows[r];
    out += std::string(layer_name(static_cast<Layer>(r))) + "," +
           format_int(row.first_forward_edges) + "," +
           format_int(row.responses[0]) + "," + format_int(row.responses[1]) +
           "," + format_int(row.responses[2]) + "\n";
  }
  return out;
}

inline std::string trust_completion_csv(const TrustCompletionTable& t) {
  std::string out =
      "trust_type,forward_edges,chat_responses,chat_share,trade_responses,"
      "trade_share\n";
  const auto row = [&](const char* name, const TrustCompletionRow& r) {
    out += std::string(name) + "," + format_int(r.forward_edges) + "," +
           format_int(r.chat_responses) + "," + format_double(r.chat_share()) +
           "," + format_int(r.trade_responses) + "," +
           format_double(r.trade_share()) + "\n";
  };
  row("complete", t.complete);
  row("incomplete", t.incomplete);
  return out;
}

inline std::string model_report_csv(const ModelReport& r) {
  std::string out = "fold,cwa,auc,avg_precision,avg_recall,f_measure\n";
  for (std::size_t i = 0; i < r.folds.size(); ++i) {
    const FoldReport& f = r.folds[i];
    out += std::to_string(i) + "," + format_double(f.cwa) + "," +
           format_double(f.auc) + "," + format_double(f.precision) + "," +
           format_double(f.recall) + "," + format_double(f.f1) + "\n";
  }
  out += "mean," + format_double(r.mean_cwa) + "," +
         format_double(r.mean_auc) + "," + format_double(r.mean_precision) +
         "," + format_double(r.mean_recall) + "," + format_double(r.mean_f1) +
         "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Flag parsing helpers.
// ---------------------------------------------------------------------------

inline FeatureConfig parse_feature_list(const std::string& spec, int k_days) {
  FeatureConfig config;
  config.include_trust = false;
  config.k_days = k_days;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string item =
        spec.substr(start, comma == std::string::npos ? comma : comma - start);
    if (item == "trust") config.include_trust = true;
    else if (item == "trade") config.include_trade = true;
    else if (item == "homophily") config.include_homophily = true;
    else if (!item.empty()) {
      throw std::runtime_error("unknown feature group: " + item);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  config.validate();
  return config;
}

// K sweep forms: "7", "0,5,20", "0..25", "0..25:5".
inline std::vector<int> parse_k_range(const std::string& spec) {
  std::vector<int> ks;
  const auto parse_one = [](const std::string& s) {
    std::int64_t v = 0;
    if (!detail::parse_int64(s, v) || v < 0) {
      throw std::runtime_error("bad K value: " + s);
    }
    return static_cast<int>(v);
  };
  const auto dots = spec.find("..");
  if (dots != std::string::npos) {
    int step = 1;
    std::string rest = spec.substr(dots + 2);
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      step = parse_one(rest.substr(colon + 1));
      if (step < 1) throw std::runtime_error("bad K step");
      rest = rest.substr(0, colon);
    }
    const int lo = parse_one(spec.substr(0, dots));
    const int hi = parse_one(rest);
    if (hi < lo) throw std::runtime_error("bad K range");
    for (int k = lo; k <= hi; k += step) ks.push_back(k);
    return ks;
  }
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = spec.find(',', start);
    ks.push_back(parse_one(
        spec.substr(start, comma == std::string::npos ? comma : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ks;
}

// ---------------------------------------------------------------------------
// Dispatch.
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv) {
  CLI::App app{"reciprocation analytics over temporal multilayer networks"};
  app.require_subcommand(1);

  // Shared option storage; each subcommand binds the subset it uses.
  struct {
    std::string edges, demo, out, out_dir, config;
    std::optional<std::string> window;
    std::string layer = "chat";
    std::string mode = "total";
    std::string multiplicity = "multi";
    std::string format;
    std::string features = "trust";
    std::string k_range = "0";
    std::string fit_out;
    double bin_days = 1.0;
    double horizon_days = 0.0;
    double exclusion_days = 30.0;
    int k_days = 0;
    int folds = 5;
    std::uint64_t seed = 1;
    int threads = 1;
    bool sessionize = false;
    double l2 = 1e-3;
    double learning_rate = 1.0;
    int epochs = 500;
    std::string preset = "default";
  } opt;

  std::vector<std::string> raw_args(argv + 1, argv + argc);

  const auto add_edges = [&](CLI::App* sub) {
    sub->add_option("--edges", opt.edges, "edge log CSV")->required();
    sub->add_option("--window", opt.window,
                    "analysis window START:END in epoch seconds");
    sub->add_flag("--sessionize-chat", opt.sessionize,
                  "collapse chat to one event per pair and UTC day");
  };
  const auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", opt.threads, "worker threads")
        ->check(CLI::Range(1, 256));
  };
  // opt.format stays empty unless --format is passed; each handler falls back
  // to its own default.
  const auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  const auto format_or = [&](const char* def) {
    return opt.format.empty() ? std::string(def) : opt.format;
  };

  const auto manifest_for = [&](const std::string& name) {
    return ManifestBuilder(name, raw_args);
  };

  // --- ingest-check ---------------------------------------------------------
  auto* sc_ingest = app.add_subcommand(
      "ingest-check", "parse inputs and report accounting");
  sc_ingest->add_option("--edges", opt.edges, "edge log CSV")->required();
  sc_ingest->add_option("--demo", opt.demo, "demographics CSV");
  sc_ingest->add_option("--out", opt.out, "report JSON path")->required();
  sc_ingest->callback([&] {
    ManifestBuilder mf = manifest_for("ingest-check");
    const std::string bytes = read_file(opt.edges);
    mf.add_input(opt.edges, bytes);
    std::istringstream in(bytes);
    ParsedEdgeLog parsed = parse_edge_log(in);
    ojson j;
    j["edges"] = ingest_report_to_json(parsed.report);
    j["players"] = parsed.players.size();
    if (!opt.demo.empty()) {
      const std::string demo_bytes = read_file(opt.demo);
      mf.add_input(opt.demo, demo_bytes);
      std::istringstream demo_in(demo_bytes);
      const DemographicsTable demo = parse_demographics(demo_in, parsed.players);
      j["demographics"] = ojson{{"records_read", demo.records_read},
                                {"records_accepted", demo.records_accepted},
                                {"records_rejected", demo.records_rejected}};
    }
    write_file(opt.out, j.dump(2) + "\n");
    mf.add_output(opt.out);
    mf.write(opt.out + ".manifest.json");
  });

  // --- degree-dist ----------------------------------------------------------
  auto* sc_degree = app.add_subcommand(
      "degree-dist", "degree distribution of one layer");
  add_edges(sc_degree);
  sc_degree->add_option("--layer", opt.layer, "chat|trade|trust")->required();
  sc_degree->add_option("--mode", opt.mode, "in|out|total")
      ->check(CLI::IsMember({"in", "out", "total"}));
  sc_degree->add_option("--multiplicity", opt.multiplicity, "multi|simple")
      ->check(CLI::IsMember({"multi", "simple"}));
  sc_degree->add_option("--out", opt.out, "distribution CSV path")->required();
  sc_degree->add_option("--fit-out", opt.fit_out, "power-law fit JSON path");
  sc_degree->callback([&] {
    ManifestBuilder mf = manifest_for("degree-dist");
    const auto layer = layer_from_name(opt.layer);
    if (!layer) throw std::runtime_error("unknown layer: " + opt.layer);
    const GraphBundle bundle =
        load_graph(opt.edges, opt.window, opt.sessionize, mf);
    const DegreeMode mode = opt.mode == "in"    ? DegreeMode::In
                            : opt.mode == "out" ? DegreeMode::Out
                                                : DegreeMode::Total;
    const Multiplicity mult = opt.multiplicity == "simple"
                                  ? Multiplicity::Simple
                                  : Multiplicity::Multi;
    const DegreeDistribution dist =
        degree_distribution(bundle.graph, *layer, mode, mult);
    std::string csv = "x,count\n";
    for (const auto& [degree, count] : dist.counts) {
      csv += format_int(degree) + "," + format_int(count) + "\n";
    }
    write_file(opt.out, csv);
    mf.add_output(opt.out);
    if (!opt.fit_out.empty()) {
      const PowerLawFit fit = fit_power_law(dist.counts);
      write_file(opt.fit_out, power_law_fit_to_json(fit).dump(2) + "\n");
      mf.add_output(opt.fit_out);
    }
    mf.write(opt.out + ".manifest.json");
  });

  // --- recip-stats ----------------------------------------------------------
  auto* sc_recip = app.add_subcommand(
      "recip-stats", "multiple-reciprocation statistics for one layer");
  add_edges(sc_recip);
  add_threads(sc_recip);
  sc_recip->add_option("--layer", opt.layer, "chat|trade|trust")->required();
  sc_recip->add_option("--out", opt.out, "stats output path")->required();
  add_format(sc_recip);
  sc_recip->callback([&] {
    ManifestBuilder mf = manifest_for("recip-stats");
    const auto layer = layer_from_name(opt.layer);
    if (!layer) throw std::runtime_error("unknown layer: " + opt.layer);
    const GraphBundle bundle =
        load_graph(opt.edges, opt.window, opt.sessionize, mf);
    const ReciprocationStats stats =
        reciprocation_stats(bundle.graph, *layer, opt.threads);
    write_file(opt.out, format_or("json") == "csv"
                            ? recip_stats_csv(stats)
                            : recip_stats_to_json(stats).dump(2) + "\n");
    mf.add_output(opt.out);
    mf.write(opt.out + ".manifest.json");
  });

  // --- response-times -------------------------------------------------------
  auto* sc_resp = app.add_subcommand(
      "response-times", "response-time histogram for one layer");
  add_edges(sc_resp);
  add_threads(sc_resp);
  sc_resp->add_option("--layer", opt.layer, "chat|trade|trust")->required();
  sc_resp->add_option("--bin-days", opt.bin_days, "histogram bin width (days)")
      ->required();
  sc_resp->add_option("--out", opt.out, "histogram output path")->required();
  sc_resp->add_option("--fit-out", opt.fit_out,
                      "power-law fit over positive bins, JSON");
  add_format(sc_resp);
  sc_resp->callback([&] {
    ManifestBuilder mf = manifest_for("response-times");
    const auto layer = layer_from_name(opt.layer);
    if (!layer) throw std::runtime_error("unknown layer: " + opt.layer);
    const GraphBundle bundle =
        load_graph(opt.edges, opt.window, opt.sessionize, mf);
    const auto partitions =
        layer_partitions(bundle.graph, *layer, opt.threads);
    const auto hist = response_time_histogram(partitions, opt.bin_days);

    if (format_or("csv") == "csv") {
      std::string csv = "bin_start_days,count\n";
      for (const auto& [bin, count] : hist) {
        csv += format_double(static_cast<double>(bin) * opt.bin_days) + "," +
               format_int(count) + "\n";
      }
      write_file(opt.out, csv);
    } else {
      ojson bins = ojson::array();
      for (const auto& [bin, count] : hist) {
        bins.push_back(
            ojson{{"start_days", static_cast<double>(bin) * opt.bin_days},
                  {"count", count}});
      }
      write_file(opt.out,
                 ojson{{"bin_days", opt.bin_days}, {"bins", bins}}.dump(2) +
                     "\n");
    }
    mf.add_output(opt.out);
    if (!opt.fit_out.empty()) {
      std::vector<std::pair<double, double>> points;
      for (const auto& [bin, count] : hist) {
        points.emplace_back(static_cast<double>(bin) * opt.bin_days,
                            static_cast<double>(count));
      }
      const PowerLawFit fit = fit_power_law(points);
      write_file(opt.fit_out, power_law_fit_to_json(fit).dump(2) + "\n");
      mf.add_output(opt.fit_out);
    }
    mf.write(opt.out + ".manifest.json");
  });

  // --- cancellation ---------------------------------------------------------
  auto* sc_cancel = app.add_subcommand(
      "cancellation", "trust cancellation reciprocation and patience");
  add_edges(sc_cancel);
  add_threads(sc_cancel);
  sc_cancel->add_option("--out", opt.out, "stats output path")->required();
  add_format(sc_cancel);
  sc_cancel->callback([&] {
    ManifestBuilder mf = manifest_for("cancellation");
    const GraphBundle bundle =
        load_graph(opt.edges, opt.window, opt.sessionize, mf);
    const CancellationStats stats =
        cancellation_analysis(bundle.graph, opt.threads);
    write_file(opt.out, format_or("json") == "csv"
                            ? cancellation_csv(stats)
                            : cancellation_to_json(stats).dump(2) + "\n");
    mf.add_output(opt.out);
    mf.write(opt.out + ".manifest.json");
  });

  // --- hetero-first-response ------------------------------------------------
  auto* sc_first = app.add_subcommand(
      "hetero-first-response",
      "first-interaction response typing across layers");
  add_edges(sc_first);
  add_threads(sc_first);
  sc_first->add_option("--out", opt.out, "table output path")->required();
  add_format(sc_first);
  sc_first->callback([&] {
    ManifestBuilder mf = manifest_for("hetero-first-response");
    GraphBundle bundle = load_graph(opt.edges, opt.window, opt.sessionize, mf);
    if (!opt.window) {
      // Default to the layers' common observation window.
      const TimeWindow common = common_layer_window(bundle.graph);
      bundle.graph = restrict(bundle.graph, LayerSet::all(), common);
    }
    const FirstResponseTable table =
        first_response_table(bundle.graph, opt.threads);
    write_file(opt.out, format_or("csv") == "csv"
                            ? first_response_csv(table)
                            : first_response_to_json(table).dump(2) + "\n");
    mf.add_output(opt.out);
    mf.write(opt.out + ".manifest.json");
  });

  // --- trust-completion -----------------------------------------------------
  auto* sc_completion = app.add_subcommand(
      "trust-completion",
      "complete vs incomplete trust with truncated response window");
  add_edges(sc_completion);
  add_threads(sc_completion);
  sc_completion->add_option("--horizon-days", opt.horizon_days,
                            "truncation horizon; default: mean trust response");
  sc_completion->add_option("--out", opt.out, "table output path")->required();
  add_format(sc_completion);
  sc_completion->callback([&] {
    ManifestBuilder mf = manifest_for("trust-completion");
    GraphBundle bundle = load_graph(opt.edges, opt.window, opt.sessionize, mf);
    if (!opt.window) {
      const TimeWindow common = common_layer_window(bundle.graph);
      bundle.graph = restrict(bundle.graph, LayerSet::all(), common);
    }
    const TruncationPolicy policy =
        opt.horizon_days > 0.0 ? TruncationPolicy{opt.horizon_days}
                               : mean_trust_response(bundle.graph);
    const TrustCompletionTable table =
        trust_completion_table(bundle.graph, policy, opt.threads);
    ojson j = trust_completion_to_json(table);
    j["horizon_days"] = policy.horizon_days;
    write_file(opt.out, format_or("csv") == "csv" ? trust_completion_csv(table)
                                                   : j.dump(2) + "\n");
    mf.add_output(opt.out);
    mf.write(opt.out + ".manifest.json");
  });

  // --- extract-features -----------------------------------------------------
  auto* sc_features = app.add_subcommand(
      "extract-features", "trust-request instances with features as CSV");
  add_edges(sc_features);
  add_threads(sc_features);
  sc_features->add_option("--demo", opt.demo, "demographics CSV")->required();
  sc_features->add_option("--features", opt.features,
                          "comma list of trust,trade,homophily");
  sc_features->add_option("--k", opt.k_days, "future window in days")
      ->check(CLI::Range(0, 100000));
  sc_features->add_option("--exclusion-days", opt.exclusion_days,
                          "drop requests this close to the window end");
  sc_features->add_option("--out", opt.out, "features CSV path")->required();
  sc_features->callback([&] {
    ManifestBuilder mf = manifest_for("extract-features");
    GraphBundle bundle = load_graph(opt.edges, opt.window, opt.sessionize, mf);
    const DemographicsTable demo =
        load_demographics(opt.demo, bundle.players, mf);
    const FeatureConfig config = parse_feature_list(opt.features, opt.k_days);
    const auto instances = build_instances(bundle.graph, opt.exclusion_days);
    const Dataset ds = extract_dataset(bundle.graph, demo, config, instances,
                                       opt.threads);

    std::string csv = "initiator,responder,t0,label";
    for (const std::string& name : ds.feature_names) csv += "," + name;
    csv += "\n";
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
      const TrustRequestInstance& inst = ds.instances[i];
      csv += bundle.players.name(inst.initiator) + "," +
             bundle.players.name(inst.responder) + "," +
             format_int(inst.t0) + "," + (inst.reciprocated ? "1" : "0");
      for (double v : ds.rows[i]) csv += "," + format_double(v);
      csv += "\n";
    }
    write_file(opt.out, csv);
    if (ds.skipped_missing_experience > 0) {
      log_info(std::to_string(ds.skipped_missing_experience) +
               " instances skipped for missing demographics");
    }
    mf.add_output(opt.out);
    mf.write(opt.out + ".manifest.json");
  });

  // --- train-eval -----------------------------------------------------------
  auto* sc_train = app.add_subcommand(
      "train-eval", "cross-validated trust reciprocation prediction");
  add_edges(sc_train);
  add_threads(sc_train);
  sc_train->add_option("--demo", opt.demo, "demographics CSV")->required();
  sc_train->add_option("--features", opt.features,
                       "comma list of trust,trade,homophily");
  sc_train->add_option("--k", opt.k_days, "future window in days")
      ->check(CLI::Range(0, 100000));
  sc_train->add_option("--folds", opt.folds, "cross-validation folds")
      ->check(CLI::Range(2, 100));
  sc_train->add_option("--seed", opt.seed, "fold-split seed");
  sc_train->add_option("--exclusion-days", opt.exclusion_days,
                       "drop requests this close to the window end");
  sc_train->add_option("--l2", opt.l2, "L2 penalty");
  sc_train->add_option("--learning-rate", opt.learning_rate, "initial step");
  sc_train->add_option("--epochs", opt.epochs, "max gradient-descent epochs");
  sc_train->add_option("--out", opt.out, "report output path")->required();
  add_format(sc_train);
  sc_train->callback([&] {
    ManifestBuilder mf = manifest_for("train-eval");
    GraphBundle bundle = load_graph(opt.edges, opt.window, opt.sessionize, mf);
    const DemographicsTable demo =
        load_demographics(opt.demo, bundle.players, mf);
    const FeatureConfig config = parse_feature_list(opt.features, opt.k_days);
    const auto instances = build_instances(bundle.graph, opt.exclusion_days);
    const Dataset ds = extract_dataset(bundle.graph, demo, config, instances,
                                       opt.threads);
    LogisticParams params;
    params.l2 = opt.l2;
    params.learning_rate = opt.learning_rate;
    params.epochs = opt.epochs;
    const ModelReport report = evaluate(ds, opt.folds, opt.seed, params);

    if (format_or("json") == "csv") {
      write_file(opt.out, model_report_csv(report));
    } else {
      ojson j = model_report_to_json(report, ds.feature_names);
      j["features"] = config.name();
      j["k_days"] = config.k_days;
      j["folds"] = opt.folds;
      j["seed"] = opt.seed;
      j["instances"] = ds.rows.size();
      j["skipped_missing_experience"] = ds.skipped_missing_experience;
      write_file(opt.out, j.dump(2) + "\n");
    }
    mf.add_output(opt.out);
    mf.write(opt.out + ".manifest.json");
  });

  // --- ablation --------------------------------------------------------------
  auto* sc_ablation = app.add_subcommand(
      "ablation", "feature-set and K sweep, one row per configuration");
  add_edges(sc_ablation);
  add_threads(sc_ablation);
  sc_ablation->add_option("--demo", opt.demo, "demographics CSV")->required();
  sc_ablation->add_option("--k", opt.k_range,
                          "K sweep: N, A..B, A..B:STEP, or comma list");
  sc_ablation->add_option("--folds", opt.folds, "cross-validation folds")
      ->check(CLI::Range(2, 100));
  sc_ablation->add_option("--seed", opt.seed, "fold-split seed");
  sc_ablation->add_option("--exclusion-days", opt.exclusion_days,
                          "drop requests this close to the window end");
  sc_ablation->add_option("--l2", opt.l2, "L2 penalty");
  sc_ablation->add_option("--epochs", opt.epochs,
                          "max gradient-descent epochs");
  sc_ablation->add_option("--out", opt.out, "table CSV path")->required();
  sc_ablation->callback([&] {
    ManifestBuilder mf = manifest_for("ablation");
    GraphBundle bundle = load_graph(opt.edges, opt.window, opt.sessionize, mf);
    const DemographicsTable demo =
        load_demographics(opt.demo, bundle.players, mf);
    const std::vector<int> ks = parse_k_range(opt.k_range);
    const std::vector<FeatureConfig> configs = {
        {true, false, false, 0},
        {true, true, false, 0},
        {true, false, true, 0},
        {true, true, true, 0},
    };
    LogisticParams params;
    params.l2 = opt.l2;
    params.epochs = opt.epochs;
    const auto rows =
        feature_ablation(bundle.graph, demo, configs, ks, opt.folds, opt.seed,
                         params, opt.threads, opt.exclusion_days);

    std::string csv = "features,k,cwa,auc,avg_precision,avg_recall,f_measure\n";
    for (const AblationRow& row : rows) {
      csv += row.features + "," + std::to_string(row.k_days) + "," +
             format_double(row.report.mean_cwa) + "," +
             format_double(row.report.mean_auc) + "," +
             format_double(row.report.mean_precision) + "," +
             format_double(row.report.mean_recall) + "," +
             format_double(row.report.mean_f1) + "\n";
    }
    write_file(opt.out, csv);
    mf.add_output(opt.out);
    mf.write(opt.out + ".manifest.json");
  });

  // --- synth ------------------------------------------------------------------
  auto* sc_synth = app.add_subcommand(
      "synth", "generate a calibrated synthetic dataset");
  sc_synth->add_option("--config", opt.config, "generator config JSON");
  sc_synth->add_option("--preset", opt.preset, "default|coupled")
      ->check(CLI::IsMember({"default", "coupled"}));
  sc_synth->add_option("--seed", opt.seed, "overrides the config seed");
  sc_synth->add_option("--out-dir", opt.out_dir, "output directory")
      ->required();
  sc_synth->callback([&] {
    ManifestBuilder mf = manifest_for("synth");
    SynthConfig config = opt.preset == "coupled"
                             ? SynthConfig::coupled_defaults()
                             : SynthConfig::defaults();
    if (!opt.config.empty()) {
      const std::string bytes = read_file(opt.config);
      mf.add_input(opt.config, bytes);
      config = synth_config_from_json(ojson::parse(bytes));
    }
    if (sc_synth->count("--seed") > 0) config.seed = opt.seed;

    const SynthOutput data = generate(config);
    const std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);

    {
      std::ostringstream edges;
      write_edge_csv(data.events, data.players, edges);
      write_file((dir / "edges.csv").string(), edges.str());
      mf.add_output((dir / "edges.csv").string());
    }
    {
      std::ostringstream demo;
      write_demographics_csv(data.demographics, data.players, demo);
      write_file((dir / "demographics.csv").string(), demo.str());
      mf.add_output((dir / "demographics.csv").string());
    }
    write_file((dir / "ground_truth.json").string(),
               ground_truth_to_json(data.truth, config).dump(2) + "\n");
    mf.add_output((dir / "ground_truth.json").string());
    mf.write((dir / "run_manifest.json").string());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  static const std::string prog = "recipnet";
  argv.push_back(prog.c_str());
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace recipnet::cli
