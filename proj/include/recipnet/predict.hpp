#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "recipnet/core.hpp"
#include "recipnet/ingest.hpp"
#include "recipnet/parallel.hpp"
#include "recipnet/reciprocity.hpp"
#include "recipnet/rng.hpp"

// Trust-reciprocation prediction: label construction, cross-layer behavioral
// features, an L2-regularized logistic classifier trained by full-batch
// gradient descent, and stratified cross-validated evaluation.

namespace recipnet {

// ---------------------------------------------------------------------------
// Instances and labels.
// ---------------------------------------------------------------------------

struct TrustRequestInstance {
  PlayerId initiator = 0;
  PlayerId responder = 0;
  Timestamp t0 = 0;           // first trust grant initiator -> responder
  bool reciprocated = false;  // reverse grant strictly after t0 in window

  friend bool operator==(const TrustRequestInstance&,
                         const TrustRequestInstance&) = default;
};

// One instance per ordered pair's first trust grant. Requests that start in
// the final `exclusion_days` of the window are dropped because their outcome
// is censored. Expects trust collapsed.
inline std::vector<TrustRequestInstance> build_instances(
    const TemporalMultigraph& graph, double exclusion_days = 30.0) {
  const double cutoff = static_cast<double>(graph.window().end) -
                        exclusion_days * kSecondsPerDay;
  const auto& events = graph.events();

  std::vector<TrustRequestInstance> instances;
  for (const auto& entry : graph.pairs()) {
    std::optional<Timestamp> t0;
    for (std::uint32_t off : entry.offsets) {
      if (is_trust_grant(events[off])) {
        t0 = events[off].ts;
        break;
      }
    }
    if (!t0 || static_cast<double>(*t0) > cutoff) continue;

    TrustRequestInstance inst;
    inst.initiator = entry.src;
    inst.responder = entry.dst;
    inst.t0 = *t0;
    for (std::uint32_t off : graph.pair_events(entry.dst, entry.src)) {
      const Event& e = events[off];
      if (is_trust_grant(e) && e.ts > *t0) {
        inst.reciprocated = true;
        break;
      }
    }
    instances.push_back(inst);
  }
  std::sort(instances.begin(), instances.end(),
            [](const TrustRequestInstance& a, const TrustRequestInstance& b) {
              if (a.t0 != b.t0) return a.t0 < b.t0;
              if (a.initiator != b.initiator) return a.initiator < b.initiator;
              return a.responder < b.responder;
            });
  return instances;
}

// ---------------------------------------------------------------------------
// Features.
// ---------------------------------------------------------------------------

struct FeatureConfig {
  bool include_trust = true;
  bool include_trade = false;
  bool include_homophily = false;
  int k_days = 0;  // future-behavioral window; 0 disables future features

  std::string name() const {
    std::string n;
    if (include_trust) n += "trust";
    if (include_trade) n += n.empty() ? "trade" : "+trade";
    if (include_homophily) n += n.empty() ? "homophily" : "+homophily";
    return n;
  }

  void validate() const {
    if (!include_trust && !include_trade && !include_homophily) {
      throw std::invalid_argument("FeatureConfig: no feature group enabled");
    }
    if (k_days < 0) {
      throw std::invalid_argument("FeatureConfig: negative K");
    }
  }
};

struct FeatureVector {
  double trust_deg_a = 0, trust_deg_b = 0;
  double trade_deg_a = 0, trade_deg_b = 0;
  double past_trades_ab = 0, past_trades_ba = 0;
  double future_trades_ab = 0, future_trades_ba = 0;
  double gender_homophily = 0;
  double experience_diff = 0;
};

inline std::vector<std::string> feature_names(const FeatureConfig& config) {
  std::vector<std::string> names;
  if (config.include_trust) {
    names.insert(names.end(), {"trust_deg_a", "trust_deg_b"});
  }
  if (config.include_trade) {
    names.insert(names.end(), {"trade_deg_a", "trade_deg_b", "past_trades_ab",
                               "past_trades_ba"});
    if (config.k_days > 0) {
      names.insert(names.end(), {"future_trades_ab", "future_trades_ba"});
    }
  }
  if (config.include_homophily) {
    names.insert(names.end(), {"gender_homophily", "experience_diff"});
  }
  return names;
}

inline std::vector<double> feature_row(const FeatureVector& f,
                                       const FeatureConfig& config) {
  std::vector<double> row;
  if (config.include_trust) {
    row.insert(row.end(), {f.trust_deg_a, f.trust_deg_b});
  }
  if (config.include_trade) {
    row.insert(row.end(), {f.trade_deg_a, f.trade_deg_b, f.past_trades_ab,
                           f.past_trades_ba});
    if (config.k_days > 0) {
      row.insert(row.end(), {f.future_trades_ab, f.future_trades_ba});
    }
  }
  if (config.include_homophily) {
    row.insert(row.end(), {f.gender_homophily, f.experience_diff});
  }
  return row;
}

struct MissingExperienceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Distinct counterparts of `player` over events matching `pred`, strictly
// before t0. Node offsets are time-ordered, so a binary search bounds the
// scan.
template <class Pred>
std::int64_t distinct_partners_before(const TemporalMultigraph& graph,
                                      PlayerId player, Timestamp t0,
                                      Pred&& pred) {
  const auto offsets = graph.node_events(player);
  const auto& events = graph.events();
  auto end = std::partition_point(
      offsets.begin(), offsets.end(),
      [&](std::uint32_t off) { return events[off].ts < t0; });
  std::set<PlayerId> partners;
  for (auto it = offsets.begin(); it != end; ++it) {
    const Event& e = events[*it];
    if (!pred(e)) continue;
    partners.insert(e.src == player ? e.dst : e.src);
  }
  return static_cast<std::int64_t>(partners.size());
}

inline std::int64_t count_trades_between(const TemporalMultigraph& graph,
                                         PlayerId src, PlayerId dst,
                                         Timestamp lo, Timestamp hi) {
  // Events with src->dst trade layer and lo <= ts <= hi.
  std::int64_t count = 0;
  const auto offsets = graph.pair_events(src, dst);
  const auto& events = graph.events();
  auto begin = std::partition_point(
      offsets.begin(), offsets.end(),
      [&](std::uint32_t off) { return events[off].ts < lo; });
  for (auto it = begin; it != offsets.end(); ++it) {
    const Event& e = events[*it];
    if (e.ts > hi) break;
    if (e.layer == Layer::Trade) ++count;
  }
  return count;
}

}  // namespace detail

// Degrees and past counts use events strictly before t0; future counts use
// the closed interval [t0, t0 + K days]. Throws MissingExperienceError when
// homophily is enabled and either player lacks a demographics record.
inline FeatureVector extract_features(const TrustRequestInstance& inst,
                                      const TemporalMultigraph& graph,
                                      const DemographicsTable& demographics,
                                      const FeatureConfig& config) {
  config.validate();
  FeatureVector f;
  const PlayerId a = inst.initiator;
  const PlayerId b = inst.responder;

  if (config.include_trust) {
    const auto trust_pred = [](const Event& e) { return is_trust_grant(e); };
    f.trust_deg_a = static_cast<double>(
        detail::distinct_partners_before(graph, a, inst.t0, trust_pred));
    f.trust_deg_b = static_cast<double>(
        detail::distinct_partners_before(graph, b, inst.t0, trust_pred));
  }
  if (config.include_trade) {
    const auto trade_pred = [](const Event& e) {
      return e.layer == Layer::Trade;
    };
    f.trade_deg_a = static_cast<double>(
        detail::distinct_partners_before(graph, a, inst.t0, trade_pred));
    f.trade_deg_b = static_cast<double>(
        detail::distinct_partners_before(graph, b, inst.t0, trade_pred));
    f.past_trades_ab = static_cast<double>(detail::count_trades_between(
        graph, a, b, graph.window().start, inst.t0 - 1));
    f.past_trades_ba = static_cast<double>(detail::count_trades_between(
        graph, b, a, graph.window().start, inst.t0 - 1));
    if (config.k_days > 0) {
      const Timestamp hi =
          inst.t0 + static_cast<Timestamp>(config.k_days) * kSecondsPerDay;
      f.future_trades_ab = static_cast<double>(
          detail::count_trades_between(graph, a, b, inst.t0, hi));
      f.future_trades_ba = static_cast<double>(
          detail::count_trades_between(graph, b, a, inst.t0, hi));
    }
  }
  if (config.include_homophily) {
    const PlayerDemographics* da = demographics.find(a);
    const PlayerDemographics* db = demographics.find(b);
    if (da == nullptr || db == nullptr) {
      throw MissingExperienceError("missing demographics for instance pair");
    }
    f.gender_homophily = (da->gender != Gender::Unknown &&
                          db->gender != Gender::Unknown &&
                          da->gender == db->gender)
                             ? 1.0
                             : 0.0;
    f.experience_diff =
        static_cast<double>(da->experience - db->experience);
  }
  return f;
}

struct Dataset {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;  // 1 = reciprocated
  std::vector<std::string> feature_names;
  std::vector<TrustRequestInstance> instances;  // aligned with rows
  std::int64_t skipped_missing_experience = 0;
};

inline Dataset extract_dataset(const TemporalMultigraph& graph,
                               const DemographicsTable& demographics,
                               const FeatureConfig& config,
                               const std::vector<TrustRequestInstance>& insts,
                               int threads = 1) {
  config.validate();

  struct Partial {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::vector<TrustRequestInstance> instances;
    std::int64_t skipped = 0;
  };
  const auto partials = parallel_chunk_map<Partial>(
      insts.size(), threads, [&](ChunkRange range) {
        Partial part;
        for (std::size_t i = range.begin; i < range.end; ++i) {
          try {
            FeatureVector f =
                extract_features(insts[i], graph, demographics, config);
            part.rows.push_back(feature_row(f, config));
            part.labels.push_back(insts[i].reciprocated ? 1 : 0);
            part.instances.push_back(insts[i]);
          } catch (const MissingExperienceError&) {
            ++part.skipped;
          }
        }
        return part;
      });

  Dataset ds;
  ds.feature_names = feature_names(config);
  for (auto& part : partials) {
    std::move(part.rows.begin(), part.rows.end(), std::back_inserter(ds.rows));
    ds.labels.insert(ds.labels.end(), part.labels.begin(), part.labels.end());
    ds.instances.insert(ds.instances.end(), part.instances.begin(),
                        part.instances.end());
    ds.skipped_missing_experience += part.skipped;
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Metrics.
// ---------------------------------------------------------------------------

// Rank statistic: probability a positive outscores a negative, ties half.
inline double auc_score(std::span<const double> scores,
                        std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("auc_score: size mismatch");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double n_pos = 0, n_neg = 0;
  for (int l : labels) (l == 1 ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("auc_score: single-class labels");
  }

  // Tie-averaged ranks of the positives.
  double rank_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum += avg_rank;
    }
    i = j;
  }
  return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg);
}

struct ThresholdMetrics {
  double cwa = 0;  // unweighted mean of per-class recalls
  double macro_precision = 0;
  double macro_recall = 0;
  double macro_f1 = 0;
};

// Threshold convention: score >= threshold predicts positive. Empty
// denominators contribute 0.
inline ThresholdMetrics threshold_metrics(std::span<const double> scores,
                                          std::span<const int> labels,
                                          double threshold = 0.5) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("threshold_metrics: size mismatch");
  }
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    if (labels[i] == 1) {
      pred ? ++tp : ++fn;
    } else {
      pred ? ++fp : ++tn;
    }
  }
  if (tp + fn == 0 || fp + tn == 0) {
    throw std::invalid_argument("threshold_metrics: single-class labels");
  }
  const auto ratio = [](std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0
                    : static_cast<double>(num) / static_cast<double>(den);
  };
  const double recall_pos = ratio(tp, tp + fn);
  const double recall_neg = ratio(tn, tn + fp);
  const double prec_pos = ratio(tp, tp + fp);
  const double prec_neg = ratio(tn, tn + fn);
  const auto f1 = [](double p, double r) {
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  };

  ThresholdMetrics m;
  m.cwa = 0.5 * (recall_pos + recall_neg);
  m.macro_precision = 0.5 * (prec_pos + prec_neg);
  m.macro_recall = m.cwa;
  m.macro_f1 = 0.5 * (f1(prec_pos, recall_pos) + f1(prec_neg, recall_neg));
  return m;
}

// ---------------------------------------------------------------------------
// L2-regularized logistic regression, full-batch gradient descent.
// ---------------------------------------------------------------------------

struct LogisticParams {
  double l2 = 1e-3;           // penalty on weights, never on the bias
  double learning_rate = 1.0; // initial step, halved on loss increase
  int epochs = 500;
  bool standardize = true;
  double tolerance = 1e-8;    // max-norm gradient stop
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> feature_mean;   // identity transform when empty
  std::vector<double> feature_scale;

  double raw_score(std::span<const double> row) const {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      double x = row[j];
      if (!feature_mean.empty()) {
        x = (x - feature_mean[j]) / feature_scale[j];
      }
      z += weights[j] * x;
    }
    return z;
  }
  double predict(std::span<const double> row) const {
    return 1.0 / (1.0 + std::exp(-raw_score(row)));
  }
};

namespace detail {

inline double log1p_exp(double x) {  // log(1 + e^x), overflow-safe
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Mean logistic loss plus L2 penalty; gradient written when requested.
inline double logistic_loss(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& labels,
                            const std::vector<double>& w, double bias,
                            double l2, std::vector<double>* grad_w = nullptr,
                            double* grad_b = nullptr) {
  const std::size_t n = rows.size();
  const std::size_t d = w.size();
  if (grad_w != nullptr) {
    grad_w->assign(d, 0.0);
    *grad_b = 0.0;
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = bias;
    for (std::size_t j = 0; j < d; ++j) z += w[j] * rows[i][j];
    const double y = labels[i] == 1 ? 1.0 : -1.0;
    loss += log1p_exp(-y * z);
    if (grad_w != nullptr) {
      const double coef = -y / (1.0 + std::exp(y * z));
      for (std::size_t j = 0; j < d; ++j) (*grad_w)[j] += coef * rows[i][j];
      *grad_b += coef;
    }
  }
  loss /= static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) loss += 0.5 * l2 * w[j] * w[j];
  if (grad_w != nullptr) {
    for (std::size_t j = 0; j < d; ++j) {
      (*grad_w)[j] = (*grad_w)[j] / static_cast<double>(n) + l2 * w[j];
    }
    *grad_b /= static_cast<double>(n);
  }
  return loss;
}

}  // namespace detail

// Deterministic: zero initialization, fixed step schedule with halving on
// non-decrease. Requires both classes present.
inline LogisticModel train_logistic(const std::vector<std::vector<double>>& x,
                                    const std::vector<int>& labels,
                                    const LogisticParams& params = {}) {
  if (x.empty() || x.size() != labels.size()) {
    throw std::invalid_argument("train_logistic: bad dataset");
  }
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) !=
                       labels.end();
  const bool has_neg = std::find_if(labels.begin(), labels.end(),
                                    [](int l) { return l != 1; }) !=
                       labels.end();
  if (!has_pos || !has_neg) {
    throw std::invalid_argument("train_logistic: single-class training data");
  }

  const std::size_t n = x.size();
  const std::size_t d = x[0].size();
  LogisticModel model;
  model.weights.assign(d, 0.0);

  // Standardize on a copy; the model stores the transform for raw scoring.
  std::vector<std::vector<double>> rows = x;
  if (params.standardize && d > 0) {
    model.feature_mean.assign(d, 0.0);
    model.feature_scale.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += rows[i][j];
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        var += (rows[i][j] - mean) * (rows[i][j] - mean);
      }
      var /= static_cast<double>(n);
      const double scale = var > 0.0 ? std::sqrt(var) : 1.0;
      model.feature_mean[j] = mean;
      model.feature_scale[j] = scale;
      for (std::size_t i = 0; i < n; ++i) {
        rows[i][j] = (rows[i][j] - mean) / scale;
      }
    }
  }

  std::vector<double> grad_w(d);
  double grad_b = 0.0;
  double step = params.learning_rate;
  double loss = detail::logistic_loss(rows, labels, model.weights, model.bias,
                                      params.l2, &grad_w, &grad_b);
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    double max_grad = std::abs(grad_b);
    for (double g : grad_w) max_grad = std::max(max_grad, std::abs(g));
    if (max_grad < params.tolerance) break;

    // Backtracking on the fixed gradient direction.
    std::vector<double> w_new(d);
    double b_new = 0.0;
    double loss_new = 0.0;
    for (;;) {
      for (std::size_t j = 0; j < d; ++j) {
        w_new[j] = model.weights[j] - step * grad_w[j];
      }
      b_new = model.bias - step * grad_b;
      loss_new = detail::logistic_loss(rows, labels, w_new, b_new, params.l2);
      if (loss_new < loss || step < 1e-12) break;
      step *= 0.5;
    }
    model.weights = std::move(w_new);
    model.bias = b_new;
    loss = detail::logistic_loss(rows, labels, model.weights, model.bias,
                                 params.l2, &grad_w, &grad_b);
    step *= 1.1;  // gentle recovery after halvings
  }
  return model;
}

// ---------------------------------------------------------------------------
// Stratified cross-validation.
// ---------------------------------------------------------------------------

struct FoldReport {
  double cwa = 0, auc = 0, precision = 0, recall = 0, f1 = 0;
  LogisticModel model;
};

struct ModelReport {
  std::vector<FoldReport> folds;
  double mean_cwa = 0, mean_auc = 0, mean_precision = 0, mean_recall = 0,
         mean_f1 = 0;
};

// Label-stratified fold assignment: each class is shuffled with the seeded
// generator and dealt round-robin, so every fold sees both classes whenever
// counts allow.
inline std::vector<int> stratified_folds(const std::vector<int>& labels,
                                         int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("stratified_folds: folds < 2");
  Rng rng(seed);
  std::vector<int> assignment(labels.size(), -1);
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if ((labels[i] == 1 ? 1 : 0) == cls) idx.push_back(i);
    }
    rng.shuffle(idx);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      assignment[idx[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
    }
  }
  return assignment;
}

inline ModelReport evaluate(const Dataset& dataset, int folds,
                            std::uint64_t seed,
                            const LogisticParams& params = {}) {
  if (dataset.rows.size() < static_cast<std::size_t>(folds)) {
    throw std::invalid_argument("evaluate: fewer instances than folds");
  }
  const std::vector<int> assignment =
      stratified_folds(dataset.labels, folds, seed);

  ModelReport report;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::vector<double>> train_x, test_x;
    std::vector<int> train_y, test_y;
    for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
      if (assignment[i] == f) {
        test_x.push_back(dataset.rows[i]);
        test_y.push_back(dataset.labels[i]);
      } else {
        train_x.push_back(dataset.rows[i]);
        train_y.push_back(dataset.labels[i]);
      }
    }
    const auto single_class = [](const std::vector<int>& y) {
      return std::find(y.begin(), y.end(), 1) == y.end() ||
             std::find_if(y.begin(), y.end(),
                          [](int l) { return l != 1; }) == y.end();
    };
    if (test_y.empty() || single_class(test_y) || single_class(train_y)) {
      throw std::runtime_error(
          "evaluate: fold missing a class, re-seed the split");
    }

    FoldReport fold;
    fold.model = train_logistic(train_x, train_y, params);
    std::vector<double> scores(test_x.size());
    for (std::size_t i = 0; i < test_x.size(); ++i) {
      scores[i] = fold.model.predict(test_x[i]);
    }
    fold.auc = auc_score(scores, test_y);
    const ThresholdMetrics tm = threshold_metrics(scores, test_y);
    fold.cwa = tm.cwa;
    fold.precision = tm.macro_precision;
    fold.recall = tm.macro_recall;
    fold.f1 = tm.macro_f1;
    report.folds.push_back(std::move(fold));
  }

  const double nf = static_cast<double>(folds);
  for (const FoldReport& fold : report.folds) {
    report.mean_cwa += fold.cwa / nf;
    report.mean_auc += fold.auc / nf;
    report.mean_precision += fold.precision / nf;
    report.mean_recall += fold.recall / nf;
    report.mean_f1 += fold.f1 / nf;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Ablation over feature sets and future-window sizes.
// ---------------------------------------------------------------------------

struct AblationRow {
  std::string features;
  int k_days = 0;
  ModelReport report;
};

// Configs without trade features ignore the K sweep (single row at K=0).
inline std::vector<AblationRow> feature_ablation(
    const TemporalMultigraph& graph, const DemographicsTable& demographics,
    const std::vector<FeatureConfig>& configs, const std::vector<int>& k_sweep,
    int folds, std::uint64_t seed, const LogisticParams& params = {},
    int threads = 1, double exclusion_days = 30.0) {
  if (configs.empty()) {
    throw std::invalid_argument("feature_ablation: no configs");
  }
  const auto instances = build_instances(graph, exclusion_days);

  std::vector<AblationRow> rows;
  for (const FeatureConfig& base : configs) {
    std::vector<int> ks;
    if (base.include_trade) {
      ks = k_sweep.empty() ? std::vector<int>{base.k_days} : k_sweep;
    } else {
      ks = {0};
    }
    for (int k : ks) {
      FeatureConfig config = base;
      config.k_days = k;
      const Dataset ds =
          extract_dataset(graph, demographics, config, instances, threads);
      AblationRow row;
      row.features = base.name();
      row.k_days = k;
      row.report = evaluate(ds, folds, seed, params);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace recipnet
