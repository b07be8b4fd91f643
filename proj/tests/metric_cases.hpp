#pragma once

// Fixed classifier-metric cases with independently enumerated expected
// values (confusion-matrix and rank-statistic arithmetic done offline).
// Threshold convention: score >= 0.5 predicts positive; macro averages
// use 0 for empty denominators; AUC counts score ties as one half.

#include <string>
#include <vector>

namespace recipnet_test {

struct MetricCase {
  std::string name;
  std::vector<double> scores;
  std::vector<int> labels;
  double auc;
  double cwa;
  double macro_precision;
  double macro_recall;
  double macro_f1;
};

inline const std::vector<MetricCase>& metric_cases() {
  static const std::vector<MetricCase> cases = {
      {"perfect_separation",
       {0.9, 0.8, 0.2, 0.1},
       {1, 1, 0, 0},
       1.0, 1.0, 1.0, 1.0, 1.0},
      {"perfectly_wrong",
       {0.1, 0.2, 0.8, 0.9},
       {1, 1, 0, 0},
       0.0, 0.0, 0.0, 0.0, 0.0},
      {"spec_auc_half",
       {0.9, 0.8, 0.3},
       {1, 0, 1},
       0.5, 0.25, 0.25, 0.25, 0.25},
      {"spec_cwa_075",
       {0.9, 0.3, 0.2, 0.1},
       {1, 1, 0, 0},
       1.0, 0.75, 0.8333333333333333, 0.75, 0.7333333333333334},
      {"all_scores_tied",
       {0.5, 0.5, 0.5, 0.5},
       {1, 0, 1, 0},
       0.5, 0.5, 0.25, 0.5, 0.3333333333333333},
      {"tie_between_classes",
       {0.7, 0.7, 0.2},
       {1, 0, 0},
       0.75, 0.75, 0.75, 0.75, 0.6666666666666666},
      {"tie_within_class",
       {0.7, 0.7, 0.6, 0.2},
       {1, 1, 0, 0},
       1.0, 0.75, 0.8333333333333333, 0.75, 0.7333333333333334},
      {"minimal_two_points_right",
       {0.8, 0.1},
       {1, 0},
       1.0, 1.0, 1.0, 1.0, 1.0},
      {"minimal_two_points_wrong",
       {0.1, 0.8},
       {1, 0},
       0.0, 0.0, 0.0, 0.0, 0.0},
      {"threshold_exactly_half",
       {0.5, 0.49},
       {1, 0},
       1.0, 1.0, 1.0, 1.0, 1.0},
      {"all_predicted_positive",
       {0.9, 0.8, 0.7, 0.6},
       {1, 1, 0, 0},
       1.0, 0.5, 0.25, 0.5, 0.3333333333333333},
      {"all_predicted_negative",
       {0.4, 0.3, 0.2, 0.1},
       {1, 1, 0, 0},
       1.0, 0.5, 0.25, 0.5, 0.3333333333333333},
      {"skew_one_positive",
       {0.9, 0.4, 0.3, 0.2, 0.1},
       {1, 0, 0, 0, 0},
       1.0, 1.0, 1.0, 1.0, 1.0},
      {"skew_one_negative",
       {0.9, 0.8, 0.7, 0.6, 0.1},
       {1, 1, 1, 1, 0},
       1.0, 1.0, 1.0, 1.0, 1.0},
      {"interleaved",
       {0.9, 0.85, 0.8, 0.75, 0.7, 0.65},
       {1, 0, 1, 0, 1, 0},
       0.6666666666666667, 0.5, 0.25, 0.5, 0.3333333333333333},
      {"reversed_interleaved",
       {0.9, 0.85, 0.8, 0.75, 0.7, 0.65},
       {0, 1, 0, 1, 0, 1},
       0.33333333333333337, 0.5, 0.25, 0.5, 0.3333333333333333},
      {"duplicates_mixed",
       {0.6, 0.6, 0.6, 0.4, 0.4},
       {1, 1, 0, 0, 1},
       0.5833333333333333, 0.5833333333333333, 0.5833333333333333, 0.5833333333333333, 0.5833333333333333},
      {"one_each_tied",
       {0.5, 0.5},
       {1, 0},
       0.5, 0.5, 0.25, 0.5, 0.3333333333333333},
      {"random_0",
       {0.9, 0.1, 0.4, 0.6, 0.7},
       {1, 0, 0, 1, 1},
       1.0, 1.0, 1.0, 1.0, 1.0},
      {"random_1",
       {0.1, 0.3, 0.3, 0.2, 0.5, 0.2},
       {0, 0, 0, 1, 0, 1},
       0.25, 0.375, 0.3, 0.375, 0.3333333333333333},
      {"random_2",
       {0.5, 0.1, 0.2, 0.4, 0.9, 0.6},
       {0, 1, 1, 0, 1, 1},
       0.5, 0.5, 0.5, 0.5, 0.4857142857142857},
      {"random_3",
       {0.4, 0.9, 0.6, 0.3},
       {0, 1, 1, 1},
       0.6666666666666666, 0.8333333333333333, 0.75, 0.8333333333333333, 0.7333333333333334},
      {"random_4",
       {0.0, 0.1, 0.2, 1.0, 0.3, 0.5},
       {0, 0, 0, 1, 0, 1},
       1.0, 1.0, 1.0, 1.0, 1.0},
      {"random_5",
       {0.3, 0.7, 0.1, 0.8, 0.8},
       {1, 1, 1, 0, 1},
       0.125, 0.25, 0.3333333333333333, 0.25, 0.2857142857142857},
      {"random_6",
       {1.0, 0.4, 0.3, 0.4, 0.9},
       {1, 0, 1, 0, 1},
       0.6666666666666666, 0.8333333333333333, 0.8333333333333333, 0.8333333333333333, 0.8},
      {"random_7",
       {0.6, 0.6, 0.7, 0.9, 0.9, 0.7, 0.0},
       {0, 1, 0, 1, 1, 0, 0},
       0.7916666666666666, 0.625, 0.75, 0.625, 0.5333333333333333},
  };
  return cases;
}

}  // namespace recipnet_test
