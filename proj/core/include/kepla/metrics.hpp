#pragma once

#include <string>
#include <vector>

namespace kepla {

// Regression metrics for affinity prediction: root-mean-square error, mean
// absolute error, Pearson correlation, and the residual standard deviation
// about the least-squares line fitted to (prediction, label) pairs.
struct MetricsReport {
  double rmse = 0.0;
  double mae = 0.0;
  double r = 0.0;   // meaningful only when r_defined
  double sd = 0.0;  // meaningful only when sd_defined
  int n = 0;
  // When predictions or labels have zero variance the correlation and the
  // regression fit degenerate; both values are then flagged undefined
  // rather than reported as a number.
  bool r_defined = false;
  bool sd_defined = false;

  // One `key<TAB>value` line per field; undefined values print as the
  // literal `undefined`.
  std::string to_text() const;
  // Flat JSON object; undefined values serialize as null.
  std::string to_json() const;
};

// Computes all four metrics over equal-length vectors.
//   rmse = sqrt(mean (p_i - y_i)^2)      mae = mean |p_i - y_i|
//   r    = Pearson correlation
//   sd   = sqrt( sum_i (y_i - (a + b p_i))^2 / (n - 1) )
// with (a, b) the least-squares fit of labels on predictions.
// Errors: length mismatch, fewer than two samples, non-finite entries.
MetricsReport evaluate_predictions(const std::vector<double>& predictions,
                                   const std::vector<double>& labels);

}  // namespace kepla
