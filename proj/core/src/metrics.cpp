#include "kepla/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "kepla/errors.hpp"

namespace kepla {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  out << "n\t" << n << "\n";
  out << "rmse\t" << num(rmse) << "\n";
  out << "mae\t" << num(mae) << "\n";
  out << "r\t" << (r_defined ? num(r) : "undefined") << "\n";
  out << "sd\t" << (sd_defined ? num(sd) : "undefined") << "\n";
  return out.str();
}

std::string MetricsReport::to_json() const {
  std::ostringstream out;
  out << "{\"n\": " << n << ", \"rmse\": " << num(rmse)
      << ", \"mae\": " << num(mae)
      << ", \"r\": " << (r_defined ? num(r) : "null")
      << ", \"sd\": " << (sd_defined ? num(sd) : "null") << "}";
  return out.str();
}

MetricsReport evaluate_predictions(const std::vector<double>& predictions,
                                   const std::vector<double>& labels) {
  if (predictions.size() != labels.size()) {
    throw DimensionError("prediction/label length mismatch: " +
                         std::to_string(predictions.size()) + " vs " +
                         std::to_string(labels.size()));
  }
  const int n = static_cast<int>(predictions.size());
  if (n < 2) {
    throw DegenerateInputError("metrics need at least two samples");
  }
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(predictions[static_cast<std::size_t>(i)]) ||
        !std::isfinite(labels[static_cast<std::size_t>(i)])) {
      throw InputError("non-finite value at sample " + std::to_string(i));
    }
  }

  MetricsReport report;
  report.n = n;

  double se = 0.0, ae = 0.0, mean_p = 0.0, mean_y = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = predictions[static_cast<std::size_t>(i)] -
                     labels[static_cast<std::size_t>(i)];
    se += d * d;
    ae += std::fabs(d);
    mean_p += predictions[static_cast<std::size_t>(i)];
    mean_y += labels[static_cast<std::size_t>(i)];
  }
  report.rmse = std::sqrt(se / n);
  report.mae = ae / n;
  mean_p /= n;
  mean_y /= n;

  double spp = 0.0, syy = 0.0, spy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dp = predictions[static_cast<std::size_t>(i)] - mean_p;
    const double dy = labels[static_cast<std::size_t>(i)] - mean_y;
    spp += dp * dp;
    syy += dy * dy;
    spy += dp * dy;
  }
  if (spp > 0.0 && syy > 0.0) {
    report.r_defined = true;
    report.r = spy / std::sqrt(spp * syy);
    if (report.r > 1.0) report.r = 1.0;
    if (report.r < -1.0) report.r = -1.0;

    report.sd_defined = true;
    const double b = spy / spp;
    const double a = mean_y - b * mean_p;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
      const double resid =
          labels[static_cast<std::size_t>(i)] -
          (a + b * predictions[static_cast<std::size_t>(i)]);
      ssr += resid * resid;
    }
    report.sd = std::sqrt(ssr / (n - 1));
  }
  return report;
}

}  // namespace kepla
