#include "kepla/metrics.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "kepla/errors.hpp"
#include "kepla/rng.hpp"
#include "support.hpp"

using namespace kepla;

namespace {

std::vector<double> random_vector(Rng& rng, int n, double lo = -3.0,
                                  double hi = 12.0) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

// Direct-formula reference, written independently of the implementation.
struct Reference {
  double rmse, mae, r, sd;
};

Reference reference_metrics(const std::vector<double>& p,
                            const std::vector<double>& y) {
  const int n = static_cast<int>(p.size());
  double se = 0, ae = 0;
  for (int i = 0; i < n; ++i) {
    se += (p[i] - y[i]) * (p[i] - y[i]);
    ae += std::fabs(p[i] - y[i]);
  }
  double mp = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mp += p[i] / n;
    my += y[i] / n;
  }
  double spp = 0, syy = 0, spy = 0;
  for (int i = 0; i < n; ++i) {
    spp += (p[i] - mp) * (p[i] - mp);
    syy += (y[i] - my) * (y[i] - my);
    spy += (p[i] - mp) * (y[i] - my);
  }
  const double b = spy / spp;
  const double a = my - b * mp;
  double ssr = 0;
  for (int i = 0; i < n; ++i) {
    ssr += (y[i] - a - b * p[i]) * (y[i] - a - b * p[i]);
  }
  return {std::sqrt(se / n), ae / n, spy / std::sqrt(spp * syy),
          std::sqrt(ssr / (n - 1))};
}

}  // namespace

TEST_CASE("perfect fit and perfect anti-linear fit hit exact values") {
  const MetricsReport perfect =
      evaluate_predictions({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  CHECK(perfect.n == 3);
  CHECK(perfect.rmse == 0.0);
  CHECK(perfect.mae == 0.0);
  REQUIRE(perfect.r_defined);
  REQUIRE(perfect.sd_defined);
  CHECK(perfect.r == 1.0);
  CHECK(perfect.sd == 0.0);

  const MetricsReport anti =
      evaluate_predictions({1.0, 2.0, 3.0}, {3.0, 2.0, 1.0});
  CHECK(anti.rmse == doctest::Approx(std::sqrt(8.0 / 3.0)));
  CHECK(anti.mae == doctest::Approx(4.0 / 3.0));
  REQUIRE(anti.r_defined);
  REQUIRE(anti.sd_defined);
  CHECK(anti.r == -1.0);
  CHECK(anti.sd == 0.0);  // the fit y = 4 - p is exact
}

TEST_CASE("random vectors match the direct-formula reference within 1e-9") {
  Rng rng(20240817);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 50;
    const std::vector<double> p = random_vector(rng, n);
    std::vector<double> y = random_vector(rng, n);
    // Mix in correlation so r spans a useful range.
    const double blend = rng.uniform(0.0, 1.0);
    for (int i = 0; i < n; ++i) y[i] = blend * p[i] + (1 - blend) * y[i];

    const MetricsReport got = evaluate_predictions(p, y);
    const Reference want = reference_metrics(p, y);
    REQUIRE(got.r_defined);
    REQUIRE(got.sd_defined);
    CHECK(got.rmse == doctest::Approx(want.rmse).epsilon(1e-9));
    CHECK(got.mae == doctest::Approx(want.mae).epsilon(1e-9));
    CHECK(got.r == doctest::Approx(want.r).epsilon(1e-9));
    CHECK(got.sd == doctest::Approx(want.sd).epsilon(1e-9));

    // Power-mean inequality and the best-fit residual bound.
    CHECK(got.rmse >= got.mae - 1e-12);
    CHECK(got.sd <= got.rmse * std::sqrt(double(n) / (n - 1)) + 1e-9);
    CHECK(got.r >= -1.0);
    CHECK(got.r <= 1.0);
  }
}

TEST_CASE("r and sd are invariant under affine transforms of predictions") {
  Rng rng(31);
  const std::vector<double> p = random_vector(rng, 40);
  const std::vector<double> y = random_vector(rng, 40);
  const MetricsReport base = evaluate_predictions(p, y);

  for (double alpha : {2.5, 0.3, -1.75}) {
    for (double shift : {0.0, -4.0, 11.5}) {
      std::vector<double> q(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) q[i] = alpha * p[i] + shift;
      const MetricsReport t = evaluate_predictions(q, y);
      REQUIRE(t.r_defined);
      REQUIRE(t.sd_defined);
      // sd is invariant for any alpha != 0; r keeps magnitude and follows
      // the sign of alpha.
      CHECK(t.sd == doctest::Approx(base.sd).epsilon(1e-9));
      const double want_r = alpha > 0 ? base.r : -base.r;
      CHECK(t.r == doctest::Approx(want_r).epsilon(1e-9));
    }
  }
}

TEST_CASE("degenerate variance flags r and sd undefined") {
  const MetricsReport flat_pred =
      evaluate_predictions({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0});
  CHECK(!flat_pred.r_defined);
  CHECK(!flat_pred.sd_defined);
  CHECK(flat_pred.rmse == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(flat_pred.mae == doctest::Approx(2.0 / 3.0));

  const MetricsReport flat_label =
      evaluate_predictions({1.0, 2.0, 3.0}, {2.0, 2.0, 2.0});
  CHECK(!flat_label.r_defined);
  CHECK(!flat_label.sd_defined);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(evaluate_predictions({1.0, 2.0}, {1.0}), DimensionError);
  CHECK_THROWS_AS(evaluate_predictions({1.0}, {1.0}), DegenerateInputError);
  CHECK_THROWS_AS(evaluate_predictions({}, {}), DegenerateInputError);
  const double nan = std::nan("");
  CHECK_THROWS_AS(evaluate_predictions({1.0, nan}, {1.0, 2.0}), InputError);
  CHECK_THROWS_AS(evaluate_predictions({1.0, 2.0}, {1.0, HUGE_VAL}),
                  InputError);
}

TEST_CASE("reports serialize as key-value text and JSON") {
  const MetricsReport perfect =
      evaluate_predictions({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  CHECK(perfect.to_text() == "n\t3\nrmse\t0\nmae\t0\nr\t1\nsd\t0\n");
  CHECK(perfect.to_json() ==
        "{\"n\": 3, \"rmse\": 0, \"mae\": 0, \"r\": 1, \"sd\": 0}");

  const MetricsReport flat =
      evaluate_predictions({2.0, 2.0}, {1.0, 3.0});
  CHECK(flat.to_text() ==
        "n\t2\nrmse\t1\nmae\t1\nr\tundefined\nsd\tundefined\n");
  CHECK(flat.to_json() ==
        "{\"n\": 2, \"rmse\": 1, \"mae\": 1, \"r\": null, \"sd\": null}");
}
