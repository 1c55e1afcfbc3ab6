#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <catch_amalgamated.hpp>

#include "robe/errors.hpp"
#include "robe/parallel.hpp"
#include "robe/types.hpp"

using namespace robe;
using Catch::Matchers::WithinAbs;

TEST_CASE("parameter point accepts the closed mass interval", "[types]") {
  CHECK_NOTHROW(ParameterPoint(0.0, 0.0));
  CHECK_NOTHROW(ParameterPoint(1.0, 0.99));
  const ParameterPoint p(0.25, 0.5);
  CHECK(p.mu() == 0.25);
  CHECK(p.e() == 0.5);
  CHECK(p == ParameterPoint(0.25, 0.5));
}

TEST_CASE("parameter point rejects out-of-range values", "[types]") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ParameterPoint(-0.01, 0.0), InvalidParameter);
  CHECK_THROWS_AS(ParameterPoint(1.5, 0.0), InvalidParameter);
  CHECK_THROWS_AS(ParameterPoint(0.5, -0.1), InvalidParameter);
  CHECK_THROWS_AS(ParameterPoint(0.5, 0.995), InvalidParameter);
  CHECK_THROWS_AS(ParameterPoint(nan, 0.0), InvalidParameter);
  CHECK_THROWS_AS(ParameterPoint(0.5, nan), InvalidParameter);
  CHECK_THROWS_AS(ParameterPoint(0.5, 0.2, 1.0), InvalidParameter);
  CHECK_THROWS_AS(ParameterPoint(0.5, 0.5, 0.4), InvalidParameter);
  CHECK_NOTHROW(ParameterPoint(0.5, 0.995, 0.999));
}

TEST_CASE("unit circle angles are normalized", "[types]") {
  const double pi = std::numbers::pi;
  CHECK_THAT(UnitCirclePoint(-pi).angle(), WithinAbs(pi, 1e-15));
  CHECK_THAT(UnitCirclePoint(7 * pi).angle(), WithinAbs(pi, 1e-12));
  CHECK(UnitCirclePoint(kTwoPi).angle() == 0.0);
  CHECK(UnitCirclePoint(kTwoPi).is_one());
  CHECK(UnitCirclePoint::one().is_one());
  CHECK_FALSE(UnitCirclePoint::minus_one().is_one());
  CHECK_THAT(UnitCirclePoint::minus_one().value().real(), WithinAbs(-1.0, 1e-15));
  CHECK_THAT(UnitCirclePoint::minus_one().twist(), WithinAbs(0.5, 1e-15));
  for (double a : {-10.0, -1.0, 0.3, 6.5, 100.0}) {
    const double n = UnitCirclePoint(a).angle();
    CHECK(n >= 0.0);
    CHECK(n < kTwoPi);
    CHECK_THAT(std::cos(n), WithinAbs(std::cos(a), 1e-12));
    CHECK_THAT(std::sin(n), WithinAbs(std::sin(a), 1e-12));
  }
}

TEST_CASE("closed-form constants", "[types]") {
  // mu* is the positive root of 2 mu^2 - (5/4) mu - 9/16.
  const double root = (1.25 + std::sqrt(1.25 * 1.25 + 4.0 * 2.0 * 0.5625)) / 4.0;
  CHECK_THAT(kMuStar, WithinAbs(root, 1e-15));
  CHECK_THAT(kMuStar, WithinAbs(0.928053612612, 1e-12));
  CHECK_THAT(kMuHyperbolicCircular, WithinAbs(0.888888888889, 1e-12));
}

TEST_CASE("error hierarchy", "[types]") {
  const TraceFailure f(0.25, "boom");
  CHECK(f.eccentricity() == 0.25);
  CHECK(std::string(f.what()).find("boom") != std::string::npos);
  CHECK_THROWS_AS(throw ToleranceNotMet("x"), NumericalError);
  CHECK_THROWS_AS(throw TruncationNotConverged("x"), NumericalError);
  CHECK_THROWS_AS(throw InvalidParameter("x"), std::invalid_argument);
}

TEST_CASE("worker count honours the environment", "[types]") {
  CHECK(worker_count(3) == 3);
  ::setenv("ROBE_STABILITY_THREADS", "2", 1);
  CHECK(worker_count(0) == 2);
  ::setenv("ROBE_STABILITY_THREADS", "0", 1);
  CHECK(worker_count(0) >= 1);
  ::setenv("ROBE_STABILITY_THREADS", "junk", 1);
  CHECK(worker_count(0) >= 1);
  ::unsetenv("ROBE_STABILITY_THREADS");
}

TEST_CASE("parallel chunks cover every index once", "[types]") {
  for (int threads : {1, 2, 3, 8}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_chunks(hits.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("parallel chunks rethrow the lowest failing chunk", "[types]") {
  for (int rep = 0; rep < 5; ++rep) {
    try {
      parallel_chunks(40, 4, [](std::size_t b, std::size_t) {
        if (b > 0) throw std::runtime_error("chunk " + std::to_string(b));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& ex) {
      CHECK(std::string(ex.what()) == "chunk 10");
    }
  }
}
