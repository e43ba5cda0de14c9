#include <doctest.h>

#include <cmath>

#include "kabc/diagnostics.hpp"
#include "kabc/exact.hpp"
#include "oracles.hpp"

using namespace kabc;
using kabc::testing::kPi;

TEST_CASE("peakon speeds") {
  CHECK(make_peakon(1.0, preset(PresetName::ch), PeakonDomain::line).speed() == 1.0);
  CHECK(make_peakon(1.0, preset(PresetName::dp), PeakonDomain::line).speed() == 1.0);
  CHECK(make_peakon(std::sqrt(2.0), preset(PresetName::novikov), PeakonDomain::line).speed() ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(make_peakon(1.0, preset(PresetName::forq), PeakonDomain::line).speed() == doctest::Approx(2.0 / 3.0));
  // odd k keeps the sign of gamma
  CHECK(make_peakon(-1.0, preset(PresetName::ch), PeakonDomain::line).speed() == -1.0);
  CHECK(make_peakon(-1.0, preset(PresetName::novikov), PeakonDomain::line).speed() == 1.0);
}

TEST_CASE("line peakon") {
  const PeakonSpec ch = make_peakon(1.0, preset(PresetName::ch), PeakonDomain::line);
  CHECK(peakon_line_eval(ch, 0.0, 0.0) == 1.0);
  CHECK(peakon_line_eval(ch, 1.0, 0.0) == doctest::Approx(std::exp(-1.0)));
  const PeakonSpec nov = make_peakon(std::sqrt(2.0), preset(PresetName::novikov), PeakonDomain::line);
  for (double x : {-3.0, -0.4, 0.0, 1.7, 5.0}) {
    for (double t : {0.0, 0.5, 2.0}) {
      // equal up to the rounding of the shifted argument
      CHECK(peakon_line_eval(nov, x, t) ==
            doctest::Approx(peakon_line_eval(nov, x - nov.speed() * (t - 0.5), 0.5)).epsilon(1e-14));
    }
  }
}

TEST_CASE("circle peakon") {
  const Params ch = preset(PresetName::ch);
  const PeakonSpec s = make_peakon(1.0, ch, PeakonDomain::circle);
  CHECK(peakon_circle_eval(s, kPi, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(peakon_circle_eval(s, 0.0, 0.0) == doctest::Approx(std::cosh(kPi)));
  // CH on the circle: [1 + sinh^2 pi] cosh^{-1} pi = cosh pi
  CHECK(s.circle_speed() == doctest::Approx(std::cosh(kPi)).epsilon(1e-14));
  for (double x : {0.3, 1.0, 4.0, 6.0}) {
    for (double t : {0.0, 0.1, 0.77}) {
      CHECK(peakon_circle_eval(s, x + 2.0 * kPi, t) == doctest::Approx(peakon_circle_eval(s, x, t)).epsilon(1e-13));
    }
  }
  CHECK(periodic_reduce(-0.5) == doctest::Approx(2.0 * kPi - 0.5));
  CHECK(periodic_reduce(7.0) == doctest::Approx(7.0 - 2.0 * kPi));
  CHECK_THROWS_AS(make_peakon(1.0, validate(2, 0.0, 0.0, 0.0), PeakonDomain::circle), ParamError);
  CHECK_NOTHROW(make_peakon(1.0, validate(2, 0.0, 0.0, 0.0), PeakonDomain::line));
}

TEST_CASE("green functions") {
  CHECK(green_line(0.0) == 0.5);
  CHECK(green_line(std::log(2.0)) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(green_line(-std::log(2.0)) == doctest::Approx(0.25).epsilon(1e-15));

  auto images = [](double x, double c) {
    double s = 0.0;
    for (int j = -60; j <= 60; ++j) s += 0.5 * std::exp(-std::abs(x + j * c));
    return s;
  };
  CHECK(green_periodic(0.0, 2.0 * kPi) == doctest::Approx(images(0.0, 2.0 * kPi)).epsilon(1e-14));
  CHECK(green_periodic(0.0, 2.0 * kPi) == doctest::Approx(0.50186).epsilon(1e-5));
  for (double x : {-7.0, -1.0, 0.5, 3.0, 9.0}) {
    CHECK(green_periodic(x, 2.0 * kPi) == doctest::Approx(images(x, 2.0 * kPi)).epsilon(1e-13));
  }
  for (double c : {8.0, 20.0, 40.0}) {
    for (double x : {0.0, 0.3 * c / 4, c / 4}) {
      CHECK(std::abs(green_periodic(x, c) - green_line(x)) <= std::exp(-c / 2));
    }
  }
}

TEST_CASE("green_periodic is the inverse Helmholtz image of a discrete delta") {
  // Impulse of mass 1 at node 0. Away from the source the truncated series
  // differs from G_per by O(n^-3): 3.1e-8 at n = 1024, below 1e-8 from n = 2048.
  auto mismatch = [](int n) {
    const Grid g = make_grid(n, 2.0 * kPi);
    Spectral sp(g);
    Field delta(g);
    delta[0] = 1.0 / g.dx();
    const Field h = sp.helmholtz_inverse(delta);
    double worst = 0.0;
    for (int j = n / 16; j < n - n / 16; ++j) {
      worst = std::max(worst, std::abs(h[j] - green_periodic(g.node(j), g.length)));
    }
    return worst;
  };
  const double e1024 = mismatch(1024), e2048 = mismatch(2048);
  CHECK(e1024 <= 4e-8);
  CHECK(e2048 <= 1e-8);
  CHECK(std::log2(e1024 / e2048) == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("profiles") {
  const Grid g = make_grid(1024, 40.0 * kPi);
  const Field b = mollified_profile({.shape = ProfileShape::bump, .width = 1.0}, g);
  for (int j = 0; j < g.n; ++j) {
    if (std::abs(g.node(j) - g.center()) >= 1.0) CHECK(b[j] == 0.0);
  }
  CHECK(b[g.n / 2] == doctest::Approx(std::exp(-1.0)));
  CHECK(bump(1.0, 1.0) == 0.0);
  CHECK(bump(0.999, 1.0) > 0.0);

  // mollifier limit
  double prev = 1e9;
  for (double w : {0.2, 0.05, 0.0125}) {
    const Field p = mollified_profile({.shape = ProfileShape::peakon, .moll_width = w}, g);
    double d = 0.0;
    for (int j = 0; j < g.n; ++j) d = std::max(d, std::abs(p[j] - std::exp(-std::abs(g.node(j) - g.center()))));
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 0.01);

  const Field tail = mollified_profile({.shape = ProfileShape::exp_tail, .theta = 0.5}, g);
  const DecayFit fit = decay_fit(tail, {5.0, 15.0}, Side::right);
  REQUIRE(fit.theta_hat.has_value());
  CHECK(*fit.theta_hat == doctest::Approx(0.5).epsilon(0.02));

  CHECK_THROWS_AS(mollified_profile({.shape = ProfileShape::bump, .width = 40.0}, g), std::invalid_argument);
  CHECK_THROWS_AS(mollified_profile({.shape = ProfileShape::peakon, .moll_width = 0.0}, g), std::invalid_argument);
  CHECK(mollified_profile({.shape = ProfileShape::zero}, g).max_abs() == 0.0);
  CHECK(profile_shape_from_string("exp_tail") == ProfileShape::exp_tail);
  CHECK(to_string(ProfileShape::sine_bump) == "sine_bump");
}

TEST_CASE("smoothed_exponential") {
  // quadrature oracle of the Gaussian convolution
  for (double x : {0.0, 0.1, 1.0, 4.0, 30.0, -2.0}) {
    const double sigma = 0.3, theta = 0.7;
    auto integrand = [&](double y) {
      return std::exp(-theta * std::abs(y)) * std::exp(-(x - y) * (x - y) / (2 * sigma * sigma)) /
             (sigma * std::sqrt(2.0 * kPi));
    };
    // split at the kernel's corner when it lies inside the Gaussian support
    const double lo = x - 12 * sigma, hi = x + 12 * sigma;
    double ref = 0.0;
    if (lo < 0.0 && hi > 0.0) {
      ref = kabc::testing::gauss_legendre(integrand, lo, 0.0, 2000) +
            kabc::testing::gauss_legendre(integrand, 0.0, hi, 2000);
    } else {
      ref = kabc::testing::gauss_legendre(integrand, lo, hi, 2000);
    }
    CHECK(smoothed_exponential(x, theta, sigma) == doctest::Approx(ref).epsilon(1e-9));
  }
  CHECK(std::isfinite(smoothed_exponential(500.0, 0.5, 1e-3)));
}
