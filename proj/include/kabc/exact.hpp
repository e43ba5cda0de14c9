#pragma once

#include <optional>
#include <string_view>

#include "kabc/params.hpp"
#include "kabc/spectral.hpp"

namespace kabc {

enum class PeakonDomain { line, circle };

/// Single peakon of amplitude gamma (any sign).
struct PeakonSpec {
  double gamma = 1.0;
  Params params;
  PeakonDomain domain = PeakonDomain::line;

  /// (1 - a) gamma^k, the speed on the line.
  double speed() const;
  /// [1 + (1 - a) sinh^2 pi] cosh^{k-2}(pi) gamma^k, the speed on the circle.
  double circle_speed() const;
};

/// Throws ParamError when a circle peakon is requested for parameters that
/// violate 6a + b + 2c = 3k.
PeakonSpec make_peakon(double gamma, const Params& p, PeakonDomain domain);

double peakon_line_eval(const PeakonSpec& spec, double x, double t);

/// gamma cosh([x - speed t]_p - pi) on the circle of circumference 2 pi.
double peakon_circle_eval(const PeakonSpec& spec, double x, double t);

/// [x]_p = x - 2 pi floor(x / 2 pi).
double periodic_reduce(double x);

/// G(x) = exp(-|x|) / 2.
double green_line(double x);
/// cosh(d - C/2) / (2 sinh(C/2)) with d = |x| mod C.
double green_periodic(double x, double circumference);

enum class ProfileShape { peakon, exp_tail, bump, sech, sine_bump, sine, zero };

ProfileShape profile_shape_from_string(std::string_view name);
std::string_view to_string(ProfileShape shape);

/// Initial-data descriptor. Line profiles are centered at the box center.
///
///   peakon     gamma * exp(-|x|) smoothed by a Gaussian of std moll_width
///   exp_tail   gamma * exp(-theta |x|), smoothed likewise
///   bump       gamma * exp(-1 / (1 - (x/width)^2)) on |x| < width
///   sech       gamma * sech(x)
///   sine_bump  gamma * sin(x) * bump(width)
///   sine       gamma * sin(x) in grid coordinates (no centering)
///   zero       identically zero
struct ProfileSpec {
  ProfileShape shape = ProfileShape::peakon;
  double gamma = 1.0;
  double theta = 0.5;
  double width = 1.0;
  /// Defaults to 3 dx when unset.
  std::optional<double> moll_width;
};

/// Samples the profile on the grid. Throws std::invalid_argument when the
/// bump width or mollifier width exceeds a quarter of the box, or a
/// mollified shape is given a non-positive width.
Field mollified_profile(const ProfileSpec& spec, const Grid& grid);

/// exp(-theta |x|) convolved with a unit-mass Gaussian of std sigma.
double smoothed_exponential(double x, double theta, double sigma);

/// exp(-1 / (1 - (x/width)^2)) inside |x| < width, zero outside.
double bump(double x, double width);

}  // namespace kabc
