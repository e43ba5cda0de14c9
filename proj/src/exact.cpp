#include "kabc/exact.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kabc {

namespace {

constexpr double kPi = std::numbers::pi;

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

double PeakonSpec::speed() const { return (1.0 - params.a) * ipow(gamma, params.k); }

double PeakonSpec::circle_speed() const {
  const double sh = std::sinh(kPi);
  // cosh^{k-2} with k = 1 is a reciprocal.
  const double ch = std::pow(std::cosh(kPi), params.k - 2);
  return (1.0 + (1.0 - params.a) * sh * sh) * ch * ipow(gamma, params.k);
}

PeakonSpec make_peakon(double gamma, const Params& p, PeakonDomain domain) {
  if (!std::isfinite(gamma)) throw std::invalid_argument("peakon amplitude must be finite");
  if (domain == PeakonDomain::circle && !periodic_peakon_admissible(p)) {
    throw ParamError("periodic peakon requires 6a + b + 2c = 3k (" + describe(p) + ")");
  }
  return PeakonSpec{gamma, p, domain};
}

double peakon_line_eval(const PeakonSpec& spec, double x, double t) {
  return spec.gamma * std::exp(-std::abs(x - spec.speed() * t));
}

double periodic_reduce(double x) { return x - 2.0 * kPi * std::floor(x / (2.0 * kPi)); }

double peakon_circle_eval(const PeakonSpec& spec, double x, double t) {
  if (spec.domain != PeakonDomain::circle || !periodic_peakon_admissible(spec.params)) {
    throw ParamError("peakon_circle_eval needs an admissible circle peakon");
  }
  return spec.gamma * std::cosh(periodic_reduce(x - spec.circle_speed() * t) - kPi);
}

double green_line(double x) { return 0.5 * std::exp(-std::abs(x)); }

double green_periodic(double x, double circumference) {
  if (!(circumference > 0.0)) throw std::invalid_argument("circumference must be positive");
  double d = std::fmod(std::abs(x), circumference);
  const double half = 0.5 * circumference;
  return std::cosh(d - half) / (2.0 * std::sinh(half));
}

ProfileShape profile_shape_from_string(std::string_view name) {
  if (name == "peakon") return ProfileShape::peakon;
  if (name == "exp_tail") return ProfileShape::exp_tail;
  if (name == "bump") return ProfileShape::bump;
  if (name == "sech") return ProfileShape::sech;
  if (name == "sine_bump") return ProfileShape::sine_bump;
  if (name == "sine") return ProfileShape::sine;
  if (name == "zero") return ProfileShape::zero;
  throw std::invalid_argument("unknown profile shape '" + std::string(name) + "'");
}

std::string_view to_string(ProfileShape shape) {
  switch (shape) {
    case ProfileShape::peakon: return "peakon";
    case ProfileShape::exp_tail: return "exp_tail";
    case ProfileShape::bump: return "bump";
    case ProfileShape::sech: return "sech";
    case ProfileShape::sine_bump: return "sine_bump";
    case ProfileShape::sine: return "sine";
    case ProfileShape::zero: return "zero";
  }
  return "?";
}

double smoothed_exponential(double x, double theta, double sigma) {
  const double s2 = sigma * std::numbers::sqrt2;
  const double ts = theta * sigma * sigma;
  const double pre = 0.5 * std::exp(0.5 * theta * theta * sigma * sigma);
  const double d = std::abs(x);
  double v = std::exp(-theta * d) * std::erfc((ts - d) / s2);
  // erfc(z) < 1e-296 beyond z = 26, and the Gaussian factor dominates exp(theta d).
  const double z = (ts + d) / s2;
  if (z < 26.0) v += std::exp(theta * d) * std::erfc(z);
  return pre * v;
}

double bump(double x, double width) {
  const double r = x / width;
  if (std::abs(r) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - r * r));
}

Field mollified_profile(const ProfileSpec& spec, const Grid& grid) {
  const double quarter = 0.25 * grid.length;
  const double sigma = spec.moll_width.value_or(3.0 * grid.dx());
  const bool smoothed = spec.shape == ProfileShape::peakon || spec.shape == ProfileShape::exp_tail;
  if (smoothed) {
    if (!(sigma > 0.0)) throw std::invalid_argument("mollifier width must be positive");
    if (sigma > quarter) throw std::invalid_argument("mollifier width exceeds a quarter of the box");
  }
  const bool bumped = spec.shape == ProfileShape::bump || spec.shape == ProfileShape::sine_bump;
  if (bumped && !(spec.width > 0.0 && spec.width <= quarter)) {
    throw std::invalid_argument("bump width must lie in (0, L/4]");
  }
  if (spec.shape == ProfileShape::exp_tail && !(spec.theta > 0.0)) {
    throw std::invalid_argument("exp_tail rate must be positive");
  }

  const double center = grid.center();
  const double L = grid.length;
  Field out(grid);
  for (int j = 0; j < grid.n; ++j) {
    const double x = grid.node(j) - center;
    double v = 0.0;
    switch (spec.shape) {
      case ProfileShape::peakon:
      case ProfileShape::exp_tail: {
        const double theta = spec.shape == ProfileShape::peakon ? 1.0 : spec.theta;
        // Nearest periodic images keep the sampled profile continuous across the seam.
        for (int image = -2; image <= 2; ++image) {
          v += smoothed_exponential(x + image * L, theta, sigma);
        }
        v *= spec.gamma;
        break;
      }
      case ProfileShape::bump:
        v = spec.gamma * bump(x, spec.width);
        break;
      case ProfileShape::sech:
        v = spec.gamma / std::cosh(x);
        break;
      case ProfileShape::sine_bump:
        v = spec.gamma * std::sin(x) * bump(x, spec.width);
        break;
      case ProfileShape::sine:
        v = spec.gamma * std::sin(grid.node(j));
        break;
      case ProfileShape::zero:
        break;
    }
    out[j] = v;
  }
  return out;
}

}  // namespace kabc
