#include "kabc/params.hpp"

#include <cmath>
#include <sstream>

namespace kabc {

namespace {

bool near(double lhs, double rhs) { return std::abs(lhs - rhs) <= kParamTolerance; }

}  // namespace

Params validate(int k, double a, double b, double c) {
  if (k <= 0) {
    throw ParamError("k must be a positive integer, got " + std::to_string(k));
  }
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw ParamError("parameters a, b, c must be finite");
  }
  if (a != 0.0 && k < 2) {
    throw ParamError("a != 0 requires k >= 2 (well-posedness hypothesis: a != 0 and k >= 2)");
  }
  // With k = 1 the F2 term carries u^{-1} u_x^3; only its vanishing keeps the
  // equation polynomial in u.
  if (k == 1 && !near(b + 2.0 * c, 3.0)) {
    throw ParamError("k = 1 requires b + 2c = 3 so that the u^{-1} u_x^3 term vanishes");
  }
  return Params{k, a, b, c};
}

Params preset(PresetName name, const PresetArgs& args) {
  switch (name) {
    case PresetName::ch:
      return validate(1, 0.0, 2.0, 0.5);
    case PresetName::dp:
      return validate(1, 0.0, 3.0, 0.0);
    case PresetName::novikov:
      return validate(2, 0.0, 3.0, 1.5);
    case PresetName::forq:
      return validate(2, 1.0 / 3.0, 2.0, 1.0);
    case PresetName::ab:
      return validate(2, args.a, args.b, (6.0 - 6.0 * args.a - args.b) / 2.0);
    case PresetName::gkbch:
      return validate(args.k, 0.0, args.b, (3.0 * args.k - args.b) / 2.0);
    case PresetName::bfam:
      return validate(1, 0.0, args.b, (3.0 - args.b) / 2.0);
  }
  throw ParamError("unknown preset");
}

PresetName preset_from_string(std::string_view name) {
  if (name == "ch") return PresetName::ch;
  if (name == "dp") return PresetName::dp;
  if (name == "novikov") return PresetName::novikov;
  if (name == "forq") return PresetName::forq;
  if (name == "ab") return PresetName::ab;
  if (name == "gkbch") return PresetName::gkbch;
  if (name == "bfam") return PresetName::bfam;
  throw ParamError("unknown preset name '" + std::string(name) + "'");
}

std::string_view to_string(PresetName name) {
  switch (name) {
    case PresetName::ch: return "ch";
    case PresetName::dp: return "dp";
    case PresetName::novikov: return "novikov";
    case PresetName::forq: return "forq";
    case PresetName::ab: return "ab";
    case PresetName::gkbch: return "gkbch";
    case PresetName::bfam: return "bfam";
  }
  return "?";
}

CoefficientSet coefficients(const Params& p) {
  const double k = p.k;
  CoefficientSet cs;
  cs.c_adv = 1.0;
  cs.c_cub = p.a;
  cs.c_f1_1 = p.b / (k + 1.0);
  cs.c_f1_2 = p.c;
  cs.c_f1_3 = -p.a * (k - 2.0);
  cs.c_f2_1 = k * (k + 2.0) - 8.0 * p.a - p.b - p.c * (k + 1.0);
  cs.c_f2_2 = -3.0 * p.a * (k - 2.0);
  return cs;
}

bool h1_conserved(const Params& p) {
  if (p.k == 2) {
    return near(9.0 * p.a + p.b + 4.0 * p.c, 9.0);
  }
  if (p.a != 0.0) {
    return false;
  }
  const double k = p.k;
  return near(2.0 * p.c + (2.0 / k) * (p.b + 2.0 * p.c - 3.0 * k) + 1.0, 2.0 * k);
}

bool h1_condition_is_extrapolated(const Params& p) { return p.k == 1; }

bool periodic_peakon_admissible(const Params& p) {
  return near(6.0 * p.a + p.b + 2.0 * p.c, 3.0 * p.k);
}

bool is_gkbch(const Params& p) {
  return p.a == 0.0 && near(p.c, (3.0 * p.k - p.b) / 2.0);
}

std::string describe(const Params& p) {
  std::ostringstream os;
  os.precision(17);
  os << "k=" << p.k << " a=" << p.a << " b=" << p.b << " c=" << p.c;
  return os.str();
}

}  // namespace kabc
