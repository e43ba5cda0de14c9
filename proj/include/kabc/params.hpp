#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kabc {

/// Raised for parameter quadruples outside the admissible family.
class ParamError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The quadruple (k, a, b, c) of the k-abc family.
///
/// Construct through validate() or preset(); a default-constructed value is
/// the Camassa-Holm member.
struct Params {
  int k = 1;
  double a = 0.0;
  double b = 2.0;
  double c = 0.5;

  friend bool operator==(const Params&, const Params&) = default;
};

/// Coefficients of every term of the nonlocal form
///   u_t + c_adv u^k u_x - c_cub u^{k-2} u_x^3 + d_x G*F1 + G*F2 = 0
/// with
///   F1 = c_f1_1 u^{k+1} + c_f1_2 u^{k-1} u_x^2 + c_f1_3 u^{k-3} u_x^4
///   F2 = c_f2_1 u^{k-2} u_x^3 + c_f2_2 u^{k-3} u_x^3 u_xx
struct CoefficientSet {
  double c_adv = 1.0;
  double c_cub = 0.0;
  double c_f1_1 = 0.0;
  double c_f1_2 = 0.0;
  double c_f1_3 = 0.0;
  double c_f2_1 = 0.0;
  double c_f2_2 = 0.0;

  friend bool operator==(const CoefficientSet&, const CoefficientSet&) = default;
};

/// Absolute tolerance used by the parameter identity predicates.
inline constexpr double kParamTolerance = 1e-12;

/// Checks the family invariants and returns the quadruple as Params.
///
/// Rejects k <= 0, a != 0 with k = 1, non-finite entries, and any k = 1
/// quadruple whose u^{-1} u_x^3 coefficient (3 - b - 2c) is nonzero.
Params validate(int k, double a, double b, double c);

enum class PresetName { ch, dp, novikov, forq, ab, gkbch, bfam };

/// Free sub-parameters of the parametric presets. Unused fields are ignored.
struct PresetArgs {
  int k = 1;
  double a = 0.0;
  double b = 0.0;
};

Params preset(PresetName name, const PresetArgs& args = {});

/// Lowercase config-file name ("ch", "dp", "novikov", "forq", "ab",
/// "gkbch", "bfam").
PresetName preset_from_string(std::string_view name);
std::string_view to_string(PresetName name);

CoefficientSet coefficients(const Params& p);

/// H^1 conservation predicate. The k = 1 case is an extrapolation of the
/// k >= 3 condition; see h1_condition_is_extrapolated().
bool h1_conserved(const Params& p);
bool h1_condition_is_extrapolated(const Params& p);

/// 6a + b + 2c = 3k, the condition for the periodic peakon.
bool periodic_peakon_admissible(const Params& p);

/// a = 0 and c = (3k - b)/2.
bool is_gkbch(const Params& p);

std::string describe(const Params& p);

}  // namespace kabc
