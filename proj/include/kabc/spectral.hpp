#pragma once

#include <complex>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace kabc {

class GridMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform periodic grid x_j = j * dx on [0, length).
struct Grid {
  int n = 0;
  double length = 0.0;

  double dx() const { return length / n; }
  double node(int j) const { return j * dx(); }
  double center() const { return 0.5 * length; }
  /// Wavenumber of half-spectrum index m in [0, n/2].
  double wavenumber(int m) const;
  int half_size() const { return n / 2 + 1; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Throws std::invalid_argument unless n is even, n >= 8 and length > 0.
Grid make_grid(int n, double length);

/// Samples of a real periodic function on a Grid.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g) : grid(g), values(static_cast<std::size_t>(g.n), 0.0) {}
  Field(const Grid& g, std::vector<double> v);

  double& operator[](std::size_t j) { return values[j]; }
  double operator[](std::size_t j) const { return values[j]; }
  std::size_t size() const { return values.size(); }
  double max_abs() const;
  bool all_finite() const;
};

/// Samples f(x_j) at every node.
template <class F>
Field sample(const Grid& g, F&& f) {
  Field out(g);
  for (int j = 0; j < g.n; ++j) out[static_cast<std::size_t>(j)] = f(g.node(j));
  return out;
}

/// Unnormalized half spectrum, n/2 + 1 coefficients (FFTW r2c layout).
using Spectrum = std::vector<std::complex<double>>;

/// Smallest even integer >= (factors + 1) * n / 2.
int padded_size(int n, int factors);

/// Fourier transforms and multipliers on one grid.
///
/// Owns FFTW plans and scratch buffers for the base size and any padded sizes
/// requested. Not thread-safe; give each concurrent run its own instance.
class Spectral {
public:
  explicit Spectral(const Grid& grid);
  ~Spectral();
  Spectral(Spectral&&) noexcept;
  Spectral& operator=(Spectral&&) noexcept;
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const Grid& grid() const { return grid_; }

  Spectrum forward(std::span<const double> values);
  std::vector<double> inverse(const Spectrum& spec);

  Field transform_roundtrip(const Field& f);

  /// Multiplies by (i xi)^order; the Nyquist mode is zeroed for odd order.
  Field derivative(const Field& f, int order);
  Spectrum derivative(const Spectrum& spec, int order) const;

  /// (1 - d_x^2)^{-1}: multiplier 1 / (1 + xi^2).
  Field helmholtz_inverse(const Field& f);
  Spectrum helmholtz_inverse(const Spectrum& spec) const;

  /// d_x G * f: multiplier i xi / (1 + xi^2), Nyquist zeroed.
  Field green_dx_convolve(const Field& f);
  Spectrum green_dx_convolve(const Spectrum& spec) const;

  /// Alias-free pointwise product of 1..n factors, evaluated on a grid of
  /// padded_size(n, factors.size()) points and projected back.
  Field dealiased_product(std::span<const Field> factors);

  /// Trigonometric interpolant of spec sampled on m >= n points. The
  /// Nyquist coefficient is split evenly between +n/2 and -n/2.
  std::vector<double> to_padded(const Spectrum& spec, int m);
  void to_padded(const Spectrum& spec, int m, std::vector<double>& out);
  /// Projection of m >= n samples onto the base grid's modes |j| <= n/2.
  Spectrum from_padded(std::span<const double> values);
  void from_padded(std::span<const double> values, Spectrum& out);

  /// Discrete L^2-consistent H^s norm; at s = 1 it approximates
  /// (integral of u^2 + u_x^2)^{1/2}.
  double sobolev_norm(const Field& f, double s);
  double sobolev_norm(const Spectrum& spec, double s) const;

private:
  struct Plan;
  Plan& plan(int size);

  Grid grid_;
  std::map<int, std::unique_ptr<Plan>> plans_;
};

/// Discrete inner product dx * sum f_j g_j.
double inner_product(const Field& f, const Field& g);

}  // namespace kabc
