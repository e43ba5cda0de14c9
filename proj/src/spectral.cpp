#include "kabc/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace kabc {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

double Grid::wavenumber(int m) const { return 2.0 * std::numbers::pi * m / length; }

Grid make_grid(int n, double length) {
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("grid size must be even and >= 8, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("grid length must be positive and finite");
  }
  return Grid{n, length};
}

Field::Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != static_cast<std::size_t>(g.n)) {
    throw GridMismatch("field has " + std::to_string(values.size()) + " samples, grid has " +
                       std::to_string(g.n));
  }
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool Field::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

int padded_size(int n, int factors) {
  const int m = ((factors + 1) * n + 1) / 2;
  return m % 2 == 0 ? m : m + 1;
}

struct Spectral::Plan {
  int size;
  double* real;
  fftw_complex* spec;
  fftw_plan r2c;
  fftw_plan c2r;

  explicit Plan(int n) : size(n) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(n));
    spec = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    r2c = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(c2r);
    fftw_destroy_plan(r2c);
    fftw_free(spec);
    fftw_free(real);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void forward(std::span<const double> in, Spectrum& out) {
    std::copy(in.begin(), in.end(), real);
    fftw_execute(r2c);
    out.resize(static_cast<std::size_t>(size / 2 + 1));
    for (int m = 0; m <= size / 2; ++m) out[m] = {spec[m][0], spec[m][1]};
  }

  // Unnormalized: returns size * (samples of the interpolant).
  void inverse(const Spectrum& in, std::vector<double>& out) {
    for (int m = 0; m <= size / 2; ++m) {
      spec[m][0] = in[m].real();
      spec[m][1] = in[m].imag();
    }
    fftw_execute(c2r);
    out.assign(real, real + size);
  }
};

Spectral::Spectral(const Grid& grid) : grid_(make_grid(grid.n, grid.length)) {}
Spectral::~Spectral() = default;
Spectral::Spectral(Spectral&&) noexcept = default;
Spectral& Spectral::operator=(Spectral&&) noexcept = default;

Spectral::Plan& Spectral::plan(int size) {
  auto it = plans_.find(size);
  if (it == plans_.end()) {
    it = plans_.emplace(size, std::make_unique<Plan>(size)).first;
  }
  return *it->second;
}

Spectrum Spectral::forward(std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(grid_.n)) {
    throw GridMismatch("forward transform: sample count does not match grid");
  }
  Spectrum out;
  plan(grid_.n).forward(values, out);
  return out;
}

std::vector<double> Spectral::inverse(const Spectrum& spec) {
  std::vector<double> out;
  plan(grid_.n).inverse(spec, out);
  const double scale = 1.0 / grid_.n;
  for (double& v : out) v *= scale;
  return out;
}

Field Spectral::transform_roundtrip(const Field& f) {
  return Field(grid_, inverse(forward(f.values)));
}

Spectrum Spectral::derivative(const Spectrum& spec, int order) const {
  if (order < 0) throw std::invalid_argument("derivative order must be non-negative");
  Spectrum out(spec.size());
  const int half = grid_.n / 2;
  for (int m = 0; m <= half; ++m) {
    const std::complex<double> ik(0.0, grid_.wavenumber(m));
    std::complex<double> factor(1.0, 0.0);
    for (int i = 0; i < order; ++i) factor *= ik;
    out[m] = factor * spec[m];
  }
  if (order % 2 == 1) out[half] = 0.0;
  return out;
}

Field Spectral::derivative(const Field& f, int order) {
  return Field(grid_, inverse(derivative(forward(f.values), order)));
}

Spectrum Spectral::helmholtz_inverse(const Spectrum& spec) const {
  Spectrum out(spec.size());
  for (int m = 0; m <= grid_.n / 2; ++m) {
    const double xi = grid_.wavenumber(m);
    out[m] = spec[m] / (1.0 + xi * xi);
  }
  return out;
}

Field Spectral::helmholtz_inverse(const Field& f) {
  return Field(grid_, inverse(helmholtz_inverse(forward(f.values))));
}

Spectrum Spectral::green_dx_convolve(const Spectrum& spec) const {
  Spectrum out(spec.size());
  const int half = grid_.n / 2;
  for (int m = 0; m < half; ++m) {
    const double xi = grid_.wavenumber(m);
    out[m] = std::complex<double>(0.0, xi / (1.0 + xi * xi)) * spec[m];
  }
  out[half] = 0.0;
  return out;
}

Field Spectral::green_dx_convolve(const Field& f) {
  return Field(grid_, inverse(green_dx_convolve(forward(f.values))));
}

std::vector<double> Spectral::to_padded(const Spectrum& spec, int m) {
  std::vector<double> out;
  to_padded(spec, m, out);
  return out;
}

void Spectral::to_padded(const Spectrum& spec, int m, std::vector<double>& out) {
  const int n = grid_.n;
  if (m < n || m % 2 != 0) throw std::invalid_argument("padded size must be even and >= n");
  Plan& p = plan(m);
  const double scale = static_cast<double>(m) / n;
  if (m == n) {
    p.inverse(spec, out);
    for (double& v : out) v *= 1.0 / n;
    return;
  }
  for (int j = 0; j < n / 2; ++j) {
    const std::complex<double> z = spec[j] * scale;
    p.spec[j][0] = z.real();
    p.spec[j][1] = z.imag();
  }
  p.spec[n / 2][0] = 0.5 * scale * spec[n / 2].real();
  p.spec[n / 2][1] = 0.0;
  for (int j = n / 2 + 1; j <= m / 2; ++j) p.spec[j][0] = p.spec[j][1] = 0.0;
  fftw_execute(p.c2r);
  out.assign(p.real, p.real + m);
  for (double& v : out) v /= m;
}

Spectrum Spectral::from_padded(std::span<const double> values) {
  Spectrum out;
  from_padded(values, out);
  return out;
}

void Spectral::from_padded(std::span<const double> values, Spectrum& out) {
  const int n = grid_.n;
  const int m = static_cast<int>(values.size());
  if (m < n || m % 2 != 0) throw std::invalid_argument("padded size must be even and >= n");
  Plan& p = plan(m);
  if (m == n) {
    p.forward(values, out);
    return;
  }
  std::copy(values.begin(), values.end(), p.real);
  fftw_execute(p.r2c);
  out.resize(static_cast<std::size_t>(n / 2 + 1));
  const double scale = static_cast<double>(n) / m;
  for (int j = 0; j < n / 2; ++j) out[j] = std::complex<double>(p.spec[j][0], p.spec[j][1]) * scale;
  // Modes +n/2 and -n/2 both alias to the base grid's Nyquist mode.
  out[n / 2] = 2.0 * scale * p.spec[n / 2][0];
}

Field Spectral::dealiased_product(std::span<const Field> factors) {
  if (factors.empty()) throw std::invalid_argument("dealiased_product needs at least one factor");
  for (const Field& f : factors) {
    if (!(f.grid == grid_)) throw GridMismatch("dealiased_product: factor on a different grid");
  }
  const int m = padded_size(grid_.n, static_cast<int>(factors.size()));
  std::vector<double> acc(static_cast<std::size_t>(m), 1.0);
  for (const Field& f : factors) {
    const auto padded = to_padded(forward(f.values), m);
    for (int j = 0; j < m; ++j) acc[j] *= padded[j];
  }
  return Field(grid_, inverse(from_padded(acc)));
}

double Spectral::sobolev_norm(const Spectrum& spec, double s) const {
  if (s < 0.0) throw std::invalid_argument("sobolev order must be non-negative");
  const int half = grid_.n / 2;
  double sum = 0.0;
  for (int m = 0; m <= half; ++m) {
    const double xi = grid_.wavenumber(m);
    const double weight = (m == 0 || m == half) ? 1.0 : 2.0;
    sum += weight * std::pow(1.0 + xi * xi, s) * std::norm(spec[m]);
  }
  return std::sqrt(sum * grid_.length) / grid_.n;
}

double Spectral::sobolev_norm(const Field& f, double s) {
  return sobolev_norm(forward(f.values), s);
}

double inner_product(const Field& f, const Field& g) {
  if (!(f.grid == g.grid)) throw GridMismatch("inner_product: fields on different grids");
  double sum = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) sum += f[j] * g[j];
  return sum * f.grid.dx();
}

}  // namespace kabc
