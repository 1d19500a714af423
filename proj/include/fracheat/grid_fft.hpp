#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "fracheat/errors.hpp"

namespace fracheat {

// Periodized line: points x_j = -L + j*(2L/n), j = 0..n-1.
struct RealGrid {
    double half_width = 1.0;
    std::size_t num_points = 16;

    static RealGrid make(double half_width, std::size_t num_points);
    double spacing() const { return 2.0 * half_width / static_cast<double>(num_points); }
    double x(std::size_t j) const { return -half_width + static_cast<double>(j) * spacing(); }
    // xi_k = pi k / L for FFT index i (k = i for i < n/2, else i - n)
    double frequency(std::size_t i) const;
};

// [-1/2, 1/2)^dim sampled at -1/2 + j/P per axis, row-major for dim = 2.
struct TorusGrid {
    int dim = 1;
    int modes_per_dim = 8;
    int points_per_dim = 18;

    static TorusGrid make(int dim, int modes_per_dim, int points_per_dim = 0);
    std::size_t total() const;
    double x(int j) const { return -0.5 + static_cast<double>(j) / points_per_dim; }
    // signed integer mode for FFT index i along one axis
    int mode(int i) const { return i <= (points_per_dim - 1) / 2 ? i : i - points_per_dim; }
};

using Grid = std::variant<RealGrid, TorusGrid>;

std::size_t point_count(const Grid& g);
int frequency_dim(const Grid& g);
// quadrature weight of one grid point (h on the line, P^-dim on the torus)
double cell_volume(const Grid& g);

struct GridFunction {
    Grid grid;
    std::vector<double> values;
};

struct SpectrumFunction {
    Grid grid;
    std::vector<std::complex<double>> coefficients;  // FFT index order
    std::vector<double> frequencies;                 // frequency_dim entries per coefficient
    int freq_dim = 1;

    std::span<const double> frequency(std::size_t i) const {
        return {frequencies.data() + i * static_cast<std::size_t>(freq_dim),
                static_cast<std::size_t>(freq_dim)};
    }
    double frequency_norm(std::size_t i) const;
};

struct BandAnnulus {
    double inner;
    double outer;
    static BandAnnulus make(double inner, double outer);
};

struct BandReport {
    double max_outside_ratio = 0.0;
    bool pass = false;
};

using Multiplier = std::function<double(std::span<const double>)>;

// m(|xi|) lifted to a Multiplier
Multiplier radial(std::function<double(double)> m);

GridFunction sample(const RealGrid& g, const std::function<double(double)>& fn);
GridFunction sample(const TorusGrid& g, const std::function<double(double, double)>& fn);

SpectrumFunction forward_transform(const GridFunction& f);
GridFunction inverse_transform(const SpectrumFunction& F);
GridFunction apply_multiplier(const GridFunction& f, const Multiplier& m);
// Multiplier given directly in FFT index order. Nyquist modes are zeroed when
// zero_nyquist is set or the values are not even under xi -> -xi.
GridFunction apply_multiplier_values(const GridFunction& f, const std::vector<double>& m,
                                     bool zero_nyquist = false);
std::vector<double> multiplier_values(const Grid& g, const Multiplier& m);
GridFunction fractional_laplacian(const GridFunction& f, double s);
BandReport band_support_check(const GridFunction& f, const BandAnnulus& band, double tol);

// grid quadrature of f (sum times cell volume)
double grid_integral(const GridFunction& f);
double grid_l2_squared(const GridFunction& f);
// sum over coefficients of |F|^2 with the Plancherel weight of the grid
double spectral_l2_squared(const SpectrumFunction& F);

}  // namespace fracheat
