#include "fracheat/grid_fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>

#include "fracheat/simd.hpp"

namespace fracheat {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct PlanCache {
    std::mutex mu;
    std::map<std::pair<std::vector<int>, int>, fftw_plan> plans;
};

PlanCache& plan_cache() {
    static PlanCache c;
    return c;
}

fftw_plan get_plan(const std::vector<int>& dims, int sign) {
    auto& c = plan_cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto key = std::make_pair(dims, sign);
    auto it = c.plans.find(key);
    if (it != c.plans.end()) return it->second;
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    auto* buf_in = fftw_alloc_complex(total);
    auto* buf_out = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf_in, buf_out, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf_in);
    fftw_free(buf_out);
    c.plans.emplace(key, p);
    return p;
}

std::vector<int> fft_dims(const Grid& g) {
    if (const auto* r = std::get_if<RealGrid>(&g)) return {static_cast<int>(r->num_points)};
    const auto& t = std::get<TorusGrid>(g);
    return std::vector<int>(static_cast<std::size_t>(t.dim), t.points_per_dim);
}

// unnormalized DFT, sign -1 forward / +1 backward
void dft(const Grid& g, std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out,
         int sign) {
    fftw_plan p = get_plan(fft_dims(g), sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

// per-index signed modes (one axis)
std::vector<int> axis_modes(const Grid& g) {
    std::vector<int> k;
    if (const auto* r = std::get_if<RealGrid>(&g)) {
        const auto n = static_cast<long>(r->num_points);
        for (long i = 0; i < n; ++i) k.push_back(static_cast<int>(i < n / 2 ? i : i - n));
    } else {
        const auto& t = std::get<TorusGrid>(g);
        for (int i = 0; i < t.points_per_dim; ++i) k.push_back(t.mode(i));
    }
    return k;
}

// (-1)^k phase times scale, in FFT index order
std::vector<double> phase_factors(const Grid& g, double scale) {
    auto k = axis_modes(g);
    const std::size_t m = k.size();
    if (frequency_dim(g) == 1) {
        std::vector<double> f(m);
        for (std::size_t i = 0; i < m; ++i) f[i] = (k[i] % 2 == 0) ? scale : -scale;
        return f;
    }
    std::vector<double> f(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) f[i * m + j] = ((k[i] + k[j]) % 2 == 0) ? scale : -scale;
    return f;
}

std::vector<std::size_t> mirror_indices(const Grid& g) {
    const auto dims = fft_dims(g);
    const std::size_t m = static_cast<std::size_t>(dims[0]);
    if (dims.size() == 1) {
        std::vector<std::size_t> r(m);
        for (std::size_t i = 0; i < m; ++i) r[i] = (m - i) % m;
        return r;
    }
    std::vector<std::size_t> r(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) r[i * m + j] = ((m - i) % m) * m + (m - j) % m;
    return r;
}

std::vector<bool> nyquist_mask(const Grid& g) {
    const auto dims = fft_dims(g);
    const std::size_t m = static_cast<std::size_t>(dims[0]);
    const bool even = m % 2 == 0;
    const std::size_t ny = m / 2;
    if (dims.size() == 1) {
        std::vector<bool> r(m, false);
        if (even) r[ny] = true;
        return r;
    }
    std::vector<bool> r(m * m, false);
    if (even)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) r[i * m + j] = (i == ny || j == ny);
    return r;
}

void check_finite(const GridFunction& f) {
    if (f.values.size() != point_count(f.grid))
        throw Error(ErrorKind::invalid_input, "grid function length does not match its grid");
    for (double v : f.values)
        if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "grid function has non-finite values");
}

double max_abs_complex(const std::vector<std::complex<double>>& c) {
    double m = 0.0;
    for (const auto& z : c) m = std::max(m, std::abs(z));
    return m;
}

void require_hermitian(const Grid& g, const std::vector<std::complex<double>>& c, double rel_tol) {
    const double scale = max_abs_complex(c);
    if (scale == 0.0) return;
    const auto mir = mirror_indices(g);
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) worst = std::max(worst, std::abs(c[i] - std::conj(c[mir[i]])));
    if (worst > rel_tol * scale) {
        std::ostringstream os;
        os << "spectrum is not Hermitian (relative violation " << worst / scale << ")";
        throw Error(ErrorKind::symmetry, os.str());
    }
}

}  // namespace

RealGrid RealGrid::make(double half_width, std::size_t num_points) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw Error(ErrorKind::invalid_input, "grid half-width must be positive");
    if (num_points < 16 || !is_pow2(num_points))
        throw Error(ErrorKind::invalid_input, "grid size must be a power of two >= 16");
    return {half_width, num_points};
}

double RealGrid::frequency(std::size_t i) const {
    const auto n = static_cast<long>(num_points);
    const long k = static_cast<long>(i) < n / 2 ? static_cast<long>(i) : static_cast<long>(i) - n;
    return std::numbers::pi * static_cast<double>(k) / half_width;
}

TorusGrid TorusGrid::make(int dim, int modes_per_dim, int points_per_dim) {
    if (dim != 1 && dim != 2) throw Error(ErrorKind::invalid_input, "torus dimension must be 1 or 2");
    if (modes_per_dim < 8) throw Error(ErrorKind::invalid_input, "torus needs modes_per_dim >= 8");
    if (points_per_dim == 0) points_per_dim = 2 * modes_per_dim + 2;
    if (points_per_dim <= 2 * modes_per_dim)
        throw Error(ErrorKind::invalid_input, "torus points_per_dim must exceed 2 * modes_per_dim");
    return {dim, modes_per_dim, points_per_dim};
}

std::size_t TorusGrid::total() const {
    std::size_t p = static_cast<std::size_t>(points_per_dim);
    return dim == 1 ? p : p * p;
}

std::size_t point_count(const Grid& g) {
    if (const auto* r = std::get_if<RealGrid>(&g)) return r->num_points;
    return std::get<TorusGrid>(g).total();
}

int frequency_dim(const Grid& g) {
    if (std::holds_alternative<RealGrid>(g)) return 1;
    return std::get<TorusGrid>(g).dim;
}

double cell_volume(const Grid& g) {
    if (const auto* r = std::get_if<RealGrid>(&g)) return r->spacing();
    const auto& t = std::get<TorusGrid>(g);
    return std::pow(1.0 / t.points_per_dim, t.dim);
}

double SpectrumFunction::frequency_norm(std::size_t i) const {
    auto f = frequency(i);
    double s = 0.0;
    for (double v : f) s += v * v;
    return std::sqrt(s);
}

BandAnnulus BandAnnulus::make(double inner, double outer) {
    if (!(inner > 0.0) || !(outer > inner)) throw Error(ErrorKind::invalid_input, "band needs 0 < inner < outer");
    return {inner, outer};
}

Multiplier radial(std::function<double(double)> m) {
    return [m = std::move(m)](std::span<const double> xi) {
        double s = 0.0;
        for (double v : xi) s += v * v;
        return m(std::sqrt(s));
    };
}

GridFunction sample(const RealGrid& g, const std::function<double(double)>& fn) {
    GridFunction f{g, std::vector<double>(g.num_points)};
    for (std::size_t j = 0; j < g.num_points; ++j) f.values[j] = fn(g.x(j));
    return f;
}

GridFunction sample(const TorusGrid& g, const std::function<double(double, double)>& fn) {
    GridFunction f{g, std::vector<double>(g.total())};
    const int P = g.points_per_dim;
    if (g.dim == 1) {
        for (int j = 0; j < P; ++j) f.values[static_cast<std::size_t>(j)] = fn(g.x(j), 0.0);
    } else {
        for (int i = 0; i < P; ++i)
            for (int j = 0; j < P; ++j)
                f.values[static_cast<std::size_t>(i) * P + j] = fn(g.x(i), g.x(j));
    }
    return f;
}

SpectrumFunction forward_transform(const GridFunction& f) {
    check_finite(f);
    const std::size_t n = f.values.size();
    std::vector<std::complex<double>> in(f.values.begin(), f.values.end()), out(n);
    dft(f.grid, in, out, FFTW_FORWARD);
    const double vol = cell_volume(f.grid);
    auto fac = phase_factors(f.grid, vol);
    simd::active().scale_complex(out.data(), fac.data(), n);

    SpectrumFunction F;
    F.grid = f.grid;
    F.coefficients = std::move(out);
    F.freq_dim = frequency_dim(f.grid);
    F.frequencies.resize(n * static_cast<std::size_t>(F.freq_dim));
    if (const auto* r = std::get_if<RealGrid>(&f.grid)) {
        for (std::size_t i = 0; i < n; ++i) F.frequencies[i] = r->frequency(i);
    } else {
        auto k = axis_modes(f.grid);
        const std::size_t m = k.size();
        if (F.freq_dim == 1) {
            for (std::size_t i = 0; i < m; ++i) F.frequencies[i] = k[i];
        } else {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    F.frequencies[2 * (i * m + j)] = k[i];
                    F.frequencies[2 * (i * m + j) + 1] = k[j];
                }
        }
    }
    return F;
}

GridFunction inverse_transform(const SpectrumFunction& F) {
    const std::size_t n = point_count(F.grid);
    if (F.coefficients.size() != n) throw Error(ErrorKind::invalid_input, "spectrum length does not match its grid");
    for (const auto& z : F.coefficients)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw Error(ErrorKind::invalid_input, "spectrum has non-finite coefficients");
    require_hermitian(F.grid, F.coefficients, 1e-10);
    std::vector<std::complex<double>> in = F.coefficients, out(n);
    auto fac = phase_factors(F.grid, 1.0 / (static_cast<double>(n) * cell_volume(F.grid)));
    simd::active().scale_complex(in.data(), fac.data(), n);
    dft(F.grid, in, out, FFTW_BACKWARD);
    GridFunction f{F.grid, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) f.values[i] = out[i].real();
    return f;
}

std::vector<double> multiplier_values(const Grid& g, const Multiplier& m) {
    const std::size_t n = point_count(g);
    std::vector<double> vals(n);
    if (const auto* r = std::get_if<RealGrid>(&g)) {
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = r->frequency(i);
            vals[i] = m(std::span<const double>(&xi, 1));
        }
    } else {
        auto k = axis_modes(g);
        const std::size_t P = k.size();
        if (frequency_dim(g) == 1) {
            for (std::size_t i = 0; i < P; ++i) {
                const double xi = k[i];
                vals[i] = m(std::span<const double>(&xi, 1));
            }
        } else {
            for (std::size_t i = 0; i < P; ++i)
                for (std::size_t j = 0; j < P; ++j) {
                    const double xi[2] = {static_cast<double>(k[i]), static_cast<double>(k[j])};
                    vals[i * P + j] = m(std::span<const double>(xi, 2));
                }
        }
    }
    for (double v : vals)
        if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "multiplier not finite on grid frequencies");
    return vals;
}

GridFunction apply_multiplier_values(const GridFunction& f, const std::vector<double>& m,
                                     bool zero_nyquist) {
    check_finite(f);
    const std::size_t n = f.values.size();
    if (m.size() != n) throw Error(ErrorKind::invalid_input, "multiplier length does not match grid");
    std::vector<std::complex<double>> a(f.values.begin(), f.values.end()), b(n);
    dft(f.grid, a, b, FFTW_FORWARD);
    std::vector<double> mm(m);
    const auto mir = mirror_indices(f.grid);
    bool even = true;
    for (std::size_t i = 0; i < n && even; ++i)
        if (std::fabs(m[i] - m[mir[i]]) > 1e-14 * std::max(std::fabs(m[i]), std::fabs(m[mir[i]])))
            even = false;
    if (!even || zero_nyquist) {
        const auto ny = nyquist_mask(f.grid);
        for (std::size_t i = 0; i < n; ++i)
            if (ny[i]) mm[i] = 0.0;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : mm) v *= inv_n;
    simd::active().scale_complex(b.data(), mm.data(), n);
    if (!even) require_hermitian(f.grid, b, 1e-10);
    dft(f.grid, b, a, FFTW_BACKWARD);
    GridFunction g{f.grid, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) g.values[i] = a[i].real();
    return g;
}

GridFunction apply_multiplier(const GridFunction& f, const Multiplier& m) {
    auto vals = multiplier_values(f.grid, m);
    // the grid holds -xi_N only; compare against m(+xi_N)
    bool breaks = false;
    const auto ny = nyquist_mask(f.grid);
    for (std::size_t i = 0; i < vals.size() && !breaks; ++i) {
        if (!ny[i]) continue;
        std::vector<double> xi;
        if (const auto* r = std::get_if<RealGrid>(&f.grid)) {
            xi = {-r->frequency(i)};
        } else {
            const auto& t = std::get<TorusGrid>(f.grid);
            const std::size_t P = static_cast<std::size_t>(t.points_per_dim);
            if (t.dim == 1)
                xi = {-static_cast<double>(t.mode(static_cast<int>(i)))};
            else
                xi = {-static_cast<double>(t.mode(static_cast<int>(i / P))),
                      -static_cast<double>(t.mode(static_cast<int>(i % P)))};
        }
        const double flipped = m(std::span<const double>(xi.data(), xi.size()));
        if (std::fabs(flipped - vals[i]) > 1e-14 * std::max(std::fabs(flipped), std::fabs(vals[i])))
            breaks = true;
    }
    return apply_multiplier_values(f, vals, breaks);
}

GridFunction fractional_laplacian(const GridFunction& f, double s) {
    if (!(s > 0.0)) throw Error(ErrorKind::domain, "fractional_laplacian requires s > 0");
    return apply_multiplier(f, radial([s](double r) { return std::pow(r, s); }));
}

BandReport band_support_check(const GridFunction& f, const BandAnnulus& band, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorKind::domain, "band check tolerance must be positive");
    SpectrumFunction F = forward_transform(f);
    double all = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < F.coefficients.size(); ++i) {
        const double a = std::abs(F.coefficients[i]);
        all = std::max(all, a);
        const double r = F.frequency_norm(i);
        if (r < band.inner || r > band.outer) outside = std::max(outside, a);
    }
    if (all == 0.0) throw Error(ErrorKind::degenerate_input, "band check on the zero function");
    BandReport rep;
    rep.max_outside_ratio = outside / all;
    rep.pass = rep.max_outside_ratio <= tol;
    return rep;
}

double grid_integral(const GridFunction& f) {
    return simd::active().sum(f.values.data(), f.values.size()) * cell_volume(f.grid);
}

double grid_l2_squared(const GridFunction& f) {
    return simd::active().sum_squares(f.values.data(), f.values.size()) * cell_volume(f.grid);
}

double spectral_l2_squared(const SpectrumFunction& F) {
    double s = 0.0;
    for (const auto& z : F.coefficients) s += std::norm(z);
    // line: (1/2L) sum |F|^2 = sum |F|^2 / (n h); torus: sum |f^|^2
    return s / (static_cast<double>(point_count(F.grid)) * cell_volume(F.grid));
}

}  // namespace fracheat
