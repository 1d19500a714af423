#include "fracheat/torus.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "fracheat/quadrature.hpp"
#include "fracheat/simd.hpp"

namespace fracheat {

namespace {

constexpr double pi = std::numbers::pi;
using cplx = std::complex<double>;

double mean_of(const TorusGrid& g, const std::vector<double>& v) {
    return simd::active().sum(v.data(), v.size()) * cell_volume(g);
}

double l2_norm(const TorusFunction& f) { return std::sqrt(grid_l2_squared(f.as_grid())); }

double lp_norm(const TorusFunction& f, double p) { return std::pow(p_norm_pow(f.as_grid(), p), 1.0 / p); }

void require_mean_zero(const TorusFunction& f, const char* what) {
    if (std::fabs(f.mean) > 1e-10 * std::max(1.0, l2_norm(f)))
        throw Error(ErrorKind::precondition, std::string(what) + " requires a mean-zero function");
}

TorusFunction apply(const TorusFunction& f, const std::function<double(double)>& m) {
    GridFunction out = apply_multiplier(f.as_grid(), radial(m));
    return TorusFunction::make(f.grid, std::move(out.values));
}

std::vector<double> multiply_spectra(const TorusFunction& a, const std::vector<double>& b) {
    SpectrumFunction A = forward_transform(a.as_grid());
    const SpectrumFunction B = forward_transform(GridFunction{a.grid, b});
    for (std::size_t i = 0; i < A.coefficients.size(); ++i) A.coefficients[i] *= B.coefficients[i];
    return inverse_transform(A).values;
}

// d/dx_axis with the i k convention; Nyquist modes dropped
std::vector<double> derivative(const TorusFunction& f, int axis) {
    SpectrumFunction F = forward_transform(f.as_grid());
    const int P = f.grid.points_per_dim;
    for (std::size_t i = 0; i < F.coefficients.size(); ++i) {
        const double k = F.frequency(i)[static_cast<std::size_t>(axis)];
        F.coefficients[i] *= (2 * std::fabs(k) == P) ? cplx(0.0) : cplx(0.0, k);
    }
    return inverse_transform(F).values;
}

// Real trigonometric polynomial sum_k c_k e^{2 pi i k x}, evaluated from k >= 0.
struct TrigPoly {
    std::vector<cplx> c;  // c[0..K]

    explicit TrigPoly(const TorusFunction& f) {
        const SpectrumFunction F = forward_transform(f.as_grid());
        const int P = f.grid.points_per_dim;
        const int K = (P - 1) / 2;
        c.assign(F.coefficients.begin(), F.coefficients.begin() + K + 1);
    }

    struct Value {
        double f, d1, d2;
    };

    // phases e^{2 pi i k x}, k = 0..K
    std::vector<cplx> phases(double x) const {
        std::vector<cplx> e(c.size());
        const cplx step = std::polar(1.0, 2.0 * pi * x);
        e[0] = 1.0;
        for (std::size_t k = 1; k < e.size(); ++k) e[k] = (k % 16 == 0) ? std::polar(1.0, 2.0 * pi * k * x) : e[k - 1] * step;
        return e;
    }

    Value at(double x) const {
        const auto e = phases(x);
        Value v{c[0].real(), 0.0, 0.0};
        for (std::size_t k = 1; k < c.size(); ++k) {
            const cplx t = c[k] * e[k];
            const double kk = static_cast<double>(k);
            v.f += 2.0 * t.real();
            v.d1 += -2.0 * kk * t.imag();
            v.d2 += -2.0 * kk * kk * t.real();
        }
        return v;
    }

    // values at a + delta with f measured from f(a), which is treated as 0
    Value offset(const std::vector<cplx>& ea, double delta) const {
        Value v{0.0, 0.0, 0.0};
        for (std::size_t k = 1; k < c.size(); ++k) {
            const double kk = static_cast<double>(k);
            const double th = 2.0 * pi * kk * delta;
            const double sh = std::sin(0.5 * th);
            const cplx em1(-2.0 * sh * sh, std::sin(th));
            const cplx base = c[k] * ea[k];
            const cplx full = base * (1.0 + em1);
            v.f += 2.0 * (base * em1).real();
            v.d1 += -2.0 * kk * full.imag();
            v.d2 += -2.0 * kk * kk * full.real();
        }
        return v;
    }
};

// scalar 1-D case with 1 < p < 2: integrate between the zeros of phi with
// x = a + u^m so that |phi|^{p-2} is integrable to full accuracy
KatoReport kato_scalar_zero_split(const TorusFunction& phi, double p) {
    const TrigPoly T(phi);
    const int K = static_cast<int>(T.c.size()) - 1;
    const int Q = 64 * std::max(K, 8);
    std::vector<double> zeros;
    double xa = -0.5;
    double fa = T.at(xa).f;
    for (int j = 1; j <= Q; ++j) {
        const double xb = -0.5 + static_cast<double>(j) / Q;
        const double fb = T.at(xb).f;
        if (fa == 0.0) {
            zeros.push_back(xa);
        } else if (fa * fb < 0.0) {
            double lo = xa, hi = xb, flo = fa;
            for (int it = 0; it < 80 && hi - lo > 1e-17; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = T.at(mid).f;
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        xa = xb;
        fa = fb;
    }

    double grad2 = 0.0, fmax = 0.0;
    for (int k = 1; k <= K; ++k) grad2 += 2.0 * k * k * std::norm(T.c[static_cast<std::size_t>(k)]);
    for (double v : phi.values) fmax = std::max(fmax, std::fabs(v));
    const double scale = grad2 * std::pow(fmax, p - 2.0);
    const double tol = 1e-12 * scale / std::max<std::size_t>(1, 2 * zeros.size());
    auto integrate = [tol](const Integrand& fn, double a, double b) {
        for (double t = tol;; t *= 10.0) {
            try {
                return integrate_adaptive(fn, a, b, t).value;
            } catch (const ConvergenceError&) {
                if (t >= 100.0 * tol) throw;
            }
        }
    };

    auto lhs_of = [p](const TrigPoly::Value& v) { return signed_pow(v.f, p - 1.0) * (-v.d2); };
    auto rhs_of = [p](const TrigPoly::Value& v) {
        const double a = std::fabs(v.f);
        return a < 1e-300 ? 0.0 : (p - 1.0) * std::exp((p - 2.0) * std::log(a)) * v.d1 * v.d1;
    };

    CompensatedSum lhs, rhs;
    if (zeros.empty()) {
        const double l = integrate([&](double x) { return lhs_of(T.at(x)); }, -0.5, 0.5);
        const double r = integrate([&](double x) { return rhs_of(T.at(x)); }, -0.5, 0.5);
        return KatoReport{l, r, l >= r - 1e-8 * std::fabs(r)};
    }
    const int m = std::max(2, static_cast<int>(std::ceil(2.0 / (p - 1.0))));
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        const double a = zeros[i];
        const double b = (i + 1 < zeros.size()) ? zeros[i + 1] : zeros[0] + 1.0;
        const double umax = std::pow(0.5 * (b - a), 1.0 / m);
        for (int side = 0; side < 2; ++side) {
            const double anchor = side == 0 ? a : b;
            const double dir = side == 0 ? 1.0 : -1.0;
            const auto ea = T.phases(anchor);
            auto integrand = [&](double u, bool left_side_lhs) {
                const double um1 = std::pow(u, m - 1);
                const auto v = T.offset(ea, dir * um1 * u);
                return (left_side_lhs ? lhs_of(v) : rhs_of(v)) * m * um1;
            };
            lhs.add(integrate([&](double u) { return integrand(u, true); }, 0.0, umax));
            rhs.add(integrate([&](double u) { return integrand(u, false); }, 0.0, umax));
        }
    }
    const double l = lhs.value(), r = rhs.value();
    return KatoReport{l, r, l >= r - 1e-8 * std::fabs(r)};
}

}  // namespace

TorusFunction TorusFunction::make(const TorusGrid& grid, std::vector<double> values) {
    if (values.size() != grid.total()) throw Error(ErrorKind::invalid_input, "torus values do not match the grid");
    TorusFunction f{grid, std::move(values), 0.0};
    f.mean = mean_of(grid, f.values);
    return f;
}

TorusFunction torus_sample(const TorusGrid& g, const std::function<double(double, double)>& fn) {
    GridFunction s = sample(g, fn);
    return TorusFunction::make(g, std::move(s.values));
}

TorusFunction random_torus_function(const TorusGrid& g, std::uint64_t seed, int max_mode, bool mean_zero) {
    if (max_mode < 1 || max_mode > g.modes_per_dim)
        throw Error(ErrorKind::invalid_input, "max_mode must lie in [1, modes_per_dim]");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    SpectrumFunction F = forward_transform(GridFunction{g, std::vector<double>(g.total(), 0.0)});
    const std::size_t P = static_cast<std::size_t>(g.points_per_dim);
    auto mirror = [&](std::size_t i) {
        if (g.dim == 1) return (P - i) % P;
        const std::size_t r = i / P, c = i % P;
        return ((P - r) % P) * P + (P - c) % P;
    };
    for (std::size_t i = 0; i < F.coefficients.size(); ++i) {
        const std::size_t j = mirror(i);
        if (j < i) continue;
        const double kn = F.frequency_norm(i);
        if (kn > max_mode || (mean_zero && kn == 0.0)) continue;
        const double re = normal(rng), im = normal(rng);
        if (j == i) {
            F.coefficients[i] = re;
        } else {
            F.coefficients[i] = cplx(re, im);
            F.coefficients[j] = cplx(re, -im);
        }
    }
    GridFunction v = inverse_transform(F);
    return TorusFunction::make(g, std::move(v.values));
}

TorusFunction torus_resample(const TorusFunction& f, int points_per_dim) {
    const TorusGrid g = TorusGrid::make(f.grid.dim, f.grid.modes_per_dim, points_per_dim);
    const SpectrumFunction F = forward_transform(f.as_grid());
    SpectrumFunction G = forward_transform(GridFunction{g, std::vector<double>(g.total(), 0.0)});
    const int Po = f.grid.points_per_dim, Pn = g.points_per_dim;
    auto old_index = [Po](int k) { return 2 * std::abs(k) >= Po ? -1 : (k < 0 ? k + Po : k); };
    for (int i = 0; i < (g.dim == 1 ? 1 : Pn); ++i)
        for (int j = 0; j < Pn; ++j) {
            const std::size_t dst = static_cast<std::size_t>(i) * Pn + j;
            const int b = old_index(g.mode(j));
            const int a = g.dim == 1 ? 0 : old_index(g.mode(i));
            if (a < 0 || b < 0) continue;
            G.coefficients[dst] = F.coefficients[static_cast<std::size_t>(a) * (g.dim == 1 ? 0 : Po) + b];
        }
    GridFunction v = inverse_transform(G);
    return TorusFunction::make(g, std::move(v.values));
}

TorusFunction torus_semigroup(const TorusFunction& f, double t, double s) {
    if (!(t >= 0.0)) throw Error(ErrorKind::domain, "torus_semigroup requires t >= 0");
    if (!(s > 0.0)) throw Error(ErrorKind::domain, "torus_semigroup requires s > 0");
    TorusFunction out = apply(f, [t, s](double k) { return std::exp(-t * std::pow(k, s)); });
    out.mean = f.mean;
    return out;
}

BernsteinReport torus_bernstein(const TorusFunction& f, double s, double p) {
    if (!(p > 1.0)) throw Error(ErrorKind::domain, "torus_bernstein requires p > 1");
    require_mean_zero(f, "torus_bernstein");
    return bernstein_functional(f.as_grid(), s, p);
}

DecayTrace mean_zero_decay_check(const TorusFunction& f, double s, double p, const std::vector<double>& t_grid) {
    if (!(s > 0.0 && s <= 2.0)) throw Error(ErrorKind::domain, "mean_zero_decay_check requires s in (0, 2]");
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::domain, "mean_zero_decay_check requires p in (1, inf)");
    require_mean_zero(f, "mean_zero_decay_check");
    if (t_grid.size() < 3 || t_grid.front() != 0.0)
        throw Error(ErrorKind::invalid_input, "t_grid must start at 0 and hold at least 3 times");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw Error(ErrorKind::invalid_input, "t_grid must increase");

    DecayTrace tr{p, s, t_grid, std::vector<double>(t_grid.size()), 0.0, true};
    for (std::size_t i = 0; i < t_grid.size(); ++i) tr.norms[i] = lp_norm(torus_semigroup(f, t_grid[i], s), p);
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    const double m = static_cast<double>(t_grid.size() - 1);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double y = std::log(tr.norms[i]);
        st += t_grid[i];
        sy += y;
        stt += t_grid[i] * t_grid[i];
        sty += t_grid[i] * y;
    }
    tr.fitted_rate = (m * sty - st * sy) / (m * stt - st * st);
    for (std::size_t i = 1; i < tr.norms.size(); ++i)
        if (tr.norms[i] > tr.norms[i - 1] * (1.0 + 1e-12)) tr.monotone = false;
    return tr;
}

IteratedDecay iterated_decay_check(const TorusFunction& f, double s, double p, double t0, int m_max) {
    if (!(t0 > 0.0) || m_max < 1) throw Error(ErrorKind::invalid_input, "iterated_decay_check needs t0 > 0, m_max >= 1");
    if (!(p > 1.0)) throw Error(ErrorKind::domain, "iterated_decay_check requires p > 1");
    require_mean_zero(f, "iterated_decay_check");
    IteratedDecay r;
    const double n0 = lp_norm(f, p);
    TorusFunction cur = f;
    double ncur = n0;
    for (int m = 1; m <= m_max; ++m) {
        TorusFunction next = torus_semigroup(cur, t0, s);
        const double nn = lp_norm(next, p);
        r.q = std::max(r.q, nn / ncur);
        r.ratios.push_back(lp_norm(torus_semigroup(f, m * t0, s), p) / n0);
        cur = std::move(next);
        ncur = nn;
    }
    r.holds = r.q < 1.0;
    for (int m = 1; m <= m_max; ++m)
        if (r.ratios[static_cast<std::size_t>(m - 1)] > std::pow(r.q, m) * (1.0 + 1e-10)) r.holds = false;
    return r;
}

SmallMeanReport small_mean_decay_check(const TorusFunction& f, double s, double lambda, double t0, int n_times) {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw Error(ErrorKind::domain, "lambda must lie in [0, 1)");
    if (!(s > 0.0)) throw Error(ErrorKind::domain, "small_mean_decay_check requires s > 0");
    if (!(t0 > 0.0) || n_times < 1) throw Error(ErrorKind::invalid_input, "small_mean_decay_check needs t0 > 0");
    const double n2 = grid_l2_squared(f.as_grid());
    if (!(n2 > 0.0)) throw Error(ErrorKind::degenerate_input, "small_mean_decay_check of the zero function");
    SmallMeanReport r;
    r.lambda_measured = std::fabs(f.mean) / std::sqrt(n2);
    if (r.lambda_measured > lambda + 1e-12)
        throw Error(ErrorKind::precondition, "mean ratio " + std::to_string(r.lambda_measured) + " exceeds lambda");
    const double m2 = f.mean * f.mean;
    r.bound_holds = true;
    r.alpha1 = INFINITY;
    for (int i = 1; i <= n_times; ++i) {
        const double t = t0 * i / n_times;
        const double lhs = grid_l2_squared(torus_semigroup(f, t, s).as_grid());
        const double rhs = std::exp(-r.c * t) * (n2 - m2) + m2;
        r.times.push_back(t);
        r.lhs.push_back(lhs);
        r.rhs.push_back(rhs);
        if (lhs > rhs * (1.0 + 1e-12) + 1e-300) r.bound_holds = false;
        r.alpha1 = std::min(r.alpha1, -0.5 * std::log(lhs / n2) / t);
    }
    return r;
}

double projection_cutoff(double xi) {
    const double a = std::fabs(xi);
    if (a <= 1.0) return 1.0;
    if (a >= 1.01) return 0.0;
    const double u = (a - 1.0) / 0.01;
    return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

TorusFunction projection_PN(const TorusFunction& f, int N) {
    if (N < 2) throw Error(ErrorKind::domain, "projection_PN requires N >= 2");
    if (2.02 * N > f.grid.modes_per_dim)
        throw Error(ErrorKind::resolution, "grid with M = " + std::to_string(f.grid.modes_per_dim) +
                                               " does not resolve 2.02 N for N = " + std::to_string(N));
    const double n = N;
    return apply(f, [n](double k) { return projection_cutoff(k / (2.0 * n)) - projection_cutoff(k / n); });
}

BernsteinReport localized_bernstein(const TorusFunction& f, double s, double p, int N) {
    if (!(s > 0.0 && s <= 2.0)) throw Error(ErrorKind::domain, "localized_bernstein requires s in (0, 2]");
    if (!(p > 1.0)) throw Error(ErrorKind::domain, "localized_bernstein requires p > 1");
    const TorusFunction g = projection_PN(f, N);
    const auto& k = simd::active();
    const double fmax = k.max_abs(f.values.data(), f.values.size());
    if (!(k.max_abs(g.values.data(), g.values.size()) > 1e-12 * fmax))
        throw Error(ErrorKind::degenerate_input, "P_N f vanishes for N = " + std::to_string(N));
    return bernstein_functional(g.as_grid(), s, p, static_cast<double>(N));
}

KatoReport kato_inequality_check(const TorusFunction& phi, double p) {
    if (!(p > 1.0)) throw Error(ErrorKind::domain, "kato_inequality_check requires p > 1");
    if (phi.grid.dim == 1 && p < 2.0) return kato_scalar_zero_split(phi, p);
    return kato_inequality_check(std::vector<TorusFunction>{phi}, p);
}

KatoReport kato_inequality_check(const std::vector<TorusFunction>& phi, double p) {
    if (!(p > 1.0)) throw Error(ErrorKind::domain, "kato_inequality_check requires p > 1");
    if (phi.empty()) throw Error(ErrorKind::invalid_input, "kato_inequality_check needs at least one component");
    const TorusGrid& g = phi.front().grid;
    for (const auto& c : phi)
        if (c.grid.dim != g.dim || c.grid.points_per_dim != g.points_per_dim)
            throw Error(ErrorKind::invalid_input, "components must share one grid");
    const std::size_t n = g.total();
    std::vector<double> mod2(n, 0.0), grad2(n, 0.0), lhs_density(n, 0.0);
    std::vector<std::vector<double>> lap;
    for (const auto& c : phi) {
        for (std::size_t i = 0; i < n; ++i) mod2[i] += c.values[i] * c.values[i];
        for (int a = 0; a < g.dim; ++a) {
            const auto d = derivative(c, a);
            for (std::size_t i = 0; i < n; ++i) grad2[i] += d[i] * d[i];
        }
        lap.push_back(fractional_laplacian(c.as_grid(), 2.0).values);  // = -Laplacian
    }
    CompensatedSum lhs, rhs;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::sqrt(mod2[i]);
        if (r < 1e-300) continue;
        const double w = std::exp((p - 2.0) * std::log(r));
        double acc = 0.0;
        for (std::size_t c = 0; c < phi.size(); ++c) acc += phi[c].values[i] * lap[c][i];
        lhs.add(w * acc);
        rhs.add(w * grad2[i]);
    }
    const double vol = cell_volume(g);
    KatoReport r{lhs.value() * vol, std::min(1.0, p - 1.0) * rhs.value() * vol, false};
    r.holds = r.lhs >= r.rhs - 1e-8 * std::fabs(r.rhs);
    return r;
}

JensenReport jensen_convolution_check(const TorusFunction& K, const TorusFunction& f, double p) {
    if (!(p > 1.0)) throw Error(ErrorKind::domain, "jensen_convolution_check requires p > 1");
    if (K.grid.dim != f.grid.dim || K.grid.points_per_dim != f.grid.points_per_dim)
        throw Error(ErrorKind::invalid_input, "K and f must share one grid");
    for (double v : K.values)
        if (v < -1e-12) throw Error(ErrorKind::precondition, "kernel must be nonnegative");
    if (std::fabs(K.mean - 1.0) > 1e-10) throw Error(ErrorKind::precondition, "kernel must have unit mass");
    const double fp = lp_norm(f, p);
    if (p >= 2.0 && std::fabs(fp - 1.0) > 1e-10)
        throw Error(ErrorKind::precondition, "p >= 2 branch requires ||f||_p = 1");

    std::vector<double> g(f.values.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::pow(std::fabs(f.values[i]), 0.5 * p);
    const TorusFunction Kf = TorusFunction::make(f.grid, multiply_spectra(K, f.values));
    const TorusFunction Kg = TorusFunction::make(f.grid, multiply_spectra(K, g));
    JensenReport r;
    r.lhs = lp_norm(Kf, p);
    const double kg = l2_norm(Kg);
    r.rhs = p >= 2.0 ? std::pow(kg, 2.0 / p) : std::pow(kg, 2.0 * (p - 1.0) / p) * std::pow(fp, 2.0 - p);
    r.holds = r.lhs <= r.rhs * (1.0 + 1e-8);
    return r;
}

TorusFunction torus_heat_kernel(const TorusGrid& g, double s, double t) {
    if (!(t > 0.0) || !(s > 0.0)) throw Error(ErrorKind::domain, "torus_heat_kernel requires s, t > 0");
    SpectrumFunction F = forward_transform(GridFunction{g, std::vector<double>(g.total(), 0.0)});
    for (std::size_t i = 0; i < F.coefficients.size(); ++i)
        F.coefficients[i] = std::exp(-t * std::pow(F.frequency_norm(i), s));
    GridFunction v = inverse_transform(F);
    return TorusFunction::make(g, std::move(v.values));
}

CaseSplitReport case_split_check(const TorusFunction& f, double s, double p) {
    CaseSplitReport r;
    r.raw = torus_bernstein(f, s, p).raw_value;
    std::vector<double> g(f.values.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = signed_pow(f.values[i], 0.5 * p);
    const TorusFunction G = TorusFunction::make(f.grid, std::move(g));
    r.projected_mass = grid_l2_squared(G.as_grid()) - G.mean * G.mean;
    r.constant = 4.0 * (p - 1.0) / (p * p);
    r.holds = r.projected_mass > 0.0 && r.raw >= r.constant * r.projected_mass * (1.0 - 1e-8);
    return r;
}

}  // namespace fracheat
