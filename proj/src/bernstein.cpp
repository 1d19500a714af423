#include "fracheat/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fracheat/closedform.hpp"
#include "fracheat/simd.hpp"

namespace fracheat {

namespace {

constexpr double pi = std::numbers::pi;

GridFunction zeros_like(const RealGrid& g) { return GridFunction{g, std::vector<double>(g.num_points, 0.0)}; }

GridFunction from_spectrum(const RealGrid& g, const std::function<double(double)>& spec) {
    SpectrumFunction F = forward_transform(zeros_like(g));
    for (std::size_t i = 0; i < F.coefficients.size(); ++i) F.coefficients[i] = spec(F.frequency_norm(i));
    return inverse_transform(F);
}

GridFunction convolve(const GridFunction& a, const GridFunction& b) {
    SpectrumFunction A = forward_transform(a);
    const SpectrumFunction B = forward_transform(b);
    for (std::size_t i = 0; i < A.coefficients.size(); ++i) A.coefficients[i] *= B.coefficients[i];
    return inverse_transform(A);
}

double rho(double z) { return z > 0.0 ? std::exp(-1.0 / z) : 0.0; }

}  // namespace

double signed_pow(double v, double e) {
    const double a = std::fabs(v);
    if (a < 1e-300) return 0.0;
    const double m = std::exp(e * std::log(a));
    return v < 0.0 ? -m : m;
}

double p_norm_pow(const GridFunction& f, double p) {
    CompensatedSum acc;
    for (double v : f.values) acc.add(std::fabs(signed_pow(v, p)));
    return acc.value() * cell_volume(f.grid);
}

BernsteinReport bernstein_functional(const GridFunction& f, double s, double p, std::optional<double> N) {
    if (!(p > 1.0)) throw Error(ErrorKind::domain, "bernstein_functional requires p > 1");
    if (!(s > 0.0)) throw Error(ErrorKind::domain, "bernstein_functional requires s > 0");
    if (N && !(*N > 0.0)) throw Error(ErrorKind::domain, "band scale N must be positive");
    const auto& k = simd::active();
    const std::size_t n = f.values.size();
    if (n == 0 || k.max_abs(f.values.data(), n) == 0.0)
        throw Error(ErrorKind::degenerate_input, "bernstein_functional of the zero function");
    const GridFunction lam = fractional_laplacian(f, s);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = signed_pow(f.values[i], p - 1.0);
    BernsteinReport r;
    r.s = s;
    r.p = p;
    r.band_scale_N = N;
    r.raw_value = k.dot(lam.values.data(), w.data(), n) * cell_volume(f.grid);
    r.p_norm_pow_p = p_norm_pow(f, p);
    r.ratio = r.raw_value / (std::pow(N.value_or(1.0), s) * r.p_norm_pow_p);
    return r;
}

GridFunction semigroup_apply_line(const GridFunction& f, double t, double s) {
    if (!(t >= 0.0)) throw Error(ErrorKind::domain, "semigroup time must be nonnegative");
    if (!(s > 0.0)) throw Error(ErrorKind::domain, "semigroup exponent must be positive");
    if (t == 0.0) return f;
    return apply_multiplier(f, radial([t, s](double r) { return std::exp(-t * std::pow(r, s)); }));
}

double f1(double x) { return std::log1p(x * x); }
double f1_d1(double x) { return 2.0 * x / (1.0 + x * x); }
double f1_d2(double x) {
    const double q = 1.0 + x * x;
    return 2.0 * (1.0 - x * x) / (q * q);
}
double f1_d4(double x) {
    const double x2 = x * x, q = 1.0 + x2;
    return -12.0 * (1.0 - 6.0 * x2 + x2 * x2) / (q * q * q * q);
}

double g_function(double x) {
    const double l = f1(x);
    return f1_d4(x) * l * l * l;
}

QuadratureResult g_integral(double a, double b) { return integrate_adaptive(g_function, a, b, 1e-12); }

LemmaA1Integrals lemma_a1_integrals() {
    constexpr double tol = 1e-11;
    auto half_line = [](const Integrand& f) {
        auto q = integrate_semi_infinite(f, Decay::algebraic(3.5), tol / 2);
        q.value *= 2.0;
        q.abs_error_estimate *= 2.0;
        return q;
    };
    LemmaA1Integrals out;
    const auto d = half_line(g_function);
    const auto a = half_line([](double x) {
        const double v = f1(x) * f1_d2(x);
        return 3.0 * v * v;
    });
    const auto b = half_line([](double x) {
        const double v = f1_d1(x) * f1_d1(x);
        return 2.0 * v * v;
    });
    out.I_direct = d.value;
    out.direct_error = d.abs_error_estimate;
    out.three_f2_fpp2 = a.value;
    out.two_fp4 = b.value;
    out.I_byparts = a.value - b.value;
    out.byparts_error = a.abs_error_estimate + b.abs_error_estimate;
    out.I_closed = closed_form_table().lemma_value;
    return out;
}

double f2(double x) { return x + std::exp(-x * x); }

double f2_derivative(int order, double x) {
    const double x2 = x * x;
    double H;
    if (order == 4)
        H = (16.0 * x2 - 48.0) * x2 + 12.0;
    else if (order == 8)
        H = (((256.0 * x2 - 3584.0) * x2 + 13440.0) * x2 - 13440.0) * x2 + 1680.0;
    else
        throw Error(ErrorKind::domain, "f2_derivative supports orders 4 and 8");
    return H * std::exp(-x2);
}

QuadratureResult f2_integral(int order) {
    auto f = [order](double x) {
        const double v = f2(x);
        return f2_derivative(order, x) * v * v * v;
    };
    return integrate_adaptive(f, -12.0, 12.0, 1e-10);
}

double bump_phi(double z) {
    const double t = std::fabs(z) - 1.0;
    const double a = rho(t), b = rho(1.0 - t);
    return 1.0 - a / (a + b);
}

namespace {

double I4(const GridFunction& f) { return bernstein_functional(f, 4.0, 4.0).raw_value; }

GridFunction truncated_f1(const RealGrid& g, double R) {
    return sample(g, [R](double x) { return f1(x) * bump_phi(x / R); });
}

GridFunction trim(const GridFunction& f, double eps) {
    SpectrumFunction F = forward_transform(f);
    for (std::size_t i = 0; i < F.coefficients.size(); ++i) {
        const double xi = F.frequency_norm(i);
        F.coefficients[i] *= bump_phi(eps * xi) * (1.0 - bump_phi(xi / eps));
    }
    return inverse_transform(F);
}

void check_resolution(const GridFunction& fR) {
    const SpectrumFunction F = forward_transform(fR);
    const std::size_t n = F.coefficients.size();
    double top = 0.0, all = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(F.coefficients[i]);
        all = std::max(all, a);
        if (i >= n / 4 && i < n - n / 4) top = std::max(top, a);
    }
    if (top > 1e-6 * all)
        throw Error(ErrorKind::resolution, "grid does not resolve the truncated profile spectrum");
}

void validate(const CounterexampleParams& p) {
    if (!(p.R0 >= 2.0)) throw Error(ErrorKind::invalid_input, "R0 must be at least 2");
    if (!(p.eps0 > 0.0 && p.eps0 <= 0.25)) throw Error(ErrorKind::invalid_input, "eps0 must lie in (0, 1/4]");
    if (p.N_list.empty()) throw Error(ErrorKind::invalid_input, "N_list is empty");
    for (std::size_t i = 0; i < p.N_list.size(); ++i)
        if (!(p.N_list[i] >= 4.0) || (i > 0 && !(p.N_list[i] > p.N_list[i - 1])))
            throw Error(ErrorKind::invalid_input, "N entries must be >= 4 and increasing");
    if (p.bump_profile != bump_profile_name) throw Error(ErrorKind::invalid_input, "unknown bump profile");
    if (!(4.0 * p.R0 <= p.half_width))
        throw Error(ErrorKind::resolution, "grid half-width must be at least 4 R0");
}

struct PsiFactor {
    double norm4 = 0.0, d2 = 0.0, d4 = 0.0;  // int psi^4, int psi'' psi^3, int psi'''' psi^3
};

PsiFactor psi_factor() {
    const RealGrid g = RealGrid::make(1024.0, std::size_t{1} << 14);
    const GridFunction psi = from_spectrum(g, [](double xi) {
        return xi > 0.5 && xi < 1.0 ? std::exp(-1.0 / (16.0 * (xi - 0.5) * (1.0 - xi))) : 0.0;
    });
    PsiFactor out;
    out.norm4 = p_norm_pow(psi, 4.0);
    // Lambda^2 = -d^2/dx^2
    out.d2 = -bernstein_functional(psi, 2.0, 4.0).raw_value;
    out.d4 = I4(psi);
    return out;
}

}  // namespace

ParamSelection select_counterexample_params(std::vector<double> N_list, double half_width,
                                            std::size_t num_points) {
    ParamSelection sel;
    sel.params.N_list = std::move(N_list);
    sel.params.half_width = half_width;
    sel.params.num_points = num_points;
    sel.I_f1 = closed_form_table().lemma_value;
    const RealGrid g = RealGrid::make(half_width, num_points);

    double R = 2.0, IR = 0.0;
    for (;;) {
        if (4.0 * R > half_width)
            throw Error(ErrorKind::construction_failed, "R0 rule not met before the truncation fills the grid");
        IR = I4(truncated_f1(g, R));
        sel.R_trace.emplace_back(R, IR);
        if (std::fabs(IR - sel.I_f1) <= 0.05 * std::fabs(sel.I_f1)) break;
        R *= 2.0;
    }
    sel.params.R0 = R;
    const GridFunction fR = truncated_f1(g, R);
    check_resolution(fR);
    double eps = 0.25;
    for (;;) {
        const double Ih = I4(trim(fR, eps));
        sel.eps_trace.emplace_back(eps, Ih);
        if (std::fabs(Ih - IR) <= 0.05 * std::fabs(IR)) break;
        eps *= 0.5;
        if (eps < 1e-12) throw Error(ErrorKind::construction_failed, "eps rule not met");
    }
    sel.params.eps0 = eps;
    return sel;
}

GridFunction counterexample_profile(const CounterexampleParams& params) {
    validate(params);
    const RealGrid g = RealGrid::make(params.half_width, params.num_points);
    const GridFunction fR = truncated_f1(g, params.R0);
    check_resolution(fR);
    return trim(fR, params.eps0);
}

Counterexample construct_counterexample(const CounterexampleParams& params, int dim) {
    if (dim != 1 && dim != 2) throw Error(ErrorKind::domain, "counterexample dimension must be 1 or 2");
    validate(params);
    Counterexample out;
    out.dim = dim;
    out.params = params;
    const RealGrid g = RealGrid::make(params.half_width, params.num_points);
    const GridFunction fR = truncated_f1(g, params.R0);
    check_resolution(fR);
    out.I_fR0 = I4(fR);
    const GridFunction h = trim(fR, params.eps0);
    out.I_h = I4(h);
    out.h_norm4 = p_norm_pow(h, 4.0);
    if (!(out.I_h < 0.0))
        throw Error(ErrorKind::construction_failed, "I(h) is not negative; use a smaller eps0 or larger R0");

    PsiFactor psi;
    double h_d2 = 0.0;
    if (dim == 2) {
        psi = psi_factor();
        h_d2 = -bernstein_functional(h, 2.0, 4.0).raw_value;
    }
    for (double N : params.N_list) {
        CounterexampleMember m;
        m.N = N;
        const double c = std::pow(N, 0.25);
        m.f.grid = RealGrid::make(params.half_width / N, params.num_points);
        m.f.values.resize(h.values.size());
        std::transform(h.values.begin(), h.values.end(), m.f.values.begin(), [c](double v) { return c * v; });
        m.report = bernstein_functional(m.f, 4.0, 4.0, N);
        m.ratio_1d = m.report.ratio;
        m.band = band_support_check(m.f, BandAnnulus::make(params.eps0 * N, 2.0 * N / params.eps0), 1e-10);
        if (dim == 2) {
            const double n4 = out.h_norm4;
            const double cross = 2.0 / (N * N) * (h_d2 / n4) * (psi.d2 / psi.norm4);
            const double top = psi.d4 / psi.norm4 / std::pow(N, 4);
            m.report.ratio = m.ratio_1d + cross + top;
            m.report.p_norm_pow_p = m.report.p_norm_pow_p * psi.norm4;
            m.report.raw_value = m.report.ratio * std::pow(N, 4) * m.report.p_norm_pow_p;
        }
        out.members.push_back(std::move(m));
    }
    return out;
}

const char* pipeline_name(Pipeline p) {
    switch (p) {
        case Pipeline::theorem_t1: return "theorem_t1";
        case Pipeline::large_p: return "large_p";
        default: return "small_p";
    }
}

WitnessCertificate certificate_from_counterexample(const Counterexample& c) {
    WitnessCertificate w;
    w.s = 4.0;
    w.p = 4.0;
    w.pipeline = Pipeline::theorem_t1;
    w.params = c.params;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& m : c.members) {
        lo = std::min(lo, m.report.ratio);
        hi = std::max(hi, m.report.ratio);
    }
    const RealGrid gc = RealGrid::make(c.params.half_width, c.params.num_points / 2);
    const GridFunction hc = trim(truncated_f1(gc, c.params.R0), c.params.eps0);
    const double rc = I4(hc) / p_norm_pow(hc, 4.0);
    const double rf = c.I_h / c.h_norm4;
    w.achieved_value = hi;
    w.error_budget = (hi - lo) + std::fabs(rf - rc);
    w.trace.half_width = c.params.half_width;
    w.trace.num_points = c.params.num_points;
    return w;
}

namespace {

struct Built {
    GridFunction psi;
    double l1 = 0.0, L0 = 0.0, w = 0.0, pairing = 0.0;
};

// Mollified sign pattern of K_s on |y| <= L0, normalized in L^p.
std::optional<Built> build_large_p(double s, double p, double L, std::size_t n) {
    const RealGrid g = RealGrid::make(L, n);
    const double h = g.spacing();
    GridFunction K = from_spectrum(g, [s](double xi) { return std::exp(-std::pow(xi, s)); });
    const double kmax = simd::active().max_abs(K.values.data(), n);
    for (double& v : K.values)
        if (std::fabs(v) < 1e-13 * kmax) v = 0.0;
    Built b;
    CompensatedSum l1;
    for (double v : K.values) l1.add(std::fabs(v) * h);
    b.l1 = l1.value();
    if (!(b.l1 > 1.0 + 1e-9)) return std::nullopt;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) { return std::fabs(g.x(a)) < std::fabs(g.x(c)); });
    const double target = 1.0 + 0.9 * (b.l1 - 1.0);
    double cum = 0.0;
    for (std::size_t i : order) {
        cum += std::fabs(K.values[i]) * h;
        if (cum > target) {
            b.L0 = std::fabs(g.x(i));
            break;
        }
    }

    GridFunction sg = zeros_like(g);
    double shortest = INFINITY;
    long run = 0;
    int prev = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double v = K.values[j];
        if (std::fabs(g.x(j)) > b.L0 || v == 0.0) continue;
        const int sgn = v > 0.0 ? 1 : -1;
        sg.values[j] = sgn;
        if (sgn == prev) {
            ++run;
        } else {
            if (prev != 0) shortest = std::min(shortest, run * h);
            prev = sgn;
            run = 1;
        }
    }
    if (prev != 0) shortest = std::min(shortest, run * h);
    b.w = shortest / 8.0;

    GridFunction bump = zeros_like(g);
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double y = g.x(j) / b.w;
        if (std::fabs(y) < 1.0) {
            bump.values[j] = std::exp(-1.0 / (1.0 - y * y));
            mass += bump.values[j] * h;
        }
    }
    if (mass == 0.0) {
        bump.values[n / 2] = 1.0 / h;
    } else {
        for (double& v : bump.values) v /= mass;
    }
    b.psi = convolve(sg, bump);
    for (double& v : b.psi.values) v = std::clamp(v, -1.0, 1.0);
    b.pairing = simd::active().dot(K.values.data(), b.psi.values.data(), n) * h;
    const double norm = std::pow(p_norm_pow(b.psi, p), 1.0 / p);
    for (double& v : b.psi.values) v /= norm;
    return b;
}

struct Scan {
    double t0 = 0.0, slope = 0.0, value = 0.0, lo = 0.0, hi = 0.0;
};

std::optional<Scan> scan_growth(const GridFunction& psi, double s, double p) {
    const std::vector<double> base = multiplier_values(psi.grid, radial([s](double r) { return std::pow(r, s); }));
    std::vector<double> m(base.size());
    auto flow = [&](double t) {
        for (std::size_t i = 0; i < base.size(); ++i) m[i] = std::exp(-t * base[i]);
        return apply_multiplier_values(psi, m);
    };
    constexpr int nt = 48;
    std::vector<double> ts(nt), norms(nt);
    for (int i = 0; i < nt; ++i) {
        ts[i] = std::pow(10.0, -4.0 + 4.0 * i / (nt - 1));
        norms[i] = p_norm_pow(flow(ts[i]), p);
    }
    int best = 0;
    double slope = -INFINITY;
    for (int i = 0; i + 1 < nt; ++i) {
        const double sl = (norms[i + 1] - norms[i]) / (ts[i + 1] - ts[i]);
        if (sl > slope) {
            slope = sl;
            best = i;
        }
    }
    if (!(slope > 0.0)) return std::nullopt;
    Scan out;
    out.slope = slope;
    out.lo = ts[best];
    out.hi = ts[best + 1];
    out.value = INFINITY;
    for (double t : {ts[best], std::sqrt(ts[best] * ts[best + 1]), ts[best + 1]}) {
        const double v = bernstein_functional(flow(t), s, p).raw_value;
        if (v < out.value) {
            out.value = v;
            out.t0 = t;
        }
    }
    return out;
}

double value_at(const GridFunction& psi, double t, double s, double p) {
    return bernstein_functional(semigroup_apply_line(psi, t, s), s, p).raw_value;
}

struct SmallBuilt {
    GridFunction psi;
    Built large;
    double pp = 0.0, pair1 = 0.0, pair2 = 0.0, Tpsi = 0.0;
};

std::optional<SmallBuilt> build_small_p(double s, double p, double L, std::size_t n) {
    SmallBuilt out;
    out.pp = p / (p - 1.0);
    auto lb = build_large_p(s, out.pp, L, n);
    if (!lb) return std::nullopt;
    out.large = *lb;
    const GridFunction& f = lb->psi;
    const GridFunction Tf = semigroup_apply_line(f, 1.0, s);
    out.psi = Tf;
    for (double& v : out.psi.values) v = signed_pow(v, out.pp - 1.0);
    const double norm = std::pow(p_norm_pow(out.psi, p), 1.0 / p);
    for (double& v : out.psi.values) v /= norm;
    const GridFunction Tpsi = semigroup_apply_line(out.psi, 1.0, s);
    const double h = cell_volume(f.grid);
    const auto& k = simd::active();
    out.pair1 = k.dot(out.psi.values.data(), Tf.values.data(), Tf.values.size()) * h;
    out.pair2 = k.dot(Tpsi.values.data(), f.values.data(), f.values.size()) * h;
    out.Tpsi = std::pow(p_norm_pow(Tpsi, p), 1.0 / p);
    return out;
}

void fill_trace(WitnessTrace& tr, const Built& b, const Scan& sc, double L, std::size_t n) {
    tr.half_width = L;
    tr.num_points = n;
    tr.kernel_l1 = b.l1;
    tr.L0 = b.L0;
    tr.mollify_width = b.w;
    tr.pairing = b.pairing;
    tr.t0 = sc.t0;
    tr.max_slope = sc.slope;
    tr.bracket_lo = sc.lo;
    tr.bracket_hi = sc.hi;
}

void check_s(double s) {
    if (!(s > 2.0))
        throw Error(ErrorKind::domain, "witness searches need s > 2; the inequality holds for 0 < s <= 2");
}

}  // namespace

std::optional<WitnessCertificate> witness_search_large_p(double s, double p, WitnessOptions opts) {
    check_s(s);
    if (!(p >= 4.0)) throw Error(ErrorKind::domain, "large-p search requires p >= 4");
    const double L = opts.half_width;
    const std::size_t n = opts.num_points;
    auto b = build_large_p(s, p, L, n);
    if (!b || !(b->pairing > 1.0)) return std::nullopt;
    auto sc = scan_growth(b->psi, s, p);
    if (!sc) return std::nullopt;
    WitnessCertificate w;
    w.s = s;
    w.p = p;
    w.pipeline = Pipeline::large_p;
    fill_trace(w.trace, *b, *sc, L, n);
    w.achieved_value = sc->value;
    auto coarse = build_large_p(s, p, L, n / 2);
    if (!coarse) return std::nullopt;
    w.error_budget = std::fabs(sc->value - value_at(coarse->psi, sc->t0, s, p));
    if (!w.certified()) return std::nullopt;
    if (opts.recertify) {
        auto fine = build_large_p(s, p, L, 2 * n);
        if (fine) {
            w.recert_value = value_at(fine->psi, sc->t0, s, p);
            w.recert_budget = std::fabs(w.recert_value - sc->value);
            w.recertified = w.recert_value + w.recert_budget < 0.0;
        }
    }
    return w;
}

std::optional<WitnessCertificate> witness_search_small_p(double s, double p, WitnessOptions opts) {
    check_s(s);
    if (!(p > 1.0 && p < 2.0)) throw Error(ErrorKind::domain, "small-p search requires 1 < p < 2");
    const double L = opts.half_width;
    const std::size_t n = opts.num_points;
    auto b = build_small_p(s, p, L, n);
    if (!b || !(b->large.pairing > 1.0) || !(b->Tpsi > 1.0)) return std::nullopt;
    auto sc = scan_growth(b->psi, s, p);
    if (!sc) return std::nullopt;
    WitnessCertificate w;
    w.s = s;
    w.p = p;
    w.pipeline = Pipeline::small_p;
    fill_trace(w.trace, b->large, *sc, L, n);
    w.trace.conjugate_p = b->pp;
    w.trace.pair_psi_Tf = b->pair1;
    w.trace.pair_Tpsi_f = b->pair2;
    w.trace.T_psi_norm = b->Tpsi;
    w.achieved_value = sc->value;
    auto coarse = build_small_p(s, p, L, n / 2);
    if (!coarse) return std::nullopt;
    w.error_budget = std::fabs(sc->value - value_at(coarse->psi, sc->t0, s, p));
    if (!w.certified()) return std::nullopt;
    if (opts.recertify) {
        auto fine = build_small_p(s, p, L, 2 * n);
        if (fine) {
            w.recert_value = value_at(fine->psi, sc->t0, s, p);
            w.recert_budget = std::fabs(w.recert_value - sc->value);
            w.recertified = w.recert_value + w.recert_budget < 0.0;
        }
    }
    return w;
}

}  // namespace fracheat
