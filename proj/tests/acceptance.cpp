// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "fracheat/bernstein.hpp"
#include "fracheat/closedform.hpp"
#include "fracheat/kernels.hpp"
#include "fracheat/torus.hpp"

using namespace fracheat;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TorusFunction scaled(const TorusFunction& f, double c, double shift = 0.0) {
    std::vector<double> v = f.values;
    for (double& x : v) x = c * x + shift;
    return TorusFunction::make(f.grid, std::move(v));
}

double lp(const TorusFunction& f, double p) { return std::pow(p_norm_pow(f.as_grid(), p), 1.0 / p); }

}  // namespace

int main() {
    criterion(1, "closed-form oracle", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const auto rep = quadrature_crosscheck(1e-8);
        const double secs = seconds_since(t0);
        const bool ok = rep.pass && rep.entries.size() == 9 && rep.max_abs_discrepancy <= 1e-8 && secs < 10.0;
        return Outcome{ok, fmt("%zu values, max |closed - quadrature| = %.2e (tol 1e-8), %.2f s (limit 10 s)",
                               rep.entries.size(), rep.max_abs_discrepancy, secs)};
    });

    criterion(2, "f1 functional three ways", [] {
        const auto L = lemma_a1_integrals();
        const double closed = -41.0 * pi / 6.0 + pi * pi * pi + std::log(4.0) * (-7.0 + std::log(64.0)) * pi;
        const double spread = std::max({std::fabs(L.I_direct - L.I_byparts), std::fabs(L.I_direct - L.I_closed),
                                        std::fabs(L.I_byparts - L.I_closed)});
        const bool printed = std::round(L.I_closed * 100.0) / 100.0 == -2.83;
        const bool ok = spread <= 1e-6 && std::fabs(L.I_closed - closed) < 1e-12 && printed;
        return Outcome{ok, fmt("direct %.10f, by parts %.10f, closed %.10f, spread %.1e (tol 1e-6), rounds to -2.83: %s",
                               L.I_direct, L.I_byparts, L.I_closed, spread, printed ? "yes" : "no")};
    });

    criterion(3, "f2 and g integrals", [] {
        const double a = f2_integral(4).value, b = f2_integral(8).value, g = 2.0 * g_integral(0.0, 10.0).value;
        const double ea = std::fabs(a / -2.47784 - 1.0), eb = std::fabs(b / -219.804 - 1.0), eg = std::fabs(g / -1.65835 - 1.0);
        const bool ok = ea <= 1e-3 && eb <= 1e-3 && eg <= 1e-4;
        return Outcome{ok, fmt("int f2''''f2^3 = %.6f (rel %.1e), int f2^(8) f2^3 = %.4f (rel %.1e), 2 int g = %.6f (rel %.1e)",
                               a, ea, b, eb, g, eg)};
    });

    criterion(4, "s = 4 counterexample family", [] {
        const auto t0 = std::chrono::steady_clock::now();
        const auto sel = select_counterexample_params({16.0, 32.0, 64.0, 128.0});
        const auto c = construct_counterexample(sel.params, 1);
        const auto cert = certificate_from_counterexample(c);
        const double secs = seconds_since(t0);
        bool ok = c.members.size() == 4 && cert.certified() && secs < 60.0;
        double lo = INFINITY, hi = -INFINITY, band = 0.0;
        for (const auto& m : c.members) {
            ok = ok && m.report.ratio + cert.error_budget < 0.0 && m.band.pass;
            lo = std::min(lo, m.report.ratio);
            hi = std::max(hi, m.report.ratio);
            band = std::max(band, m.band.max_outside_ratio);
        }
        const double rel = (hi - lo) / std::fabs(hi);
        ok = ok && rel <= 0.01;
        return Outcome{ok, fmt("R0 = %g, eps0 = %g, ratios in [%.6e, %.6e], budget %.1e, spread %.1e (tol 1%%), "
                               "band leak %.1e (tol 1e-10), n = %zu, %.1f s (limit 60 s)",
                               sel.params.R0, sel.params.eps0, lo, hi, cert.error_budget, rel, band,
                               sel.params.num_points, secs)};
    });

    criterion(5, "kernel positivity boundary", [] {
        bool ok = true;
        std::string d;
        double worst_pos = INFINITY;
        for (double s : {0.5, 1.0, 1.5, 2.0}) {
            const auto p = positivity_scan(s, 1, 40.0, 64);
            worst_pos = std::min(worst_pos, p.min_value);
            ok = ok && p.min_value >= -1e-9;
        }
        d += fmt("min over s<=2 = %.2e (>= -1e-9); certified negative:", worst_pos);
        for (auto [s, dim] : {std::pair{2.5, 1}, {3.0, 1}, {4.0, 1}, {6.0, 1}, {3.0, 2}, {4.0, 2}}) {
            const auto p = positivity_scan(s, dim, 40.0, 64);
            ok = ok && p.certified_negative;
            d += fmt(" K_%g,%d %.3e%s", s, dim, p.min_value, p.certified_negative ? "" : "(NOT)");
        }
        const double m4 = l1_mass(4.0, 1);
        ok = ok && m4 > 1.0 + 1e-4;
        d += fmt("; ||K_4,1||_1 = %.10f", m4);
        return Outcome{ok, d};
    });

    criterion(6, "second moment", [] {
        const auto m4 = second_moment(4.0, 1), m6 = second_moment(6.0, 1), m2 = second_moment(2.0, 1);
        const bool ok = !m4.divergent && !m6.divergent && std::fabs(m4.value) <= 1e-6 && std::fabs(m6.value) <= 1e-6 &&
                        std::fabs(m2.value - 2.0) <= 1e-8;
        return Outcome{ok, fmt("s=4: %.2e, s=6: %.2e (tol 1e-6); s=2: %.12f (2 within 1e-8)", m4.value, m6.value, m2.value)};
    });

    criterion(7, "Polya asymptotics", [] {
        bool ok = true;
        std::string d;
        for (double a : {1.5, 2.5, 3.0, 3.5}) {
            const auto o = polya_rescaled_eval(a, 40.0, PolyaMethod::oscillatory);
            const auto c = polya_rescaled_eval(a, 40.0, PolyaMethod::rotated_contour);
            const double lim = polya_limit(a);
            const double rel = std::fabs(c.value / lim - 1.0);
            const bool agree = std::fabs(o.value - c.value) <= o.abs_error_estimate + c.abs_error_estimate;
            ok = ok && rel <= 0.05 && agree;
            d += fmt("%salpha %g: %.6f vs %.6f (rel %.1e), |osc - contour| %.1e <= %.1e", d.empty() ? "" : "; ", a,
                     c.value, lim, rel, std::fabs(o.value - c.value), o.abs_error_estimate + c.abs_error_estimate);
        }
        return Outcome{ok, d};
    });

    criterion(8, "witness searches", [] {
        bool ok = true;
        std::string d;
        auto add = [&](const std::optional<WitnessCertificate>& c, double s, double p) {
            if (!c) {
                ok = false;
                d += fmt("%s(s=%g,p=%g) none", d.empty() ? "" : "; ", s, p);
                return;
            }
            const bool keep = c->recertified && c->recert_value + c->recert_budget < 0.0;
            ok = ok && c->certified() && keep;
            d += fmt("%s(s=%g,p=%g) %.4g+%.1e, 2n %.4g", d.empty() ? "" : "; ", s, p, c->achieved_value, c->error_budget,
                     c->recert_value);
        };
        for (double p : {20.0, 40.0}) add(witness_search_large_p(4.0, p), 4.0, p);
        for (double p : {1.05, 1.1}) add(witness_search_small_p(4.0, p), 4.0, p);
        return Outcome{ok, d};
    });

    criterion(9, "torus positive results", [] {
        const auto g = TorusGrid::make(1, 40, 160);
        std::vector<double> ts;
        for (int i = 0; i <= 10; ++i) ts.push_back(0.05 * i);
        bool ok = true;
        double min_ratio = INFINITY, min_loc = INFINITY, max_spread = 0.0, max_rate = -INFINITY;
        int monotone = 0, cases = 0;
        for (double s : {1.0, 2.0})
            for (double p : {1.5, 3.0, 4.0})
                for (int j = 0; j < 20; ++j) {
                    const auto f = random_torus_function(g, 1000 + j, 40);
                    const double r = torus_bernstein(f, s, p).ratio;
                    double lo = INFINITY, hi = -INFINITY;
                    for (int N : {4, 8, 16}) {
                        const double q = localized_bernstein(f, s, p, N).ratio;
                        lo = std::min(lo, q);
                        hi = std::max(hi, q);
                    }
                    const auto tr = mean_zero_decay_check(f, s, p, ts);
                    ++cases;
                    monotone += tr.monotone;
                    min_ratio = std::min(min_ratio, r);
                    min_loc = std::min(min_loc, lo);
                    if (lo > 0.0) max_spread = std::max(max_spread, hi / lo);
                    max_rate = std::max(max_rate, tr.fitted_rate);
                    ok = ok && r > 0.0 && lo > 0.0 && hi / lo <= 3.0 && tr.monotone && tr.fitted_rate < 0.0;
                }
        return Outcome{ok, fmt("%d cases: min ratio %.3g, min localized %.3g, max spread %.3f (<= 3), monotone %d/%d, "
                               "max fitted rate %.3f (< 0)",
                               cases, min_ratio, min_loc, max_spread, monotone, cases, max_rate)};
    });

    criterion(10, "Kato, Jensen and small-mean suites", [] {
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<int> modes(2, 12);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        bool ok = true;

        const auto g = TorusGrid::make(1, 16, 512);
        int kato_cases = 0, kato_ok = 0;
        double p2_gap = 0.0;
        for (int i = 0; i < 100; ++i) {
            const int m = modes(rng);
            const auto a = random_torus_function(g, 5000 + i, m, false);
            const std::vector<TorusFunction> v{random_torus_function(g, 6000 + i, m), random_torus_function(g, 7000 + i, m, false)};
            for (double p : {1.5, 2.0, 4.0}) {
                for (const auto& r : {kato_inequality_check(a, p), kato_inequality_check(v, p)}) {
                    ++kato_cases;
                    kato_ok += r.holds;
                    if (p == 2.0) p2_gap = std::max(p2_gap, std::fabs(r.lhs - r.rhs) / r.rhs);
                }
            }
        }
        ok = ok && kato_ok == kato_cases && p2_gap <= 1e-10;

        const auto gj = TorusGrid::make(1, 24, 128);
        int jensen_cases = 0, jensen_ok = 0;
        double worst_margin = INFINITY;
        for (int i = 0; i < 100; ++i) {
            const double ks = std::array{0.5, 1.0, 2.0}[i % 3];
            const double kt = std::array{0.01, 0.1, 1.0}[(i / 3) % 3];
            const auto K = torus_heat_kernel(gj, ks, kt);
            const auto raw = random_torus_function(gj, 8000 + i, modes(rng), false);
            for (double p : {2.0, 4.0, 1.5}) {
                const auto f = p >= 2.0 ? scaled(raw, 1.0 / lp(raw, p)) : scaled(raw, 0.1 + 10.0 * unit(rng));
                const auto r = jensen_convolution_check(K, f, p);
                ++jensen_cases;
                jensen_ok += r.holds;
                worst_margin = std::min(worst_margin, r.rhs / r.lhs);
            }
        }
        ok = ok && jensen_ok == jensen_cases;

        const auto gs = TorusGrid::make(1, 16, 64);
        int small_ok = 0;
        double max_lambda = 0.0, min_alpha = INFINITY;
        for (int i = 0; i < 50; ++i) {
            const auto z = random_torus_function(gs, 9000 + i, modes(rng));
            const double lam = 0.9 * unit(rng);
            const double c = lam * std::sqrt(grid_l2_squared(z.as_grid())) / std::sqrt(1.0 - lam * lam);
            const auto f = scaled(z, 1.0, unit(rng) < 0.5 ? c : -c);
            const double s = 0.25 + 1.75 * unit(rng);
            const auto r = small_mean_decay_check(f, s, 0.9);
            small_ok += r.bound_holds && r.alpha1 > 0.0;
            max_lambda = std::max(max_lambda, r.lambda_measured);
            min_alpha = std::min(min_alpha, r.alpha1);
        }
        ok = ok && small_ok == 50;
        return Outcome{ok, fmt("Kato %d/%d (p=2 max rel gap %.1e, tol 1e-10); Jensen %d/%d (min rhs/lhs %.6f); "
                               "small mean %d/50 (max lambda %.3f, min alpha1 %.3f)",
                               kato_ok, kato_cases, p2_gap, jensen_ok, jensen_cases, worst_margin, small_ok, max_lambda,
                               min_alpha)};
    });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
