#include "fracheat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "fracheat/grid_fft.hpp"

namespace fracheat {

namespace {

constexpr double pi = std::numbers::pi;

void check_params(double s, int dim) {
    if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::domain, "kernel exponent s must be positive");
    if (dim < 1 || dim > 3) throw Error(ErrorKind::domain, "kernel dimension must be 1, 2 or 3");
}

QuadratureResult scaled(QuadratureResult r, double c) {
    r.value *= c;
    r.abs_error_estimate *= std::fabs(c);
    return r;
}

// first t with e^{-t^s} * w <= tol
double exp_cutoff(double s, double w, double tol) {
    const double l = std::log(std::max(w / tol, 1.0 + 1e-12));
    return std::pow(l, 1.0 / s);
}

// Retries with a looser tolerance when the requested one sits below the
// roundoff floor of the rule.
template <class F>
QuadratureResult with_floor(F&& run, double tol, double max_tol) {
    for (;;) {
        try {
            return run(tol);
        } catch (const ConvergenceError& e) {
            if (tol * 10.0 > max_tol) throw;
            tol *= 10.0;
        }
    }
}

constexpr double contour_half_periods = 128.0;

QuadratureResult kernel_1d(double s, double r, double abs_tol) {
    const double itol = pi * abs_tol;
    auto env = [s](double t) { return std::exp(-std::pow(t, s)); };
    if (r == 0.0) {
        auto q = integrate_semi_infinite(env, Decay::exponential(s), itol);
        return scaled(q, 1.0 / pi);
    }
    const double T = exp_cutoff(s, 4.0 * pi / std::min(r, 1.0), itol);
    const double half_periods = r * T / pi;
    if (half_periods < 0.5) {
        auto f = [s, r](double t) { return std::exp(-std::pow(t, s)) * std::cos(r * t); };
        return scaled(integrate_semi_infinite(f, Decay::exponential(s), itol), 1.0 / pi);
    }
    if (half_periods > contour_half_periods && r >= 1.0) {
        const double xs = std::pow(r, s + 1.0);
        auto run = [&](double tol) { return contour_integral(s, r, contour_angle(s), tol); };
        auto q = with_floor(run, std::min(itol * xs, 1e-10), std::max(itol * xs, 1e-6));
        return scaled(q, 1.0 / (pi * xs));
    }
    auto q = integrate_oscillatory(env, r, itol);
    return scaled(q, 1.0 / pi);
}

QuadratureResult kernel_2d(double s, double r, double abs_tol) {
    const double itol = 2.0 * pi * abs_tol;
    if (r == 0.0) {
        auto f = [s](double t) { return t * std::exp(-std::pow(t, s)); };
        return scaled(integrate_semi_infinite(f, Decay::exponential(s), itol), 1.0 / (2.0 * pi));
    }
    double jtol = std::min(5e-14, 0.1 * itol);
    jtol = std::max(jtol, 2e-15);
    auto f = [s, r, jtol](double t) {
        const double e = std::exp(-std::pow(t, s));
        if (e == 0.0) return 0.0;
        return t * e * bessel_j0_eval(r * t, jtol).value;
    };
    return scaled(integrate_semi_infinite(f, Decay::exponential(s), itol), 1.0 / (2.0 * pi));
}

QuadratureResult kernel_3d(double s, double r, double abs_tol) {
    const double c = 1.0 / (2.0 * pi * pi);
    if (r == 0.0) {
        auto f = [s](double t) { return t * t * std::exp(-std::pow(t, s)); };
        return scaled(integrate_semi_infinite(f, Decay::exponential(s), abs_tol / c), c);
    }
    if (r <= 1.0) {
        auto f = [s, r](double t) {
            const double x = r * t;
            const double sinc = x < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
            return t * t * std::exp(-std::pow(t, s)) * sinc;
        };
        return scaled(integrate_semi_infinite(f, Decay::exponential(s), abs_tol / c), c);
    }
    auto env = [s](double t) { return t * std::exp(-std::pow(t, s)); };
    const double peak = std::pow(1.0 / s, 1.0 / s);
    auto q = integrate_oscillatory(env, r, abs_tol * r / c, Phase::sine, peak);
    return scaled(q, c / r);
}

}  // namespace

QuadratureResult bessel_j0_eval(double z, double abs_tol) {
    auto f = [z](double t) { return std::cos(z * std::sin(t)); };
    const double c = 2.0 / pi;
    auto q = integrate_adaptive(f, 0.0, pi / 2.0, abs_tol / c, 20000);
    return scaled(q, c);
}

double bessel_j0(double z) { return bessel_j0_eval(z).value; }

QuadratureResult kernel_eval(double s, int dim, double r, double abs_tol) {
    check_params(s, dim);
    if (!(r >= 0.0) || !std::isfinite(r)) throw Error(ErrorKind::domain, "kernel radius must be nonnegative");
    if (!(abs_tol > 0.0)) throw Error(ErrorKind::domain, "abs_tol must be positive");
    auto run = [&](double tol) {
        switch (dim) {
            case 1: return kernel_1d(s, r, tol);
            case 2: return kernel_2d(s, r, tol);
            default: return kernel_3d(s, r, tol);
        }
    };
    return with_floor(run, abs_tol, std::max(1e4 * abs_tol, 1e-9));
}

double kernel_value(double s, int dim, double r) {
    auto q = kernel_eval(s, dim, r, 5e-11);
    if (q.abs_error_estimate > 1e-10)
        throw ConvergenceError("kernel value not certified to 1e-10", q);
    return q.value;
}

double scaled_kernel_value(double s, int dim, double tau, double r) {
    if (!(tau > 0.0)) throw Error(ErrorKind::domain, "tau must be positive");
    const double c = std::pow(tau, -1.0 / s);
    return std::pow(c, dim) * kernel_value(s, dim, c * r);
}

double contour_angle(double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorKind::domain, "alpha must be positive");
    if (alpha <= 1.0) return alpha * pi / 2.0;
    return 0.9 * std::min(pi / (2.0 * alpha), pi / 2.0);
}

QuadratureResult contour_integral(double alpha, double x, double theta, double abs_tol) {
    if (!(alpha > 0.0)) throw Error(ErrorKind::domain, "alpha must be positive");
    if (!(x > 0.0)) throw Error(ErrorKind::domain, "x must be positive");
    if (!(theta >= 0.0) || theta > pi / 2.0 || theta > alpha * pi)
        throw Error(ErrorKind::invalid_angle, "contour ray does not give a decaying integrand");
    const double a = theta / alpha;
    const double xa = std::pow(x, -alpha);
    const std::complex<double> rot_u = std::polar(1.0, theta);
    const std::complex<double> rot_w = std::polar(1.0, a);
    const std::complex<double> I(0.0, 1.0);
    Decay decay = std::sin(a) > 1e-3 ? Decay::exponential(1.0, std::sin(a))
                                     : Decay::exponential(alpha, xa * std::cos(theta));
    if (alpha <= 1.0) {
        // u = rho e^{i theta}: e^{i theta} exp(i rho^{1/alpha} e^{i theta/alpha} - x^-alpha rho e^{i theta})
        auto f = [=](double rho) {
            const auto e = std::exp(I * std::pow(rho, 1.0 / alpha) * rot_w - xa * rho * rot_u);
            return std::imag(rot_u * e);
        };
        Decay d = std::sin(a) > 1e-3 ? Decay::exponential(1.0 / alpha, std::sin(a))
                                     : Decay::exponential(1.0, xa * std::cos(theta));
        return integrate_semi_infinite(f, d, abs_tol);
    }
    // rho = v^alpha removes the v^{1/alpha} branch point from the phase
    auto f = [=](double v) {
        if (v == 0.0) return 0.0;
        const auto e = std::exp(I * v * rot_w - xa * std::pow(v, alpha) * rot_u);
        return alpha * std::pow(v, alpha - 1.0) * std::imag(rot_u * e);
    };
    return integrate_semi_infinite(f, decay, abs_tol);
}

QuadratureResult polya_rescaled_eval(double alpha, double x, PolyaMethod method, double abs_tol) {
    if (!(alpha > 0.0)) throw Error(ErrorKind::domain, "alpha must be positive");
    if (!(x >= 1.0)) throw Error(ErrorKind::domain, "polya_rescaled requires x >= 1");
    if (method == PolyaMethod::rotated_contour) {
        auto run = [&](double tol) { return contour_integral(alpha, x, contour_angle(alpha), tol); };
        return with_floor(run, abs_tol, std::max(1e4 * abs_tol, 1e-6));
    }
    const double xs = std::pow(x, alpha + 1.0);
    auto env = [alpha](double t) { return std::exp(-std::pow(t, alpha)); };
    auto run = [&](double tol) { return integrate_oscillatory(env, x, tol); };
    auto q = with_floor(run, std::max(abs_tol / xs, 2e-14), 1e-9);
    return scaled(q, xs);
}

double polya_rescaled(double alpha, double x, PolyaMethod method) {
    return polya_rescaled_eval(alpha, x, method).value;
}

double polya_limit(double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorKind::domain, "alpha must be positive");
    return gamma_fn(alpha + 1.0) * std::sin(pi * alpha / 2.0);
}

namespace {

double surface_factor(int dim) {
    switch (dim) {
        case 1: return 2.0;
        case 2: return 2.0 * pi;
        default: return 4.0 * pi;
    }
}

// omega_d int_0^inf r^{d-1+extra} g(K(r)) dr over panels [0, 16], [16, 32], ... until the
// power-law tail estimate from |K| ~ r^{-d-s} drops below tolerance.
QuadratureResult radial_panels(double s, int dim, int extra, bool absolute, double abs_tol) {
    constexpr double inner_tol = 1e-13;
    const double w = surface_factor(dim);
    const int p = dim - 1 + extra;
    const double max_R = dim == 1 ? std::ldexp(1.0, 64) : 4096.0;
    auto f = [&](double r) {
        const double k = kernel_eval(s, dim, r, inner_tol).value;
        return w * std::pow(r, p) * (absolute ? std::fabs(k) : k);
    };
    CompensatedSum value, err;
    long evals = 0;
    double left = 0.0, R = 16.0;
    for (int k = 1;; ++k) {
        auto q = integrate_adaptive(f, left, R, 0.25 * abs_tol / (k * k), 20000);
        value.add(q.value);
        err.add(q.abs_error_estimate);
        evals += q.evaluations;
        const double kR = std::fabs(kernel_eval(s, dim, R, inner_tol).value);
        const double decay = s - extra;
        const double tail = decay > 0.0 ? w * kR * std::pow(R, dim + extra) / decay : INFINITY;
        if (tail <= 0.5 * abs_tol) return {value.value(), err.value() + tail, evals, true};
        if (R >= max_R)
            throw ConvergenceError("radial tail not below tolerance at the largest panel",
                                   QuadratureResult{value.value(), err.value() + tail, evals, false});
        left = R;
        R *= 2.0;
    }
}

}  // namespace

QuadratureResult l1_mass_eval(double s, int dim, double abs_tol) {
    check_params(s, dim);
    return radial_panels(s, dim, 0, true, abs_tol);
}

double l1_mass(double s, int dim) {
    auto q = l1_mass_eval(s, dim);
    if (q.abs_error_estimate > 1e-8) throw ConvergenceError("l1 mass not certified to 1e-8", q);
    return q.value;
}

SecondMoment second_moment(double s, int dim) {
    check_params(s, dim);
    if (s < 2.0) return {NAN, NAN, true};
    if (s == 2.0) {
        // Gaussian e^{-r^2/4}/(4 pi)^{d/2}
        const double c = std::pow(4.0 * pi, -0.5 * dim) * surface_factor(dim);
        auto f = [&](double r) { return c * std::pow(r, dim + 1) * std::exp(-r * r / 4.0); };
        auto q = integrate_semi_infinite(f, Decay::exponential(2.0, 0.25), 1e-12);
        return {q.value, q.abs_error_estimate, false};
    }
    auto q = radial_panels(s, dim, 2, false, 1e-8);
    return {q.value, q.abs_error_estimate, false};
}

KernelProfile positivity_scan(double s, int dim, double r_max, int n_samples, bool with_moments) {
    check_params(s, dim);
    if (n_samples < 64) throw Error(ErrorKind::precondition, "positivity_scan needs n_samples >= 64");
    if (!(r_max > 0.0)) throw Error(ErrorKind::domain, "r_max must be positive");
    constexpr double tol = 5e-11;

    KernelProfile prof;
    prof.s = s;
    prof.dim = dim;
    struct Sample {
        double r, v, e;
    };
    std::vector<Sample> samples;
    auto eval = [&](double r) {
        auto q = kernel_eval(s, dim, r, tol);
        samples.push_back({r, q.value, q.abs_error_estimate});
        return q.value;
    };
    for (int i = 0; i < n_samples; ++i) eval(r_max * i / (n_samples - 1));

    std::size_t first_neg = 0;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].v < 0.0) {
            first_neg = i;
            break;
        }
    if (first_neg > 0) {
        double lo = samples[first_neg - 1].r, hi = samples[first_neg].r;
        for (int it = 0; it < 30; ++it) {
            const double mid = 0.5 * (lo + hi);
            (eval(mid) < 0.0 ? hi : lo) = mid;
        }
        const double step = r_max / (n_samples - 1);
        for (double d = step / 64.0; hi + d < r_max; d *= 2.0) eval(hi + d);
    }

    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.r < b.r; });
    auto argmin = [&] {
        return std::min_element(samples.begin(), samples.end(),
                                [](const Sample& a, const Sample& b) { return a.v < b.v; }) -
               samples.begin();
    };
    std::size_t im = argmin();
    if (im > 0 && im + 1 < samples.size() && samples[im].v < 0.0) {
        // golden-section refinement of the dip
        double a = samples[im - 1].r, b = samples[im + 1].r;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 12; ++it) {
            const double c = b - g * (b - a), d = a + g * (b - a);
            if (eval(c) < eval(d))
                b = d;
            else
                a = c;
        }
        std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.r < b.r; });
        im = argmin();
    }

    for (const auto& x : samples) {
        prof.sample_points.push_back(x.r);
        prof.values.push_back(x.v);
        prof.errors.push_back(x.e);
    }
    prof.min_value = samples[im].v;
    prof.min_location = samples[im].r;
    prof.min_error = samples[im].e;
    prof.certified_negative = prof.min_value < 0.0 && -prof.min_value > 2.0 * prof.min_error;
    if (with_moments) {
        prof.l1_mass = l1_mass_eval(s, dim).value;
        prof.second_moment = second_moment(s, dim);
    }
    return prof;
}

AsymptoticReport asymptotic_check(double alpha, int dim, const std::vector<double>& probe_xs,
                                  double tolerance) {
    check_params(alpha, dim);
    const double half = alpha / 2.0;
    if (half == std::round(half))
        throw Error(ErrorKind::precondition, "asymptotic_check needs alpha that is not an even integer");
    if (probe_xs.size() < 3) throw Error(ErrorKind::precondition, "asymptotic_check needs at least 3 probes");
    for (std::size_t i = 0; i < probe_xs.size(); ++i)
        if (!(probe_xs[i] >= 1.0) || (i > 0 && !(probe_xs[i] > probe_xs[i - 1])))
            throw Error(ErrorKind::precondition, "probes must be increasing and >= 1");

    AsymptoticReport rep;
    rep.alpha = alpha;
    rep.dim = dim;
    rep.tolerance = tolerance;
    rep.probe_x = probe_xs;
    for (double x : probe_xs) {
        QuadratureResult q;
        if (dim == 1) {
            q = polya_rescaled_eval(alpha, x, PolyaMethod::rotated_contour, 1e-10);
        } else {
            const double xs = std::pow(x, dim + alpha);
            auto run = [&](double tol) { return kernel_eval(alpha, dim, x, tol); };
            q = scaled(with_floor(run, 1e-7 / xs, 1e-4 / xs), xs);
        }
        rep.rescaled.push_back(q.value);
        rep.rescaled_error.push_back(q.abs_error_estimate);
    }
    const double last = rep.rescaled.back(), prev = rep.rescaled[rep.rescaled.size() - 2];
    rep.stabilized = std::fabs(last - prev) <= tolerance * std::fabs(last);
    const double sgn = std::sin(pi * alpha / 2.0);
    rep.sign_matches = (last > 0.0) == (sgn > 0.0) && last != 0.0;
    if (dim == 1) {
        rep.limit_formula_value = polya_limit(alpha);
        rep.matches_limit = std::fabs(last - rep.limit_formula_value) <= tolerance * std::fabs(rep.limit_formula_value);
    } else {
        rep.limit_formula_value = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

SemigroupKernelCheck semigroup_kernel_check(double s, double half_width, std::size_t n) {
    const RealGrid g = RealGrid::make(half_width, n);
    auto k1 = sample(g, [s](double x) { return kernel_value(s, 1, std::fabs(x)); });
    auto spec = forward_transform(k1);
    for (auto& c : spec.coefficients) c *= c;
    auto conv = inverse_transform(spec);
    SemigroupKernelCheck out;
    out.half_width = half_width;
    out.num_points = n;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::fabs(g.x(j)) > 0.5 * half_width) continue;
        const double ref = scaled_kernel_value(s, 1, 2.0, std::fabs(g.x(j)));
        out.max_abs_diff = std::max(out.max_abs_diff, std::fabs(conv.values[j] - ref));
    }
    return out;
}

}  // namespace fracheat
