#include "fracheat/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

namespace fracheat {

namespace {

constexpr std::array<double, 8> xgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for xgk[1], xgk[3], xgk[5], xgk[7]
constexpr std::array<double, 4> wg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
};

double checked(const Integrand& f, double x) {
    double y = f(x);
    if (!std::isfinite(y)) {
        std::ostringstream os;
        os << "integrand not finite at x = " << x;
        throw Error(ErrorKind::invalid_input, os.str());
    }
    return y;
}

Segment gk15(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    const double fc = checked(f, c);
    double resg = fc * wg[3];
    double resk = fc * wgk[7];
    double resabs = std::fabs(resk);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = hl * xgk[j];
        f1[j] = checked(f, c - dx);
        f2[j] = checked(f, c + dx);
        const double s = f1[j] + f2[j];
        resk += wgk[j] * s;
        resabs += wgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) resg += wg[j / 2] * s;
    }
    const double reskh = resk * 0.5;
    double resasc = wgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::fabs(f1[j] - reskh) + std::fabs(f2[j] - reskh));
    const double ahl = std::fabs(hl);
    resk *= hl;
    resabs *= ahl;
    resasc *= ahl;
    double err = std::fabs((resk - resg * hl));
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();
    if (resabs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, resk, err};
}

struct ByError {
    bool operator()(const Segment& x, const Segment& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;
    }
};

}  // namespace

QuadratureResult integrate_adaptive(const Integrand& f, double a, double b, double abs_tol,
                                    int max_subdivisions) {
    if (!(a < b)) throw Error(ErrorKind::domain, "integrate_adaptive requires a < b");
    if (!(abs_tol > 0.0)) throw Error(ErrorKind::domain, "integrate_adaptive requires abs_tol > 0");

    std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
    heap.push(gk15(f, a, b));
    long evals = 15;
    double total_err = heap.top().error;
    int splits = 0;
    bool stuck = false;

    while (total_err > abs_tol && splits < max_subdivisions) {
        Segment s = heap.top();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b)) {
            stuck = true;
            break;
        }
        heap.pop();
        Segment l = gk15(f, s.a, mid);
        Segment r = gk15(f, mid, s.b);
        evals += 30;
        ++splits;
        heap.push(l);
        heap.push(r);
        total_err += l.error + r.error - s.error;
        if (total_err <= abs_tol) {
            // refresh the running total before trusting it
            auto copy = heap;
            double e = 0.0;
            while (!copy.empty()) {
                e += copy.top().error;
                copy.pop();
            }
            total_err = e;
        }
    }

    std::vector<Segment> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    CompensatedSum value, err;
    for (const auto& s : segs) {
        value.add(s.value);
        err.add(s.error);
    }
    QuadratureResult res{value.value(), err.value(), evals, false};
    res.converged = res.abs_error_estimate <= abs_tol;
    if (!res.converged) {
        std::ostringstream os;
        os << "adaptive quadrature on [" << a << ", " << b << "] did not reach " << abs_tol
           << " (estimate " << res.abs_error_estimate << (stuck ? ", interval underflow" : "")
           << ")";
        throw ConvergenceError(os.str(), res);
    }
    return res;
}

namespace {

// max over a window [T, T + w] of |f(t)| exp(scale (t^power - T^power)), in logs
double log_envelope(const Integrand& f, double T, double w, const Decay& d, long& evals) {
    double best = -std::numeric_limits<double>::infinity();
    const double base = std::pow(T, d.power);
    for (int i = 0; i <= 32; ++i) {
        const double t = T + w * i / 32.0;
        const double v = std::fabs(f(t));
        ++evals;
        if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "integrand not finite in tail");
        if (v == 0.0) continue;
        best = std::max(best, std::log(v) + d.scale * (std::pow(t, d.power) - base));
    }
    return best;
}

QuadratureResult semi_infinite_exponential(const Integrand& f, const Decay& d, double abs_tol,
                                           double a) {
    if (!(d.power > 0.0) || !(d.scale > 0.0))
        throw Error(ErrorKind::domain, "exponential decay needs positive power and scale");
    long evals = 0;
    double T = a + 1.0;
    double bound = 0.0;
    for (int iter = 0;; ++iter) {
        const double w = std::max(1.0, 0.25 * T);
        const double logm = log_envelope(f, T, w, d, evals);
        const double TT = std::max(T, 1e-300);
        bound = std::isfinite(logm)
                    ? 2.0 * std::exp(logm + (1.0 - d.power) * std::log(TT)) / (d.scale * d.power)
                    : 0.0;
        if (std::isfinite(logm)) {
            // the envelope constant C(t) = |f| e^{scale t^power} must not blow up
            const double T2 = 2.0 * T;
            const double logm2 = log_envelope(f, T2, std::max(1.0, 0.25 * T2), d, evals);
            const double logc1 = logm + d.scale * std::pow(T, d.power);
            const double logc2 = logm2 + d.scale * std::pow(T2, d.power);
            if (std::isfinite(logm2) && logc2 - logc1 > std::log(1e6)) {
                std::ostringstream os;
                os << "integrand decays slower than declared exp(-" << d.scale << " t^" << d.power
                   << ") near t = " << T;
                throw Error(ErrorKind::decay_mismatch, os.str());
            }
        }
        if (bound <= 0.5 * abs_tol) break;
        if (T > 1e6 || iter > 400) {
            throw Error(ErrorKind::decay_mismatch,
                        "no truncation point found for declared exponential decay");
        }
        T = a + 1.25 * (T - a);
    }
    QuadratureResult r;
    try {
        r = integrate_adaptive(f, a, T, 0.5 * abs_tol, 20000);
    } catch (const ConvergenceError& e) {
        QuadratureResult p = e.partial();
        p.abs_error_estimate += bound;
        p.evaluations += evals;
        throw ConvergenceError(e.what(), p);
    }
    r.abs_error_estimate += bound;
    r.evaluations += evals;
    r.converged = r.abs_error_estimate <= abs_tol;
    return r;
}

QuadratureResult semi_infinite_algebraic(const Integrand& f, const Decay& d, double abs_tol,
                                         double a) {
    if (!(d.rate > 1.0))
        throw Error(ErrorKind::decay_mismatch, "algebraic decay rate must exceed 1 for integrability");
    const double t1 = a + 1e3, t2 = a + 1e6;
    const double c1 = std::fabs(f(t1)) * std::pow(t1 - a, d.rate);
    const double c2 = std::fabs(f(t2)) * std::pow(t2 - a, d.rate);
    if (c2 > 100.0 * c1 + 1e-300) {
        std::ostringstream os;
        os << "integrand decays slower than declared t^-" << d.rate;
        throw Error(ErrorKind::decay_mismatch, os.str());
    }
    auto g = [&](double u) {
        const double v = 1.0 - u;
        return f(a + u / v) / (v * v);
    };
    QuadratureResult r = integrate_adaptive(g, 0.0, 1.0, abs_tol, 20000);
    r.evaluations += 2;
    return r;
}

}  // namespace

QuadratureResult integrate_semi_infinite(const Integrand& f, Decay decay, double abs_tol, double a) {
    if (!(abs_tol > 0.0)) throw Error(ErrorKind::domain, "abs_tol must be positive");
    if (decay.kind == Decay::Kind::exponential) return semi_infinite_exponential(f, decay, abs_tol, a);
    return semi_infinite_algebraic(f, decay, abs_tol, a);
}

QuadratureResult integrate_oscillatory(const Integrand& envelope, double freq, double abs_tol,
                                       Phase phase, double monotone_from) {
    if (!(freq > 0.0)) throw Error(ErrorKind::domain, "integrate_oscillatory requires freq > 0");
    if (!(abs_tol > 0.0)) throw Error(ErrorKind::domain, "abs_tol must be positive");
    const double half = std::numbers::pi / freq;
    const double offset = phase == Phase::cosine ? 0.5 : 1.0;
    auto zero = [&](long j) { return (static_cast<double>(j) + offset) * half; };

    constexpr long max_segments = 1L << 22;
    long evals = 0;
    long cut = 0;
    double tail = 0.0;
    for (;; ++cut) {
        if (cut > max_segments)
            throw ConvergenceError("oscillatory splitter: envelope too slow for segment budget",
                                   QuadratureResult{0.0, INFINITY, evals, false});
        const double t = zero(cut);
        if (t < monotone_from) continue;
        const double e0 = std::fabs(envelope(t));
        const double e1 = std::fabs(envelope(zero(cut + 1)));
        evals += 2;
        if (e0 * half <= 0.25 * abs_tol && e1 <= e0) {
            tail = e0 * half;
            break;
        }
    }

    auto integrand = [&](double t) {
        const double w = phase == Phase::cosine ? std::cos(freq * t) : std::sin(freq * t);
        return envelope(t) * w;
    };
    const long nseg = cut + 1;
    const double seg_tol = abs_tol / (2.0 * static_cast<double>(nseg));
    CompensatedSum value, err;
    double left = 0.0;
    for (long j = 0; j <= cut; ++j) {
        const double right = zero(j);
        try {
            QuadratureResult r = integrate_adaptive(integrand, left, right, seg_tol);
            value.add(r.value);
            err.add(r.abs_error_estimate);
            evals += r.evaluations;
        } catch (const ConvergenceError& e) {
            QuadratureResult p{value.value() + e.partial().value,
                               err.value() + e.partial().abs_error_estimate + tail,
                               evals + e.partial().evaluations, false};
            throw ConvergenceError(e.what(), p);
        }
        left = right;
    }
    QuadratureResult res{value.value(), err.value() + tail, evals, false};
    res.converged = res.abs_error_estimate <= abs_tol;
    if (!res.converged)
        throw ConvergenceError("oscillatory splitter: summed error exceeds tolerance", res);
    return res;
}

double gamma_fn(double x) {
    static constexpr std::array<double, 9> c{
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
    x -= 1.0;
    double s = c[0];
    for (int i = 1; i < 9; ++i) s += c[i] / (x + i);
    const double t = x + 7.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * s;
}

}  // namespace fracheat
