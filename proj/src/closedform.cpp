#include "fracheat/closedform.hpp"

#include <cmath>
#include <numbers>

#include "fracheat/errors.hpp"
#include "fracheat/quadrature.hpp"

namespace fracheat {

ClosedFormTable closed_form_table() {
    constexpr double pi = std::numbers::pi;
    constexpr double l2 = std::numbers::ln2;
    const double l4 = std::log(4.0), l16 = std::log(16.0), l64 = std::log(64.0);
    ClosedFormTable t;
    t.I[0] = pi * pi * pi / 3.0 + 4.0 * pi * l2 * l2;
    t.I[1] = -pi + pi * pi * pi / 6.0 + 0.5 * pi * (-2.0 + l4) * l4;
    t.I[2] = pi / 16.0 * (-11.0 + 2.0 * pi * pi + l16 * (-7.0 + l64));
    t.I[3] = pi / 288.0 * (-155.0 + 30.0 * pi * pi + 6.0 * l4 * (-37.0 + 15.0 * l4));
    t.F[0] = pi * l4;
    t.F[1] = pi * (-0.5 + l2);
    t.F[2] = pi * (-7.0 / 16.0 + 0.75 * l2);
    t.F[3] = pi * (-37.0 / 96.0 + 0.625 * l2);
    t.lemma_value = -41.0 * pi / 6.0 + pi * pi * pi + l4 * (-7.0 + l64) * pi;
    t.eq_A102_value = -29.0 * pi / 6.0 + pi * pi * pi + l4 * (-7.0 + l64) * pi;
    t.a102_combination = 12.0 * t.I[1] - 48.0 * t.I[2] + 48.0 * t.I[3];
    return t;
}

namespace {

// 2 * int_0^inf of an even integrand
QuadratureResult whole_line(const Integrand& f, double rate, double tol) {
    QuadratureResult r = integrate_semi_infinite(f, Decay::algebraic(rate), 0.5 * tol);
    r.value *= 2.0;
    r.abs_error_estimate *= 2.0;
    return r;
}

}  // namespace

CrosscheckReport quadrature_crosscheck(double quad_tol, double pass_tol) {
    if (!(quad_tol > 0.0) || !(pass_tol > 0.0))
        throw Error(ErrorKind::domain, "crosscheck tolerances must be positive");
    const ClosedFormTable t = closed_form_table();
    CrosscheckReport rep;
    rep.abs_tol = pass_tol;
    auto add = [&](const std::string& name, double closed, const QuadratureResult& q) {
        rep.entries.push_back({name, closed, q.value, q.abs_error_estimate});
        rep.max_abs_discrepancy = std::max(rep.max_abs_discrepancy, std::fabs(q.value - closed));
    };
    for (int j = 1; j <= 4; ++j) {
        auto f = [j](double x) {
            const double l = std::log1p(x * x);
            return l * l / std::pow(1.0 + x * x, j);
        };
        add("I" + std::to_string(j), t.I[j - 1], whole_line(f, 2.0 * j - 0.5, quad_tol));
    }
    for (int n = 1; n <= 4; ++n) {
        auto f = [n](double x) { return std::log1p(x * x) / std::pow(1.0 + x * x, n); };
        add("F" + std::to_string(n), t.F[n - 1], whole_line(f, 2.0 * n - 0.5, quad_tol));
    }
    auto a102 = [](double x) {
        const double l = std::log1p(x * x);
        const double w = 1.0 + x * x;
        const double d2 = 2.0 * (1.0 - x * x) / (w * w);
        return 3.0 * l * l * d2 * d2;
    };
    add("A102", t.eq_A102_value, whole_line(a102, 3.5, quad_tol));
    rep.pass = rep.max_abs_discrepancy <= pass_tol;
    return rep;
}

CrosscheckReport quadrature_crosscheck(double abs_tol) {
    if (!(abs_tol >= 1e-8)) throw Error(ErrorKind::domain, "quadrature_crosscheck requires abs_tol >= 1e-8");
    return quadrature_crosscheck(abs_tol / 8.0, abs_tol);
}

}  // namespace fracheat
