#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fracheat/errors.hpp"
#include "fracheat/kernels.hpp"

using namespace fracheat;
using std::numbers::pi;

// 10^7-point trapezoid of |K_4| (tests/oracles/kernel_l1.py)
constexpr double kK4L1 = 1.2372943854596261;

TEST_CASE("kernel_value examples") {
    CHECK(std::fabs(kernel_value(1.0, 1, 0.0) - 1.0 / pi) < 1e-10);
    CHECK(std::fabs(kernel_value(2.0, 1, 2.0) - std::exp(-1.0) / std::sqrt(4.0 * pi)) < 1e-10);
    // K_3(8) is still positive: the Polya regime starts near r = 10
    CHECK(std::fabs(kernel_value(3.0, 1, 8.0) - 0.000011497586681527511214) < 1e-10);
    for (double r : {12.0, 16.0, 20.0}) {
        const double k = kernel_value(3.0, 1, r);
        CHECK(k < 0.0);
        CHECK(std::fabs(std::pow(r, 4) * pi * k + 6.0) < 0.6);
    }
    CHECK_THROWS_AS(kernel_value(2.0, 4, 1.0), Error);
    CHECK_THROWS_AS(kernel_value(-1.0, 1, 1.0), Error);
}

TEST_CASE("kernel values against mpmath") {
    struct P {
        double s, r, v;
    };
    // tests/oracles/kernel_points.py
    const P pts[] = {{3, 4, -0.011801293573887718323},   {3, 12, -0.000092024852491192183567},
                     {2.5, 5, -0.0067824380507559969368}, {4, 0, 0.28851686930823484431},
                     {4, 3, 0.031877798487844323332},     {6, 7, 0.0070478787662857865477},
                     {0.5, 2, 0.039142858049651342948}};
    for (const auto& p : pts) {
        INFO("s=" << p.s << " r=" << p.r);
        CHECK(std::fabs(kernel_value(p.s, 1, p.r) - p.v) < 1e-10);
    }
}

TEST_CASE("Poisson and Gaussian kernels in every dimension") {
    for (double r : {0.0, 0.3, 1.0, 2.5, 7.0, 30.0, 200.0}) {
        CHECK(std::fabs(kernel_value(1.0, 1, r) - 1.0 / (pi * (1 + r * r))) < 1e-10);
        CHECK(std::fabs(kernel_value(2.0, 1, r) - std::exp(-r * r / 4) / std::sqrt(4 * pi)) < 1e-10);
        if (r <= 30.0) {
            CHECK(std::fabs(kernel_value(1.0, 2, r) - 1.0 / (2 * pi * std::pow(1 + r * r, 1.5))) < 1e-10);
            CHECK(std::fabs(kernel_value(1.0, 3, r) - 1.0 / (pi * pi * std::pow(1 + r * r, 2))) < 1e-10);
            CHECK(std::fabs(kernel_value(2.0, 2, r) - std::exp(-r * r / 4) / (4 * pi)) < 1e-10);
            CHECK(std::fabs(kernel_value(2.0, 3, r) - std::exp(-r * r / 4) / std::pow(4 * pi, 1.5)) < 1e-10);
        }
    }
}

TEST_CASE("J0 by quadrature matches the library Bessel function") {
    for (double z : {0.0, 0.5, 2.404825557695773, 10.0, 77.7, 250.0, 500.0})
        CHECK(std::fabs(bessel_j0(z) - std::cyl_bessel_j(0.0, z)) < 1e-12);
}

TEST_CASE("large radius switch is continuous") {
    for (double s : {0.5, 1.5, 3.0, 4.0}) {
        for (double r : {20.0, 60.0, 150.0, 400.0}) {
            auto a = kernel_eval(s, 1, r, 1e-12);
            auto b = polya_rescaled_eval(s, r, PolyaMethod::rotated_contour, 1e-11);
            CHECK(std::fabs(a.value - b.value / (pi * std::pow(r, s + 1))) < 1e-12);
        }
    }
}

TEST_CASE("polya_rescaled examples") {
    CHECK(std::fabs(polya_rescaled(1.0, 10.0, PolyaMethod::oscillatory) - 100.0 / 101.0) < 1e-8);
    CHECK(std::fabs(polya_rescaled(1.0, 10.0, PolyaMethod::rotated_contour) - 100.0 / 101.0) < 1e-9);
    CHECK(std::fabs(polya_rescaled(2.0, 20.0, PolyaMethod::oscillatory)) <= 1e-6);
    CHECK(std::fabs(polya_rescaled(2.0, 20.0, PolyaMethod::rotated_contour)) <= 1e-6);
    for (auto m : {PolyaMethod::oscillatory, PolyaMethod::rotated_contour})
        CHECK(std::fabs(polya_rescaled(3.0, 40.0, m) + 6.0) < 0.3);
    CHECK_THROWS_AS(polya_rescaled(1.0, 0.5, PolyaMethod::oscillatory), Error);
}

TEST_CASE("polya_limit") {
    CHECK(std::fabs(polya_limit(1.0) - 1.0) < 1e-13);
    CHECK(std::fabs(polya_limit(3.0) + 6.0) < 1e-12);
    CHECK(std::fabs(polya_limit(2.5) - (-2.349964007466562971)) < 1e-12);
}

TEST_CASE("contour rays that do not decay are rejected") {
    try {
        contour_integral(3.0, 10.0, 2.0, 1e-10);
        FAIL("expected invalid angle");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_angle);
    }
    CHECK_THROWS_AS(contour_integral(0.4, 10.0, 1.5, 1e-10), Error);
    CHECK_THROWS_AS(contour_integral(2.0, 10.0, -0.1, 1e-10), Error);
    CHECK(contour_angle(0.5) == doctest::Approx(pi / 4));
    CHECK(contour_angle(3.0) == doctest::Approx(0.9 * pi / 6));
}

TEST_CASE("oscillatory and contour methods agree") {
    for (double a : {1.5, 2.5, 3.0, 3.5}) {
        for (double x : {5.0, 20.0, 50.0}) {
            auto o = polya_rescaled_eval(a, x, PolyaMethod::oscillatory);
            auto c = polya_rescaled_eval(a, x, PolyaMethod::rotated_contour);
            INFO("alpha=" << a << " x=" << x);
            CHECK(std::fabs(o.value - c.value) <= o.abs_error_estimate + c.abs_error_estimate);
        }
    }
}

TEST_CASE("positivity scan") {
    auto p = positivity_scan(1.5, 1, 40.0, 64);
    CHECK(p.min_value >= -1e-9);
    CHECK_FALSE(p.certified_negative);
    CHECK_FALSE(p.l1_mass.has_value());

    auto q = positivity_scan(3.0, 1, 40.0, 64);
    CHECK(q.certified_negative);
    CHECK(q.min_value < 0.0);

    auto w = positivity_scan(4.0, 2, 40.0, 64);
    CHECK(w.certified_negative);

    for (std::size_t i = 1; i < q.sample_points.size(); ++i) CHECK(q.sample_points[i] >= q.sample_points[i - 1]);
    CHECK_THROWS_AS(positivity_scan(3.0, 1, 40.0, 10), Error);
}

TEST_CASE("monotone positivity boundary") {
    for (double s : {0.5, 1.0, 1.5, 2.0}) {
        auto p = positivity_scan(s, 1, 40.0, 64);
        INFO("s=" << s);
        CHECK(p.min_value >= -1e-9);
    }
    for (double s : {2.2, 2.5, 3.0, 3.5, 4.0, 6.0}) {
        auto p = positivity_scan(s, 1, 40.0, 64);
        INFO("s=" << s);
        CHECK(p.certified_negative);
    }
}

TEST_CASE("l1 mass") {
    CHECK(std::fabs(l1_mass(1.0, 1) - 1.0) < 1e-8);
    CHECK(std::fabs(l1_mass(2.0, 2) - 1.0) < 1e-8);
    const double m4 = l1_mass(4.0, 1);
    CHECK(m4 > 1.0 + 1e-4);
    CHECK(std::fabs(m4 - kK4L1) < 1e-8);
}

TEST_CASE("second moment") {
    auto d = second_moment(1.5, 1);
    CHECK(d.divergent);
    auto g = second_moment(2.0, 1);
    CHECK_FALSE(g.divergent);
    CHECK(std::fabs(g.value - 2.0) < 1e-10);
    CHECK(std::fabs(second_moment(4.0, 1).value) < 1e-6);
    CHECK(std::fabs(second_moment(6.0, 1).value) < 1e-6);
}

TEST_CASE("asymptotic checks") {
    auto a = asymptotic_check(3.0, 1, {20, 40, 80});
    CHECK(a.stabilized);
    CHECK(a.matches_limit);
    CHECK(std::fabs(a.rescaled.back() + 6.0) < 0.3);

    auto b = asymptotic_check(2.5, 2, {20, 40, 80});
    CHECK(b.stabilized);
    CHECK(b.sign_matches);
    CHECK(b.rescaled.back() < 0.0);
    CHECK(std::isnan(b.limit_formula_value));

    auto c = asymptotic_check(1.0, 3, {10, 20, 40});
    CHECK(c.stabilized);
    CHECK(c.sign_matches);
    CHECK(c.rescaled.back() > 0.0);

    CHECK_THROWS_AS(asymptotic_check(2.0, 1, {20, 40, 80}), Error);
    CHECK_THROWS_AS(asymptotic_check(3.0, 1, {20, 40}), Error);
}

TEST_CASE("self-similarity and scaled kernels") {
    CHECK(scaled_kernel_value(3.0, 1, 1.0, 2.0) == doctest::Approx(kernel_value(3.0, 1, 2.0)).epsilon(1e-14));
    CHECK(std::fabs(scaled_kernel_value(2.0, 1, 4.0, 0.0) - 1.0 / std::sqrt(16 * pi)) < 1e-10);
    CHECK(std::fabs(scaled_kernel_value(4.0, 1, 16.0, 0.0) - 0.5 * kernel_value(4.0, 1, 0.0)) < 1e-12);
    for (double s : {1.5, 3.0})
        for (int d : {1, 2})
            for (double tau : {0.3, 2.0, 9.0}) {
                const double r = 1.7;
                const double lhs = scaled_kernel_value(s, d, tau, r);
                const double rhs = std::pow(tau, -d / s) * kernel_value(s, d, std::pow(tau, -1 / s) * r);
                CHECK(std::fabs(lhs - rhs) < 1e-10);
            }
}

TEST_CASE("semigroup property at kernel level") {
    for (double s : {1.0, 2.0, 3.0}) {
        auto c = semigroup_kernel_check(s);
        INFO("s=" << s);
        CHECK(c.max_abs_diff < 1e-6);
    }
}

TEST_CASE("mass exceeds one exactly when the kernel changes sign") {
    CHECK(std::fabs(l1_mass(0.5, 1) - 1.0) < 1e-8);
    CHECK(l1_mass(2.5, 1) > 1.0 + 1e-6);
}
