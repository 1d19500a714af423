#pragma once

#include <optional>
#include <vector>

#include "fracheat/quadrature.hpp"

namespace fracheat {

// J0(z) = (2/pi) int_0^{pi/2} cos(z sin t) dt
QuadratureResult bessel_j0_eval(double z, double abs_tol = 5e-14);
double bessel_j0(double z);

// K_{s,d}(r), the kernel of exp(-Lambda^s) on R^d at radius r:
//   d=1: (1/pi) int_0^inf e^{-t^s} cos(rt) dt
//   d=2: (1/2pi) int_0^inf e^{-t^s} t J0(rt) dt
//   d=3: (1/(2 pi^2 r)) int_0^inf e^{-t^s} t sin(rt) dt
// Tolerances below the roundoff floor are relaxed up to 1e4 * abs_tol; the
// returned estimate is the one actually achieved.
QuadratureResult kernel_eval(double s, int dim, double r, double abs_tol);
// abs error <= 1e-10
double kernel_value(double s, int dim, double r);
// kernel of exp(-tau Lambda^s): tau^{-d/s} K(tau^{-1/s} r)
double scaled_kernel_value(double s, int dim, double tau, double r);

enum class PolyaMethod { oscillatory, rotated_contour };

// x^{alpha+1} int_0^inf e^{-t^alpha} cos(xt) dt
QuadratureResult polya_rescaled_eval(double alpha, double x, PolyaMethod method, double abs_tol = 1e-10);
double polya_rescaled(double alpha, double x, PolyaMethod method);
// Im int along u = rho e^{i theta} of e^{i u^{1/alpha} - x^{-alpha} u} du; throws
// invalid_angle when the integrand does not decay along the ray.
QuadratureResult contour_integral(double alpha, double x, double theta, double abs_tol);
double contour_angle(double alpha);
// Gamma(alpha+1) sin(pi alpha / 2)
double polya_limit(double alpha);

struct SecondMoment {
    double value = 0.0;
    double abs_error = 0.0;
    bool divergent = false;
};

struct KernelProfile {
    double s = 0.0;
    int dim = 1;
    std::vector<double> sample_points;
    std::vector<double> values;
    std::vector<double> errors;
    double min_value = 0.0;
    double min_location = 0.0;
    double min_error = 0.0;
    bool certified_negative = false;
    std::optional<double> l1_mass;
    std::optional<SecondMoment> second_moment;
};

KernelProfile positivity_scan(double s, int dim, double r_max, int n_samples, bool with_moments = false);

QuadratureResult l1_mass_eval(double s, int dim, double abs_tol = 2e-9);
double l1_mass(double s, int dim);
// divergent flag for s < 2; s = 2 is the Gaussian (finite) case
SecondMoment second_moment(double s, int dim);

struct AsymptoticReport {
    double alpha = 0.0;
    int dim = 1;
    std::vector<double> probe_x;
    std::vector<double> rescaled;
    std::vector<double> rescaled_error;
    double limit_formula_value = 0.0;  // NaN when d > 1 (constant not explicit)
    double tolerance = 0.05;
    bool stabilized = false;
    bool sign_matches = false;
    bool matches_limit = false;  // d = 1 only
};

AsymptoticReport asymptotic_check(double alpha, int dim, const std::vector<double>& probe_xs,
                                  double tolerance = 0.05);

struct SemigroupKernelCheck {
    double max_abs_diff = 0.0;
    double half_width = 0.0;
    std::size_t num_points = 0;
};

// periodic-grid K_{s,1} * K_{s,1} against the tau = 2 kernel, compared on |x| <= L/2
SemigroupKernelCheck semigroup_kernel_check(double s, double half_width = 100.0, std::size_t n = 2048);

}  // namespace fracheat
