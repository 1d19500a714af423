#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fracheat/bernstein.hpp"
#include "fracheat/grid_fft.hpp"

namespace fracheat {

// Torus multipliers use |k|^s with integer modes k.
struct TorusFunction {
    TorusGrid grid;
    std::vector<double> values;
    double mean = 0.0;  // <f> = f-hat(0)

    static TorusFunction make(const TorusGrid& grid, std::vector<double> values);
    GridFunction as_grid() const { return GridFunction{grid, values}; }
};

TorusFunction torus_sample(const TorusGrid& g, const std::function<double(double, double)>& fn);
// Gaussian coefficients on 1 <= |k| <= max_mode (plus k = 0 unless mean_zero), Hermitian.
TorusFunction random_torus_function(const TorusGrid& g, std::uint64_t seed, int max_mode, bool mean_zero = true);

// same trigonometric polynomial on a grid with points_per_dim points (modes at
// the old Nyquist are dropped)
TorusFunction torus_resample(const TorusFunction& f, int points_per_dim);

TorusFunction torus_semigroup(const TorusFunction& f, double t, double s);
BernsteinReport torus_bernstein(const TorusFunction& f, double s, double p);

struct DecayTrace {
    double p = 0.0;
    double s = 0.0;
    std::vector<double> times;
    std::vector<double> norms;
    double fitted_rate = 0.0;  // least squares slope of log norm over t > 0
    bool monotone = false;
};

DecayTrace mean_zero_decay_check(const TorusFunction& f, double s, double p, const std::vector<double>& t_grid);

// ||e^{-m t0 Lambda^s} f||_p <= q^m ||f||_p with q the measured ratio at t0
struct IteratedDecay {
    double q = 0.0;
    std::vector<double> ratios;  // m = 1..m_max
    bool holds = false;
};
IteratedDecay iterated_decay_check(const TorusFunction& f, double s, double p, double t0, int m_max = 8);

struct SmallMeanReport {
    double lambda_measured = 0.0;  // |<f>| / ||f||_2
    double c = 2.0;
    std::vector<double> times;
    std::vector<double> lhs;  // ||e^{-t Lambda^s} f||_2^2
    std::vector<double> rhs;  // e^{-ct}(||f||^2 - <f>^2) + <f>^2
    bool bound_holds = false;
    double alpha1 = 0.0;  // min over t of -log(||T_t f|| / ||f||) / t
};

SmallMeanReport small_mean_decay_check(const TorusFunction& f, double s, double lambda, double t0 = 1.0,
                                       int n_times = 32);

// psi = 1 on |xi| <= 1, 0 on |xi| >= 1.01, quintic smoothstep between
double projection_cutoff(double xi);
TorusFunction projection_PN(const TorusFunction& f, int N);
BernsteinReport localized_bernstein(const TorusFunction& f, double s, double p, int N);

struct KatoReport {
    double lhs = 0.0;  // -<|phi|^{p-2} phi, Laplacian phi>
    double rhs = 0.0;  // min(1, p-1) int |grad phi|^2 |phi|^{p-2}
    bool holds = false;
};

KatoReport kato_inequality_check(const TorusFunction& phi, double p);
KatoReport kato_inequality_check(const std::vector<TorusFunction>& phi, double p);

struct JensenReport {
    double lhs = 0.0;  // ||K * f||_p
    double rhs = 0.0;
    bool holds = false;
};

// p >= 2: ||K*f||_p <= ||K*(|f|^{p/2})||_2^{2/p};
// 1 < p < 2: ||K*f||_p <= ||K*(|f|^{p/2})||_2^{2(p-1)/p} ||f||_p^{2-p}
JensenReport jensen_convolution_check(const TorusFunction& K, const TorusFunction& f, double p);

// heat kernel of e^{-t Lambda^s} on the torus grid, unit mass
TorusFunction torus_heat_kernel(const TorusGrid& g, double s, double t);

// raw torus functional against (4(p-1)/p^2) ||P_{k != 0}(|f|^{p/2} sgn f)||_2^2
struct CaseSplitReport {
    double raw = 0.0;
    double projected_mass = 0.0;
    double constant = 0.0;
    bool holds = false;
};
CaseSplitReport case_split_check(const TorusFunction& f, double s, double p);

}  // namespace fracheat
