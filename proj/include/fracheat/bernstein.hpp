#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracheat/grid_fft.hpp"
#include "fracheat/quadrature.hpp"

namespace fracheat {

struct BernsteinReport {
    double s = 0.0;
    double p = 0.0;
    std::optional<double> band_scale_N;
    double raw_value = 0.0;     // int (Lambda^s f) |f|^{p-2} f
    double p_norm_pow_p = 0.0;  // ||f||_p^p
    double ratio = 0.0;         // raw / (N^s ||f||_p^p), N = 1 when absent
};

// sgn(v) |v|^e, zero below 1e-300
double signed_pow(double v, double e);
// grid quadrature of |f|^p
double p_norm_pow(const GridFunction& f, double p);

BernsteinReport bernstein_functional(const GridFunction& f, double s, double p,
                                     std::optional<double> N = std::nullopt);

// e^{-t Lambda^s} f on the line or torus grid of f
GridFunction semigroup_apply_line(const GridFunction& f, double t, double s);

// f1 = log(1 + x^2) and derivatives
double f1(double x);
double f1_d1(double x);
double f1_d2(double x);
double f1_d4(double x);

struct LemmaA1Integrals {
    double I_direct = 0.0;   // int f1'''' f1^3
    double I_byparts = 0.0;  // 3 int f1^2 f1''^2 - 2 int f1'^4
    double I_closed = 0.0;
    double three_f2_fpp2 = 0.0;
    double two_fp4 = 0.0;
    double direct_error = 0.0;
    double byparts_error = 0.0;
};

LemmaA1Integrals lemma_a1_integrals();

// d^n/dx^n (x + e^{-x^2}) for n in {4, 8}
double f2_derivative(int order, double x);
double f2(double x);
// int f2^(order) f2^3 over the line
QuadratureResult f2_integral(int order);

// f1'''' f1^3
double g_function(double x);
QuadratureResult g_integral(double a, double b);

// Smooth cutoff: 1 on |z| <= 1, 0 on |z| >= 2, glued from e^{-1/z}.
double bump_phi(double z);
inline constexpr const char* bump_profile_name = "exp-glue-1-2";

struct CounterexampleParams {
    double R0 = 256.0;
    double eps0 = 0.25;
    std::vector<double> N_list{16.0, 32.0, 64.0, 128.0};
    std::string bump_profile = bump_profile_name;
    double half_width = 8192.0;
    std::size_t num_points = std::size_t{1} << 16;
};

struct ParamSelection {
    CounterexampleParams params;
    double I_f1 = 0.0;
    std::vector<std::pair<double, double>> R_trace;    // (R, I(f_R))
    std::vector<std::pair<double, double>> eps_trace;  // (eps, I(h_eps))
};

// R0 doubles from 2 until I(f_R) is within 5% of I(f1); eps halves from 1/4
// until I(h_eps) is within 5% of I(f_R0).
ParamSelection select_counterexample_params(std::vector<double> N_list = {16.0, 32.0, 64.0, 128.0},
                                            double half_width = 8192.0,
                                            std::size_t num_points = std::size_t{1} << 16);

struct CounterexampleMember {
    double N = 0.0;
    GridFunction f;  // d = 2: the x1 factor N^{1/4} h(N x1)
    BernsteinReport report;
    BandReport band;
    double ratio_1d = 0.0;
};

struct Counterexample {
    int dim = 1;
    CounterexampleParams params;
    double I_fR0 = 0.0;
    double I_h = 0.0;
    double h_norm4 = 0.0;
    std::vector<CounterexampleMember> members;
};

// f_j(x) = N^{1/4} h(N x) with h the spectrally trimmed f1 phi(x/R0); in d = 2
// the tensor N^{1/4} h(N x1) psi(x2) is evaluated by separability.
Counterexample construct_counterexample(const CounterexampleParams& params, int dim);

// h on the base grid, and its functional at that grid
GridFunction counterexample_profile(const CounterexampleParams& params);

enum class Pipeline { theorem_t1, large_p, small_p };
const char* pipeline_name(Pipeline p);

struct WitnessOptions {
    double half_width = 64.0;
    std::size_t num_points = std::size_t{1} << 14;
    bool recertify = true;
};

struct WitnessTrace {
    double half_width = 0.0;
    std::size_t num_points = 0;
    double kernel_l1 = 0.0;
    double L0 = 0.0;
    double mollify_width = 0.0;
    double pairing = 0.0;  // <K, psi>
    double t0 = 0.0;
    double max_slope = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    // small-p duality step
    double conjugate_p = 0.0;
    double pair_psi_Tf = 0.0;
    double pair_Tpsi_f = 0.0;
    double T_psi_norm = 0.0;
};

struct WitnessCertificate {
    double s = 0.0;
    double p = 0.0;
    Pipeline pipeline = Pipeline::large_p;
    std::optional<CounterexampleParams> params;
    WitnessTrace trace;
    double achieved_value = 0.0;
    double error_budget = 0.0;
    bool recertified = false;
    double recert_value = 0.0;
    double recert_budget = 0.0;
    bool certified() const { return achieved_value + error_budget < 0.0; }
};

std::optional<WitnessCertificate> witness_search_large_p(double s, double p, WitnessOptions opts = {});
std::optional<WitnessCertificate> witness_search_small_p(double s, double p, WitnessOptions opts = {});
// achieved value = least negative ratio over N; budget = spread over N plus
// the change of I(h)/||h||_4^4 when the base grid is halved
WitnessCertificate certificate_from_counterexample(const Counterexample& c);

}  // namespace fracheat
