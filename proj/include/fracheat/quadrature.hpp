#pragma once

#include <cmath>
#include <functional>

#include "fracheat/errors.hpp"

namespace fracheat {

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    long evaluations = 0;
    bool converged = false;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, QuadratureResult partial)
        : Error(ErrorKind::convergence, what), partial_(partial) {}
    const QuadratureResult& partial() const { return partial_; }

private:
    QuadratureResult partial_;
};

using Integrand = std::function<double(double)>;

// Global adaptive Gauss-Kronrod (7/15). The interval with the largest error
// estimate is bisected first; ties go to the leftmost interval.
QuadratureResult integrate_adaptive(const Integrand& f, double a, double b, double abs_tol,
                                    int max_subdivisions = 4000);

// Decay class of an integrand on [a, inf).
//   exponential: |f(t)| <~ poly(t) * exp(-scale * t^power)
//   algebraic:   |f(t)| <~ t^(-rate), rate > 1
struct Decay {
    enum class Kind { exponential, algebraic };
    Kind kind = Kind::exponential;
    double power = 1.0;
    double scale = 1.0;
    double rate = 2.0;

    static Decay exponential(double power = 1.0, double scale = 1.0) {
        return {Kind::exponential, power, scale, 0.0};
    }
    static Decay algebraic(double rate) { return {Kind::algebraic, 1.0, 1.0, rate}; }
};

// Exponential class: truncation at T with tail bound
//   2 * C * exp(-scale T^power) T^(1-power) / (scale * power),
// C estimated from samples of |f| exp(scale t^power) just beyond T.
// Algebraic class: t = a + u/(1-u) over the whole half-line.
QuadratureResult integrate_semi_infinite(const Integrand& f, Decay decay, double abs_tol,
                                         double a = 0.0);

enum class Phase { cosine, sine };

// Integral over [0, inf) of envelope(t) * cos(freq t) (or sin). The half-line
// is split at the zeros of the trigonometric factor and the segments summed
// with compensated summation. The envelope must be monotone decreasing in
// magnitude for t >= monotone_from.
QuadratureResult integrate_oscillatory(const Integrand& envelope, double freq, double abs_tol,
                                       Phase phase = Phase::cosine, double monotone_from = 0.0);

// Lanczos approximation (g = 7, 9 terms) with reflection below 1/2.
double gamma_fn(double x);

// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace fracheat
