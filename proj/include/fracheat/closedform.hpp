#pragma once

#include <array>
#include <string>
#include <vector>

namespace fracheat {

// I_j = int (log(1+x^2))^2 (1+x^2)^-j dx, F_n = int (1+x^2)^-n log(1+x^2) dx
struct ClosedFormTable {
    std::array<double, 4> I{};
    std::array<double, 4> F{};
    double lemma_value = 0.0;       // int f1'''' f1^3 for f1 = log(1+x^2)
    double eq_A102_value = 0.0;     // 3 int f1^2 (f1'')^2
    double a102_combination = 0.0;  // 12 I_2 - 48 I_3 + 48 I_4
};

ClosedFormTable closed_form_table();

struct CrosscheckEntry {
    std::string name;
    double closed = 0.0;
    double numeric = 0.0;
    double error_estimate = 0.0;
};

struct CrosscheckReport {
    std::vector<CrosscheckEntry> entries;
    double max_abs_discrepancy = 0.0;
    double abs_tol = 0.0;
    bool pass = false;
};

// Requires abs_tol >= 1e-8; quadrature runs at abs_tol / 8.
CrosscheckReport quadrature_crosscheck(double abs_tol);
// Quadrature at quad_tol, pass threshold pass_tol (no lower limit on pass_tol).
CrosscheckReport quadrature_crosscheck(double quad_tol, double pass_tol);

}  // namespace fracheat
