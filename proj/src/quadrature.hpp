#pragma once

#include <functional>
#include <vector>

namespace illpose {

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1], ascending
    std::vector<double> weights;
};

// Supported orders: 4, 8, 16, 20, 32, 64.
const GaussRule& gauss_legendre(int n);

// Integral of f over [a, b] with adaptive Gauss-Kronrod.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-13);

// Integral of f over [a, inf).
double integrate_half_line(const std::function<double(double)>& f, double a, double tol = 1e-12);

} // namespace illpose
