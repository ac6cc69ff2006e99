#pragma once

#include <functional>
#include <span>
#include <vector>

namespace pdestab {

/// Composite Simpson rule over uniformly spaced samples.
/// Requires an even number of intervals (values.size() odd).
double simpson(std::span<const double> values, double dx);

/// Cumulative integral of uniformly spaced samples, fourth-order accurate.
/// Even nodes get composite Simpson; odd nodes use the 3-point half-panel
/// Newton-Cotes rule. out[0] = 0.
std::vector<double> cumulative_simpson(std::span<const double> values, double dx);

/// 15-point Gauss-Legendre quadrature of f on [a, b].
double gauss15(const std::function<double(double)>& f, double a, double b);

/// Finite-difference weights for the m-th derivative at x0 from the points
/// xs (Fornberg's algorithm).
std::vector<double> fd_weights(double x0, std::span<const double> xs, int m);

}  // namespace pdestab
