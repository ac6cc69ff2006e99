#include "pdestab/quadrature.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>

namespace pdestab {

double simpson(std::span<const double> values, double dx) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("simpson: need an odd sample count (even interval count)");
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i + 1 < n; i += 2) odd += values[i];
  for (std::size_t i = 2; i + 1 < n; i += 2) even += values[i];
  return dx / 3.0 * (values.front() + values.back() + 4.0 * odd + 2.0 * even);
}

std::vector<double> cumulative_simpson(std::span<const double> f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * dx * (f[0] + f[1]);
    return out;
  }
  // even nodes: composite Simpson over pairs of intervals
  for (std::size_t i = 2; i < n; i += 2)
    out[i] = out[i - 2] + dx / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
  // odd nodes: quadratic through (i-1, i, i+1), integrated over the first half
  for (std::size_t i = 1; i < n; i += 2) {
    if (i + 1 < n)
      out[i] = out[i - 1] + dx / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
    else  // trailing interval when the sample count is even
      out[i] = out[i - 1] + dx / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
  }
  return out;
}

namespace {
// Nodes/weights for 15-point Gauss-Legendre on [-1, 1] (positive half).
constexpr double kGx[8] = {
    0.0000000000000000,     0.20119409399743451,   0.39415134707756339,
    0.57097217260853885,    0.72441773136017005,   0.84820658341042722,
    0.93727339240070590,    0.98799251802048543};
constexpr double kGw[8] = {
    0.20257824192556127,    0.19843148532711158,   0.18616100001556221,
    0.16626920581699392,    0.13957067792615431,   0.10715922046717194,
    0.070366047488108125,   0.030753241996117268};
}  // namespace

double gauss15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double sum = kGw[0] * f(c);
  for (int i = 1; i < 8; ++i)
    sum += kGw[i] * (f(c + h * kGx[i]) + f(c - h * kGx[i]));
  return h * sum;
}

std::vector<double> fd_weights(double x0, std::span<const double> xs, int m) {
  const int n = static_cast<int>(xs.size());
  if (n <= m) throw std::invalid_argument("fd_weights: need more points than derivative order");
  std::vector<double> d(static_cast<std::size_t>(m + 1) * n, 0.0);
  auto D = [&](int k, int j) -> double& { return d[static_cast<std::size_t>(k) * n + j]; };
  double c1 = 1.0, c4 = xs[0] - x0;
  D(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          D(k, i) = c1 * (k * D(k - 1, i - 1) - c5 * D(k, i - 1)) / c2;
        D(0, i) = -c1 * c5 * D(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k)
        D(k, j) = (c4 * D(k, j) - k * D(k - 1, j)) / c3;
      D(0, j) = c4 * D(0, j) / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = D(m, j);
  return w;
}

}  // namespace pdestab
