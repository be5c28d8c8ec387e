#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cq {

using ScalarFn = std::function<double(std::span<const double>)>;

// Central finite differences at `point`; returns max_i |g_fd - g_an| / max(1, |g_fd|).
double grad_check(const ScalarFn& loss, std::span<const double> point, std::span<const double> analytic_grad,
                  double h = 1e-4);

std::vector<double> finite_difference_gradient(const ScalarFn& loss, std::span<const double> point, double h);

}  // namespace cq
