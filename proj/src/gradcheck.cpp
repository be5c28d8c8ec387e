#include "cardioquant/gradcheck.hpp"

#include "cardioquant/error.hpp"

#include <algorithm>
#include <cmath>

namespace cq {

std::vector<double> finite_difference_gradient(const ScalarFn& loss, std::span<const double> point, double h)
{
    require(h > 0.0, ErrorKind::invalid_argument, "grad_check: step must be positive");
    std::vector<double> x(point.begin(), point.end());
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        x[i] = orig + h;
        const double up = loss(x);
        x[i] = orig - h;
        const double down = loss(x);
        x[i] = orig;
        require(std::isfinite(up) && std::isfinite(down), ErrorKind::numeric, "grad_check: non-finite loss value");
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

double grad_check(const ScalarFn& loss, std::span<const double> point, std::span<const double> analytic_grad, double h)
{
    require(point.size() == analytic_grad.size(), ErrorKind::shape, "grad_check: gradient length mismatch");
    for (double v : analytic_grad) require(std::isfinite(v), ErrorKind::numeric, "grad_check: non-finite gradient");
    const auto fd = finite_difference_gradient(loss, point, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i)
        worst = std::max(worst, std::abs(fd[i] - analytic_grad[i]) / std::max(1.0, std::abs(fd[i])));
    return worst;
}

}  // namespace cq
