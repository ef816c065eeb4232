#pragma once

#include <functional>
#include <vector>

namespace optbench {

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

struct LbfgsOptions {
    std::size_t memory = 8;
    std::size_t max_iterations = 2000;
    double grad_tolerance = 1e-5;   ///< sup-norm of the numeric gradient
    double f_rel_tolerance = 1e-8;  ///< relative objective change
    double fd_step = 3e-6;          ///< central-difference step (scaled per coordinate)
};

struct LbfgsResult {
    std::vector<double> x;
    double f = 0;
    std::size_t iterations = 0;
    bool converged = false;
    double grad_norm = 0; ///< sup-norm at the final point
};

/// Minimize an unconstrained smooth objective with limited-memory BFGS and
/// central-difference gradients (two-point, step scaled by |x_i|).
/// Line search is backtracking Armijo with quadratic interpolation.
LbfgsResult lbfgs_minimize(const ObjectiveFn& f, std::vector<double> x0,
                           const LbfgsOptions& opts = {});

/// Central-difference gradient at x (same stepping rule as the optimizer).
std::vector<double> numeric_gradient(const ObjectiveFn& f, const std::vector<double>& x,
                                     double step = 3e-6);

/// Central-difference Hessian at x (symmetric, O(k^2) objective calls).
std::vector<std::vector<double>> numeric_hessian(const ObjectiveFn& f,
                                                 const std::vector<double>& x,
                                                 double step = 1e-4);

} // namespace optbench
