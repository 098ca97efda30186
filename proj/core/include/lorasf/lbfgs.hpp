#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lorasf {

/// Objective callback: writes the gradient at x into grad (same length as x)
/// and returns the function value.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
    int memory = 10;
    int max_iterations = 1000;
    double gradient_tolerance = 1e-4;  // sup-norm of the gradient
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    int max_line_search_steps = 40;
};

struct LbfgsResult {
    std::vector<double> x;
    double value = 0.0;
    double gradient_norm = 0.0;  // sup-norm at the final iterate
    int iterations = 0;
    bool converged = false;
    std::vector<double> value_trace;  // value at x0 and after each accepted step
};

/// Limited-memory BFGS with a strong-Wolfe line search. Deterministic: no
/// randomness, fixed evaluation order.
LbfgsResult lbfgs_minimize(const Objective& objective, std::span<const double> x0,
                           const LbfgsOptions& options = {});

}  // namespace lorasf
