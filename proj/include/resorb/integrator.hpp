#pragma once

// Adaptive Runge-Kutta-Fehlberg 7(8) driver on top of Boost.Odeint.

#include <cstddef>
#include <functional>
#include <vector>

namespace resorb {

struct IntegratorOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    double initial_step = 1e-3;
};

using OdeState = std::vector<double>;
using OdeRhs = std::function<void(const OdeState& x, OdeState& dxdt, double t)>;

/// Advances x from t0 to exactly t1 (t1 < t0 integrates backward). Returns the number
/// of accepted steps. Throws ConvergenceError if the step controller gives up;
/// exceptions thrown by the right-hand side propagate unchanged.
std::size_t integrate(const OdeRhs& rhs, OdeState& x, double t0, double t1, const IntegratorOptions& opts = {});

}  // namespace resorb
