#include "resorb/integrator.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "resorb/errors.hpp"

namespace resorb {

std::size_t integrate(const OdeRhs& rhs, OdeState& x, double t0, double t1, const IntegratorOptions& opts) {
    namespace odeint = boost::numeric::odeint;
    if (t1 == t0) return 0;
    const double dt = std::copysign(std::min(opts.initial_step, std::abs(t1 - t0)), t1 - t0);
    auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_fehlberg78<OdeState>());
    try {
        return odeint::integrate_adaptive(stepper, rhs, x, t0, t1, dt);
    } catch (const odeint::step_adjustment_error& ex) {
        throw ConvergenceError(std::string("integrator step control failed: ") + ex.what());
    } catch (const odeint::no_progress_error& ex) {
        throw ConvergenceError(std::string("integrator made no progress: ") + ex.what());
    }
}

}  // namespace resorb
