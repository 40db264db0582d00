#pragma once

// Full restricted-problem verification of the multiplier law: symmetric periodic
// orbits by Newton shooting, monodromy from the variational equations, and
// extraction of C from tr M - 4 = C mu + O(mu^2).

#include <array>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "resorb/integrator.hpp"
#include "resorb/kepler.hpp"
#include "resorb/perturbation.hpp"

namespace resorb {

/// Closest approach to either primary accepted by the vector field.
inline constexpr double kRtbpCollisionRadius = 1e-9;
inline constexpr double kDefaultCorrectorTol = 1e-10;

/// State and variational matrices use the component order (p_x, p_y, x, y).
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

Vec4 to_vector(const RtbpState& s);
RtbpState from_vector(const Vec4& v);

double rtbp_hamiltonian(const RtbpState& s, double mu);

/// Hamilton's equations with both primaries; throws CollisionError within
/// kRtbpCollisionRadius of either one.
Vec4 rtbp_derivatives(const RtbpState& s, double mu);

/// Jacobian of the vector field at s.
Mat4 rtbp_jacobian(const RtbpState& s, double mu);

struct FlowResult {
    RtbpState state;
    Mat4 stm = Mat4::Identity();  ///< identity unless requested
    std::size_t steps = 0;
};

/// Flows s for time t (either sign), optionally with the state transition matrix.
FlowResult rtbp_flow(const RtbpState& s, double mu, double t, bool with_stm = false,
                     const IntegratorOptions& opts = {});

struct PeriodicOrbit {
    ResonantFamily family;
    double mu = 0.0;
    RtbpState initial;     ///< y = p_x = 0
    double period = 0.0;
    double residual_y = 0.0;   ///< y(T/2)
    double residual_px = 0.0;  ///< p_x(T/2)
    double closure = 0.0;      ///< max-norm |state(T) - state(0)|
    int iterations = 0;
};

/// Initial state and half period of the unperturbed orbit of the family.
std::pair<RtbpState, double> unperturbed_seed(const ResonantFamily& f);

/// Newton shooting on (x0, T/2) with p_y(0) = G/x0, G held at its unperturbed value,
/// until |y(T/2)| and |p_x(T/2)| are both <= tol.
PeriodicOrbit refine_periodic_orbit(const ResonantFamily& f, double mu, double tol = kDefaultCorrectorTol,
                                    const IntegratorOptions& opts = {});

struct MonodromyReport {
    double mu = 0.0;
    Mat4 M = Mat4::Identity();
    std::array<std::complex<double>, 4> eigenvalues{};
    double trace = 0.0;
    double determinant = 0.0;
    double C_estimate = 0.0;      ///< (tr M - 4) / mu; NaN at mu = 0
    double trivial_pair_error = 0.0;  ///< max |lambda - 1| over the two eigenvalues nearest 1
    double reciprocal_error = 0.0;    ///< |lambda * lambda' - 1| for the nontrivial pair
    bool hyperbolic = false;          ///< nontrivial pair real and off the unit circle
};

/// Integrates the variational equations over one period from the identity.
MonodromyReport monodromy(const PeriodicOrbit& o, const IntegratorOptions& opts = {});

struct Extrapolation {
    double C = 0.0;
    double slope = 0.0;      ///< fitted coefficient of mu
    double residual = 0.0;   ///< rms misfit of the linear fit
    std::vector<double> mu;
    std::vector<double> estimates;
    std::vector<PeriodicOrbit> orbits;
    std::vector<MonodromyReport> reports;
};

/// Least-squares fit of estimates = C + c1 mu (mu strictly decreasing). Throws
/// ConvergenceError when the estimates do not approach the fitted limit monotonically.
Extrapolation fit_multiplier_law(std::span<const double> mu, std::span<const double> estimates);

/// Least-squares fit of C_estimate(mu) = C + c1 mu over mu_list (strictly decreasing),
/// each point refined concurrently. Throws ConvergenceError when successive estimates do
/// not approach the limit monotonically.
Extrapolation extrapolate_C(const ResonantFamily& f, std::span<const double> mu_list,
                            double tol = kDefaultCorrectorTol, const IntegratorOptions& opts = {},
                            unsigned threads = 0);

}  // namespace resorb
