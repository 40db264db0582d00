#pragma once

// Levi-Civita regularization of collisions with the primary of mass 1 - mu, the
// regularized Hamiltonian K = (xi^2 + nu^2)(H - C), and action-angle variables of
// the mu = 0 problem for G != 0.

#include <array>
#include <vector>

#include "resorb/errors.hpp"
#include "resorb/integrator.hpp"
#include "resorb/kepler.hpp"

namespace resorb {

/// The action-angle construction degenerates (circular torus, e = 0).
class DegenerateError : public DomainError {
public:
    using DomainError::DomainError;
};

struct RegularizedState {
    double p_xi = 0.0;
    double p_nu = 0.0;
    double xi = 0.0;
    double nu = 0.0;
    double C_J = 0.0;  ///< Jacobi constant the state is regularized at
};

/// x = -mu + xi^2 - nu^2, y = 2 xi nu, with the canonical momenta. The branch xi >= 0
/// is chosen. C_J defaults to H(s), so that K(result) = 0.
RegularizedState lc_forward(const RtbpState& s, double mu);
RegularizedState lc_forward(const RtbpState& s, double mu, double C_J);

/// Inverse map. Throws CollisionError at xi = nu = 0, where the momenta are singular;
/// lc_position is defined there.
RtbpState lc_inverse(const RegularizedState& s, double mu);

/// (x, y) of a regularized state; defined everywhere.
std::array<double, 2> lc_position(const RegularizedState& s, double mu);

/// G = xi p_nu - nu p_xi, twice the angular momentum about the large primary.
double lc_angular_momentum(const RegularizedState& s);

/// Full regularized Hamiltonian. Throws CollisionError at the small primary when mu > 0.
double k_value(const RegularizedState& s, double mu);

/// Hamilton's equations of K: (dp_xi, dp_nu, dxi, dnu) / dtau.
std::array<double, 4> k_derivatives(const RegularizedState& s, double mu);

struct KFlowResult {
    RegularizedState state;
    double t = 0.0;  ///< physical time elapsed, dt = (xi^2 + nu^2) dtau
};

/// Flows s for fictitious time tau under K, tracking physical time.
KFlowResult k_flow(const RegularizedState& s, double mu, double tau, const IntegratorOptions& opts = {});

/// Samples of the K-flow at increasing fictitious times taus (taus[0] >= 0).
std::vector<KFlowResult> k_flow_samples(const RegularizedState& s, double mu, const std::vector<double>& taus,
                                        const IntegratorOptions& opts = {});

/// Which angle formula to use for g. Only `corrected` is right; the others reproduce the
/// two uncorrected forms (sin l coefficient four times too large, and |G| in place of G)
/// so that tests can show they fail.
enum class AngleFormula { corrected, uncorrected_sin_factor, uncorrected_abs_g };

struct ActionAngle {
    double L = 0.0;       ///< (K + 1) / omega
    double G = 0.0;
    double l = 0.0;       ///< in (-pi, pi]; l >= 0 iff R >= 0
    double g = 0.0;
    double a = 0.0;
    double e = 0.0;
    double L_star = 0.0;  ///< L - |G| / 2
    double omega = 0.0;   ///< (-G - 2C)^(1/2)
    double K = 0.0;
};

/// Action-angle variables of the mu = 0 problem at C = s.C_J. Throws DomainError when
/// G = 0 or the torus conditions fail, DegenerateError on the circular torus (e < 1e-6).
ActionAngle action_angle_from_state(const RegularizedState& s, AngleFormula formula = AngleFormula::corrected);

/// Closed-form integral of 1/(1 - e cos x) from 0 to l, continuous in l.
double anomaly_integral(double l, double e);

/// The mu = 0 state with actions (L, G), l = 0 and angle g on the level set C.
RegularizedState perihelion_state(double L, double G, double C, double g);

/// The mu = 0 state with actions (L, G) and angles (l, g), obtained by inverting the
/// construction (l in any range).
RegularizedState state_from_action_angle(double L, double G, double l, double g, double C);

struct AngleCycleReport {
    double G = 0.0;
    int sign = 1;                ///< + for G > 0, - for G < 0
    double r_cycle_dl = 0.0;     ///< change of l around the r-cycle
    double r_cycle_dh = 0.0;     ///< change of g + sign l / 2 around the r-cycle
    double theta_cycle_dl = 0.0;
    double theta_cycle_dh = 0.0;
    double max_error = 0.0;      ///< largest deviation from the (2 pi, 0) / (0, 2 pi) pattern
};

/// Walks the two basis cycles of the torus through s (fixed theta with r from r_min to
/// r_max and back; fixed r and R with theta once around), accumulating the unwrapped
/// change of l and g +- l/2. Report-only.
AngleCycleReport angle_consistency_check(const RegularizedState& s, AngleFormula formula = AngleFormula::corrected,
                                         int samples = 4096);

}  // namespace resorb
