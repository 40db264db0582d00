#pragma once

// Numerical evaluation of the resonance stability coefficient
//
//   C(e,p,q) = -6 pi p^2 (C1 + C2),
//   C1 = int_0^{2pi} (r/Delta1)_{theta theta} dF,   C2 = int_0^{2pi} cos(theta)/r dF,
//
// along the mu = 0 resonant track. The integrands are periodic and analytic in F,
// so the trapezoidal rule converges geometrically.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resorb/perturbation.hpp"

namespace resorb {

inline constexpr double kCollisionThreshold = 1e-6;
inline constexpr long kMaxQuadratureNodes = 1L << 20;
inline constexpr long kInitialQuadratureNodes = 64;
inline constexpr double kDefaultQuadratureTol = 1e-10;

struct CoefficientResult {
    double C = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    long nodes = 0;
    double err_estimate = 0.0;  ///< |C(N) - C(N/2)| at the accepted level
    double min_delta1 = 0.0;
};

/// Trapezoidal C, C1, C2 on a uniform F-grid, doubling from 64 nodes.
///
/// Accepted when |C(2N) - C(N)| <= tol |C(2N)|, or when the difference has reached the
/// rounding floor of the accumulated sum (so tiny coefficients at small e still resolve).
/// Sums are carried in long double.
///
/// Throws CollisionError when min Delta1 <= kCollisionThreshold, ConvergenceError at the
/// 2^20 node cap.
CoefficientResult compute_C(const ResonantFamily& f, double tol = kDefaultQuadratureTol);

/// Trapezoidal (C, C1, C2) with exactly `nodes` points; no convergence control.
CoefficientResult trapezoid_C(const ResonantFamily& f, long nodes);

/// Global minimum over F of the distance to the small primary along the track:
/// 4096-point scan, then Brent refinement of the best local minima.
double min_delta1(const ResonantFamily& f);

/// Per-family outcome of a sweep row. `status` is "ok", "collision", "no_convergence"
/// or "invalid".
struct FamilyOutcome {
    std::optional<CoefficientResult> result;
    double min_delta1 = 0.0;
    std::string status;
    std::string message;
};

struct SweepRow {
    double e = 0.0;
    std::array<FamilyOutcome, 2> families;
};

/// C for both canonical families at each e in the grid. Rows come back in grid order
/// regardless of `threads`; failing rows carry a status instead of being dropped.
std::vector<SweepRow> sweep_e(int p, int q, Direction dir, std::span<const double> e_grid,
                              double tol = kDefaultQuadratureTol, unsigned threads = 0);

}  // namespace resorb
