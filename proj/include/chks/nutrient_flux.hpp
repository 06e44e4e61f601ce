#pragma once

// Face-flux assembly for the nutrient equation
//   sigma_t = div(n grad sigma) - div(sigma u) + b,   u = chi n grad phi,
// shared by the time stepper and the subvolume flux-balance diagnostic.

#include "chks/coefficients.hpp"
#include "chks/grid.hpp"

namespace chks {

enum class Advection {
    Upwind, ///< first-order upwind face values
    Minmod, ///< MUSCL reconstruction with the minmod limiter
};

const char* advectionName(Advection a);

/// Nutrient mobility on faces: arithmetic mean of the adjacent cell values
/// n(phi, sigma); zero on boundary faces.
FaceField faceMobilityN(const ModelParams& params, const Field& phi, const Field& sigma);

/// Phase-field mobility on faces, same averaging as faceMobilityN.
FaceField faceMobilityM(const ModelParams& params, const Field& phi, const Field& sigma);

/// Chemotactic face velocity u_f = chi * n_f * (grad phi)_f.
FaceField chemotacticVelocity(double chi, const FaceField& nFaces, const Field& phi);

/// Advective flux u_f * sigma_f with sigma_f reconstructed on the upwind side.
FaceField advectiveFlux(const FaceField& u, const Field& sigma, Advection scheme);

/// Per-cell outflow rate sum_out |u_f| / h. A forward-Euler advection step of
/// size tau keeps sigma >= 0 when tau * rate * advectionGrowth(scheme) <= 1.
Field outflowRate(const FaceField& u);

/// Bound on (reconstructed face value) / (cell value) for nonnegative data.
double advectionGrowth(Advection scheme);

/// Time-integrated fluxes of one (possibly substepped) nutrient update. The
/// conserved storage is sigma itself, or T_n(sigma) in approximation mode.
struct NutrientBudget {
    FaceField diffusive; ///< integral over the step of n_f (grad sigma)_f
    FaceField advective; ///< integral over the step of the advective flux
    Field reaction;      ///< integral over the step of the applied source, per cell
    Field storagePrev;
    Field storageNext;
    double dt = 0.0;

    NutrientBudget() = default;
    NutrientBudget(const Grid& g, double dt);
};

/// Cell-aligned rectangle [i0, i1) x [j0, j1).
struct Subvolume {
    int i0 = 0, i1 = 0, j0 = 0, j1 = 1;

    static Subvolume whole(const Grid& g) { return {0, g.nx, 0, g.ny}; }
    static Subvolume leftHalf(const Grid& g) { return {0, g.nx / 2, 0, g.ny}; }
    /// Throws std::invalid_argument when empty or not inside the grid.
    void check(const Grid& g) const;
};

/// Terms of d/dt int_V sigma = (diffusive flux in) + (chemotactic flux in) +
/// int_V b, as rates over the step.
struct FluxBalance {
    double storageRate = 0.0;
    double diffusive = 0.0;
    double chemotaxis = 0.0;
    double source = 0.0;
    double imbalance = 0.0; ///< |lhs - rhs| / (sum of magnitudes), 0 when all vanish
};

FluxBalance fluxBalance(const NutrientBudget& budget, const Subvolume& v);

} // namespace chks
