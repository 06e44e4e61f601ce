#pragma once

#include "chks/coefficients.hpp"
#include "chks/potentials.hpp"
#include "chks/state.hpp"
#include "chks/truncation.hpp"

namespace chks {

struct EnergyBreakdown {
    double total = 0.0;
    double ginzburgLandau = 0.0; ///< int (eps/2)|grad phi|^2 + F(phi)/eps
    double mixing = 0.0;         ///< int sigma(ln sigma - 1) + chi sigma (1 - phi)
};

/// Throws DomainViolation (singular potentials) or NegativeSigma.
EnergyBreakdown freeEnergy(const State& s, const PotentialSpec& spec, const ModelParams& params);

/// Energy of the regularized system: F_n in place of F1, L_n(sigma) in place
/// of sigma(ln sigma - 1) and chi T_n(sigma)(1 - phi) as coupling. `spec`
/// must be a Regularized spec.
EnergyBreakdown approximateFreeEnergy(const State& s, const PotentialSpec& spec, const ModelParams& params,
                                      const Truncation& trunc);

/// Terms of the discrete energy budget between consecutive states.
struct DissipationTerms {
    double energyRate = 0.0;  ///< (F(next) - F(prev)) / dt
    double phase = 0.0;       ///< int m |grad mu|^2
    double nutrient = 0.0;    ///< int n sigma |grad(ln sigma + chi(1 - phi))|^2
    double sourcePower = 0.0; ///< int S mu + int b (ln sigma + chi(1 - phi))
    double residual() const { return energyRate + phase + nutrient - sourcePower; }
};

/// Cells with sigma below this value are treated as empty.
inline constexpr double kSigmaFloor = 1e-300;

/// `trunc` selects the regularized energy (approximation mode).
DissipationTerms dissipationTerms(const State& prev, const State& next, double dt, const PotentialSpec& spec,
                                  const ModelParams& params, const Truncation* trunc = nullptr);

/// Signed violation of the discrete energy law; <= 0 when it holds.
double dissipationResidual(const State& prev, const State& next, double dt, const PotentialSpec& spec,
                           const ModelParams& params, const Truncation* trunc = nullptr);

/// Constant C in total + C >= 1/2 ||phi||_V^2 + 1/2 ||sigma ln sigma||_1,
/// valid for eps = 1, |phi| <= 1 and sigma >= 0.
double coercivityConstant(const PotentialSpec& spec, const ModelParams& params, const Grid& g);

/// Slack of that inequality: total + C - (1/2 ||phi||_V^2 + 1/2 ||sigma ln sigma||_1).
double coercivitySlack(const State& s, const PotentialSpec& spec, const ModelParams& params);

/// n-independent constant C in F_n >= int (1/2|grad phi|^2 + F_n/2 + L_n/2 - C),
/// valid for eps = 1, |phi| <= 2 and n >= exp(2 chi).
double approximateLowerBoundConstant(const PotentialSpec& spec, const ModelParams& params);

} // namespace chks
