#pragma once

#include "chks/coefficients.hpp"
#include "chks/nutrient_flux.hpp"
#include "chks/potentials.hpp"
#include "chks/state.hpp"
#include "chks/truncation.hpp"

#include <string>
#include <utility>
#include <vector>

namespace chks {

/// Per-step scalars. Column order of the diagnostics CSV follows the field
/// order here.
struct DiagnosticsRecord {
    int step = 0;
    double t = 0.0;
    double energyTotal = 0.0;
    double energyGL = 0.0;
    double energyMix = 0.0;
    double dissipationResidual = 0.0;
    double phiMean = 0.0;
    double phiMeanLo = 0.0; ///< analytic envelope of the mean
    double phiMeanHi = 0.0;
    double sigmaMin = 0.0;
    double sigmaMass = 0.0;
    double sepDelta = 0.0; ///< 1 - max |phi|
    double fluxImbalance = 0.0;
    int newtonIters = 0;
    double dtUsed = 0.0;
    std::string status = "ok";
};

using DiagnosticsSeries = std::vector<DiagnosticsRecord>;

/// Bounds of the mean of phi for S = -m phi + h with |h| <= H. Throws
/// std::domain_error for m <= 0.
std::pair<double, double> meanEnvelope(double y0, double m, double H, double t);

/// Envelope as used by the diagnostics: the constant y0 when m == 0.
std::pair<double, double> meanEnvelopeOrConstant(double y0, double m, double H, double t);

/// Fill the state-only fields of a record (energy, means, sigma statistics,
/// separation). Negative sigma round-off is clipped for the energy only.
/// `trunc` selects the regularized energy.
DiagnosticsRecord measureState(int step, const State& s, const PotentialSpec& spec, const ModelParams& params,
                               const Truncation* trunc, double y0, double t0);

/// Left-hand and initial-data terms of the continuous-dependence estimate.
struct TwinMetrics {
    // sup over sampled times
    double supPhiDual2 = 0.0;   ///< ||(phi1 - phi2) - mean diff||_*^2
    double supPhiMean2 = 0.0;   ///< |mean diff phi|^2
    double supPhiMean = 0.0;    ///< |mean diff phi|
    double supSigmaDual2 = 0.0; ///< ||(sigma1 - sigma2) - mean diff||_*^2
    double supSigmaMean2 = 0.0; ///< |mean diff sigma|^2
    // time integrals (left endpoint rule)
    double intPhiV2 = 0.0;    ///< int ||phi1 - phi2||_V^2 dt
    double intSigmaL22 = 0.0; ///< int ||sigma1 - sigma2||^2 dt
    // initial data
    double rhsPhiDual2 = 0.0;
    double rhsPhiMean2 = 0.0;
    double rhsPhiMean = 0.0;
    double rhsSigmaDual2 = 0.0;
    double rhsSigmaMean2 = 0.0;
    /// sup_t of the full dual norm sqrt(||fluct||_*^2 + |mean diff|^2) of sigma1 - sigma2.
    double supSigmaDual = 0.0;

    double lhs() const;
    double rhs() const;
    /// lhs / rhs; infinity when rhs == 0 < lhs, 0 when both vanish.
    double ratio() const;
};

struct TwinSample {
    double t = 0.0;
    double phiDual2 = 0.0;
    double phiMeanDiff = 0.0;
    double sigmaDual2 = 0.0;
    double sigmaMeanDiff = 0.0;
    double phiV2 = 0.0;
    double sigmaL22 = 0.0;
};

/// Streaming evaluation of TwinMetrics over paired snapshots. The first pair
/// added is the initial data.
class TwinAccumulator {
public:
    /// Throws ShapeMismatch for different grids or times.
    void add(const State& a, const State& b);

    const TwinMetrics& metrics() const { return m_; }
    const std::vector<TwinSample>& samples() const { return samples_; }

private:
    TwinMetrics m_;
    std::vector<TwinSample> samples_;
};

TwinMetrics twinMetrics(const std::vector<State>& runA, const std::vector<State>& runB);

} // namespace chks
