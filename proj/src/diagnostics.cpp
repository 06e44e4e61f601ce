#include "chks/diagnostics.hpp"

#include "chks/energy.hpp"
#include "chks/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace chks {

std::pair<double, double> meanEnvelope(double y0, double m, double H, double t) {
    if (!(m > 0.0)) throw std::domain_error("mean envelope needs m > 0");
    const double decay = std::exp(-m * t);
    const double drift = -std::expm1(-m * t) * H / m;
    return {y0 * decay - drift, y0 * decay + drift};
}

std::pair<double, double> meanEnvelopeOrConstant(double y0, double m, double H, double t) {
    if (m > 0.0) return meanEnvelope(y0, m, H, t);
    return {y0, y0};
}

DiagnosticsRecord measureState(int step, const State& s, const PotentialSpec& spec, const ModelParams& params,
                               const Truncation* trunc, double y0, double t0) {
    DiagnosticsRecord r;
    r.step = step;
    r.t = s.t;
    State clipped = s;
    for (double& v : clipped.sigma.values()) v = std::max(v, 0.0);
    const EnergyBreakdown e =
        trunc ? approximateFreeEnergy(clipped, spec, params, *trunc) : freeEnergy(clipped, spec, params);
    r.energyTotal = e.total;
    r.energyGL = e.ginzburgLandau;
    r.energyMix = e.mixing;
    r.phiMean = mean(s.phi);
    std::tie(r.phiMeanLo, r.phiMeanHi) = meanEnvelopeOrConstant(y0, params.m, params.h.supNorm(), s.t - t0);
    r.sigmaMin = s.sigma.min();
    r.sigmaMass = integral(s.sigma);
    r.sepDelta = 1.0 - s.phi.maxAbs();
    return r;
}

double TwinMetrics::lhs() const {
    return supPhiDual2 + supPhiMean2 + supPhiMean + supSigmaDual2 + supSigmaMean2 + intPhiV2 + intSigmaL22;
}

double TwinMetrics::rhs() const { return rhsPhiDual2 + rhsPhiMean2 + rhsPhiMean + rhsSigmaDual2 + rhsSigmaMean2; }

double TwinMetrics::ratio() const {
    const double l = lhs(), r = rhs();
    if (r > 0.0) return l / r;
    return l > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

void TwinAccumulator::add(const State& a, const State& b) {
    if (!(a.phi.grid() == b.phi.grid()) || !(a.sigma.grid() == b.sigma.grid()))
        throw ShapeMismatch("twin runs must share the grid");
    if (std::abs(a.t - b.t) > 1e-12 * std::max(1.0, std::abs(a.t)))
        throw ShapeMismatch("twin runs must share the timeline (t = " + formatNumber(a.t) + " vs " +
                            formatNumber(b.t) + ")");
    if (!samples_.empty() && !(a.t > samples_.back().t))
        throw ShapeMismatch("twin samples must have increasing times");

    const Field dphi = a.phi - b.phi;
    const Field dsig = a.sigma - b.sigma;
    TwinSample s;
    s.t = a.t;
    s.phiMeanDiff = mean(dphi);
    s.sigmaMeanDiff = mean(dsig);
    const double dp = dualNorm(dphi);
    const double ds = dualNorm(dsig);
    s.phiDual2 = dp * dp;
    s.sigmaDual2 = ds * ds;
    s.phiV2 = h1Norm2(dphi);
    s.sigmaL22 = inner(dsig, dsig);

    if (samples_.empty()) {
        m_.rhsPhiDual2 = s.phiDual2;
        m_.rhsPhiMean2 = s.phiMeanDiff * s.phiMeanDiff;
        m_.rhsPhiMean = std::abs(s.phiMeanDiff);
        m_.rhsSigmaDual2 = s.sigmaDual2;
        m_.rhsSigmaMean2 = s.sigmaMeanDiff * s.sigmaMeanDiff;
    } else {
        const TwinSample& prev = samples_.back();
        const double h = s.t - prev.t;
        m_.intPhiV2 += prev.phiV2 * h;
        m_.intSigmaL22 += prev.sigmaL22 * h;
    }
    m_.supPhiDual2 = std::max(m_.supPhiDual2, s.phiDual2);
    m_.supPhiMean2 = std::max(m_.supPhiMean2, s.phiMeanDiff * s.phiMeanDiff);
    m_.supPhiMean = std::max(m_.supPhiMean, std::abs(s.phiMeanDiff));
    m_.supSigmaDual2 = std::max(m_.supSigmaDual2, s.sigmaDual2);
    m_.supSigmaMean2 = std::max(m_.supSigmaMean2, s.sigmaMeanDiff * s.sigmaMeanDiff);
    m_.supSigmaDual =
        std::max(m_.supSigmaDual, std::sqrt(s.sigmaDual2 + s.sigmaMeanDiff * s.sigmaMeanDiff));
    samples_.push_back(s);
}

TwinMetrics twinMetrics(const std::vector<State>& runA, const std::vector<State>& runB) {
    if (runA.size() != runB.size()) throw ShapeMismatch("twin runs have different numbers of snapshots");
    TwinAccumulator acc;
    for (std::size_t k = 0; k < runA.size(); ++k) acc.add(runA[k], runB[k]);
    return acc.metrics();
}

} // namespace chks
