#include "chks/energy.hpp"

#include "chks/errors.hpp"
#include "chks/nutrient_flux.hpp"

#include <cmath>

namespace chks {

namespace {

double entropy(double sigma) {
    if (sigma < -1e-14) throw NegativeSigma(sigma);
    return sigma <= 0.0 ? 0.0 : sigma * (std::log(sigma) - 1.0);
}

double ginzburgLandau(const Field& phi, const PotentialSpec& spec, double eps) {
    double bulk = 0.0;
    for (double r : phi.values()) bulk += evalF(spec, r);
    return 0.5 * eps * gradientEnergy(phi) + bulk * phi.grid().cellVolume() / eps;
}

// ln sigma + chi (1 - phi), the nutrient part of the variational derivative.
double nutrientPotential(double sigma, double phi, double chi) { return std::log(sigma) + chi * (1.0 - phi); }

} // namespace

EnergyBreakdown freeEnergy(const State& s, const PotentialSpec& spec, const ModelParams& params) {
    requireSameGrid(s.phi, s.sigma, "freeEnergy");
    EnergyBreakdown e;
    e.ginzburgLandau = ginzburgLandau(s.phi, spec, params.eps);
    double mix = 0.0;
    for (std::size_t k = 0; k < s.sigma.size(); ++k) {
        const double sg = s.sigma[k];
        mix += entropy(sg) + params.chi * std::max(sg, 0.0) * (1.0 - s.phi[k]);
    }
    e.mixing = mix * s.phi.grid().cellVolume();
    e.total = e.ginzburgLandau + e.mixing;
    return e;
}

EnergyBreakdown approximateFreeEnergy(const State& s, const PotentialSpec& spec, const ModelParams& params,
                                      const Truncation& trunc) {
    requireSameGrid(s.phi, s.sigma, "approximateFreeEnergy");
    EnergyBreakdown e;
    e.ginzburgLandau = ginzburgLandau(s.phi, spec, params.eps);
    double mix = 0.0;
    for (std::size_t k = 0; k < s.sigma.size(); ++k) {
        const double sg = s.sigma[k];
        if (sg < -1e-14) throw NegativeSigma(sg);
        const double sp = std::max(sg, 0.0);
        mix += trunc.evalLn(sp) + params.chi * trunc.apply(sp) * (1.0 - s.phi[k]);
    }
    e.mixing = mix * s.phi.grid().cellVolume();
    e.total = e.ginzburgLandau + e.mixing;
    return e;
}

DissipationTerms dissipationTerms(const State& prev, const State& next, double dt, const PotentialSpec& spec,
                                  const ModelParams& params, const Truncation* trunc) {
    const Grid& g = next.phi.grid();
    const double vol = g.cellVolume();
    DissipationTerms d;
    const double e0 = trunc ? approximateFreeEnergy(prev, spec, params, *trunc).total
                            : freeEnergy(prev, spec, params).total;
    const double e1 = trunc ? approximateFreeEnergy(next, spec, params, *trunc).total
                            : freeEnergy(next, spec, params).total;
    d.energyRate = (e1 - e0) / dt;

    const FaceField mFaces = faceMobilityM(params, prev.phi, prev.sigma);
    d.phase = gradientEnergy(next.mu, &mFaces);

    // Nutrient mobility n_f times the harmonic mean of sigma on each face.
    const FaceField nFaces = faceMobilityN(params, next.phi, prev.sigma);
    const double chi = params.chi;
    auto faceTerm = [&](std::size_t a, std::size_t b, double weight, double ih) {
        const double sa = next.sigma[a], sb = next.sigma[b];
        if (sa < kSigmaFloor || sb < kSigmaFloor) return 0.0;
        const double harmonic = 2.0 * sa * sb / (sa + sb);
        const double grad = (nutrientPotential(sb, next.phi[b], chi) - nutrientPotential(sa, next.phi[a], chi)) * ih;
        return weight * harmonic * grad * grad;
    };
    double nut = 0.0;
    const double ihx = 1.0 / g.hx();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) nut += faceTerm(g.index(i - 1, j), g.index(i, j), nFaces.xf(i, j), ihx);
    if (g.dim == 2) {
        const double ihy = 1.0 / g.hy();
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) nut += faceTerm(g.index(i, j - 1), g.index(i, j), nFaces.yf(i, j), ihy);
    }
    d.nutrient = nut * vol;

    // Power of the sources actually applied by the scheme: S at the old state,
    // b with explicit growth and linearized decay.
    double power = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        power += sourceS(params, prev.phi[k], prev.sigma[k]) * next.mu[k];
        const double s1 = next.sigma[k];
        if (s1 < kSigmaFloor) continue;
        const double s0 = std::max(prev.sigma[k], 0.0);
        const double b = beta(params, next.phi[k]) *
                         (params.kappa0 * s0 - params.kappaInf * std::pow(s0, params.p - 1.0) * s1);
        power += b * nutrientPotential(s1, next.phi[k], chi);
    }
    d.sourcePower = power * vol;
    return d;
}

double dissipationResidual(const State& prev, const State& next, double dt, const PotentialSpec& spec,
                           const ModelParams& params, const Truncation* trunc) {
    return dissipationTerms(prev, next, dt, spec, params, trunc).residual();
}

double coercivityConstant(const PotentialSpec& spec, const ModelParams&, const Grid& g) {
    // F1 >= 0 on [-1, 1] leaves -(lambda + 1)/2 phi^2 >= -(lambda + 1)/2;
    // 3/2 s ln s - s >= -1 - 3/(2e) and s ln s / 2 - s >= -e/2 bound the entropy.
    return ((spec.lambda + 1.0) / 2.0 + 1.0 + 1.5 / std::exp(1.0)) * g.volume();
}

double coercivitySlack(const State& s, const PotentialSpec& spec, const ModelParams& params) {
    const double total = freeEnergy(s, spec, params).total;
    double sl = 0.0;
    for (double v : s.sigma.values())
        if (v > 0.0) sl += std::abs(v * std::log(v));
    sl *= s.sigma.grid().cellVolume();
    return total + coercivityConstant(spec, params, s.phi.grid()) - 0.5 * h1Norm2(s.phi) - 0.5 * sl;
}

double approximateLowerBoundConstant(const PotentialSpec& spec, const ModelParams& params) {
    // 1/2 L_n - chi T_n is smallest at sigma = exp(2 chi).
    return 2.0 * spec.lambda + 0.5 * std::exp(2.0 * params.chi);
}

} // namespace chks
