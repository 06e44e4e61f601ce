#include <doctest.h>

#include "chks/config.hpp"
#include "chks/diagnostics.hpp"
#include "chks/energy.hpp"
#include "chks/initial_conditions.hpp"
#include "chks/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace chks;
using std::numbers::pi;

namespace {

Field randomField(const Grid& g, double lo, double hi, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Field f(g);
    for (double& v : f.values()) v = u(gen);
    return f;
}

Field smooth(const Grid& g, double mean, double amp) {
    return Field::fromFunction(g, [&](double x, double y) {
        return mean + amp * std::cos(pi * x / g.lx) * (g.dim == 2 ? std::cos(2 * pi * y / g.ly) : 1.0);
    });
}

State makeState(const Field& phi, const Field& sigma, double t = 0.0) {
    State s;
    s.phi = phi;
    s.mu = Field(phi.grid());
    s.sigma = sigma;
    s.t = t;
    return s;
}

} // namespace

TEST_CASE("energy: closed-form values") {
    const Grid g = Grid::line(64, 1.0);
    const PotentialSpec fh = PotentialSpec::floryHuggins(0.0);
    ModelParams p;
    auto e = freeEnergy(makeState(Field(g, 0.0), Field(g, 0.0)), fh, p);
    CHECK(e.total == 0.0);
    p.chi = 1.0;
    e = freeEnergy(makeState(Field(g, 0.0), Field(g, 1.0)), fh, p);
    CHECK(e.mixing == doctest::Approx(0.0).scale(1.0));
    CHECK(e.total == doctest::Approx(e.ginzburgLandau + e.mixing));

    // Gradient part of cos(pi x): pi^2 / 4 + O(h^2).
    std::vector<double> err;
    for (int nx : {32, 64, 128}) {
        const Grid gn = Grid::line(nx, 1.0);
        const Field phi = Field::fromFunction(gn, [](double x, double) { return 0.5 * std::cos(pi * x); });
        const auto b = freeEnergy(makeState(phi, Field(gn, 0.0)), fh, ModelParams{});
        double potential = 0.0;
        for (int i = 0; i < nx; ++i) {
            const double r = phi(i);
            potential += ((1 + r) * std::log(1 + r) + (1 - r) * std::log(1 - r)) * gn.hx();
        }
        err.push_back(std::abs(b.ginzburgLandau - potential - 0.25 * pi * pi / 4));
    }
    CHECK(std::log2(err[0] / err[1]) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::log2(err[1] / err[2]) == doctest::Approx(2.0).epsilon(0.1));

    CHECK_THROWS_AS(freeEnergy(makeState(Field(g, 0.0), Field(g, -0.1)), fh, p), NegativeSigma);
    CHECK_THROWS_AS(freeEnergy(makeState(Field(g, 1.0), Field(g, 0.1)), fh, p), DomainViolation);
}

TEST_CASE("energy: coercivity witness on random states") {
    const Grid g = Grid::rect(16, 16, 2.0, 1.5);
    for (double chi : {0.0, 0.5, 3.0}) {
        ModelParams p;
        p.chi = chi;
        for (unsigned seed = 0; seed < 20; ++seed) {
            const Field phi = randomField(g, -0.999, 0.999, seed);
            const Field sigma = randomField(g, 0.0, 5.0, seed + 100);
            for (const auto& spec : {PotentialSpec::floryHuggins(2.0), PotentialSpec::negLog(1.0)})
                CHECK(coercivitySlack(makeState(phi, sigma), spec, p) >= 0.0);
        }
    }
}

TEST_CASE("energy: regularized lower bound is independent of n") {
    const Grid g = Grid::rect(12, 12, 1.0, 1.0);
    ModelParams p;
    p.chi = 0.5;
    for (int n : {3, 6, 12, 24}) {
        const PotentialSpec spec = PotentialSpec::regularized(PotentialKind::FloryHuggins, n, 2.0);
        const Truncation t(n);
        const double C = approximateLowerBoundConstant(spec, p);
        for (unsigned seed = 0; seed < 10; ++seed) {
            const Field phi = randomField(g, -2.0, 2.0, seed);
            const Field sigma = randomField(g, 0.0, 3.0 * n, seed + 7);
            const auto e = approximateFreeEnergy(makeState(phi, sigma), spec, p, t);
            double rhs = 0.5 * gradientEnergy(phi);
            for (std::size_t k = 0; k < phi.size(); ++k)
                rhs += (0.5 * evalF1(spec, phi[k]) + 0.5 * t.evalLn(sigma[k]) - C) * g.cellVolume();
            CHECK(e.total >= rhs);
        }
    }
}

TEST_CASE("stepper: constant state is a fixed point") {
    const Grid g = Grid::rect(8, 8, 1.0, 1.0);
    const PotentialSpec fh = PotentialSpec::floryHuggins(1.5);
    ModelParams p;
    SchemeConfig cfg;
    cfg.dt = 0.05;
    Stepper st(g, fh, p, cfg);
    const State s0 = st.initialize(Field(g, 0.3), Field(g, 0.0));
    const State s1 = st.step(s0);
    const double f = std::log(1.3 / 0.7) - 1.5 * 0.3;
    for (std::size_t k = 0; k < s1.phi.size(); ++k) {
        CHECK(s1.phi[k] == doctest::Approx(0.3).epsilon(1e-13));
        CHECK(s1.mu[k] == doctest::Approx(f).epsilon(1e-12));
        CHECK(s1.sigma[k] == 0.0);
    }
    const AdvanceResult r0 = advance(st, s0, 0);
    CHECK(r0.series.empty());
    CHECK(r0.state.phi.values()[0] == s0.phi[0]);
    // Logistic equilibrium sigma = 1 is another fixed point.
    const State e0 = st.initialize(Field(g, 0.3), Field(g, 1.0));
    const AdvanceResult r = advance(st, e0, 5);
    CHECK(r.series.size() == 5);
    for (std::size_t k = 0; k < e0.phi.size(); ++k) {
        CHECK(r.state.phi[k] == doctest::Approx(0.3).epsilon(1e-13));
        CHECK(r.state.sigma[k] == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("stepper: discrete mass law") {
    const Grid g = Grid::rect(16, 16, 4.0, 4.0);
    ModelParams p;
    p.chi = 1.0;
    p.m = 1.5;
    p.h = SourceH::constant(0.6);
    p.mobM = Mobility::rational(0.5, 1.5);
    SchemeConfig cfg;
    cfg.dt = 0.02;
    Stepper st(g, PotentialSpec::floryHuggins(3.0), p, cfg);
    State s = st.initialize(smooth(g, -0.2, 0.5), smooth(g, 1.0, 0.4));
    for (int k = 0; k < 5; ++k) {
        double meanS = 0.0;
        for (std::size_t c = 0; c < s.phi.size(); ++c) meanS += sourceS(p, s.phi[c], s.sigma[c]);
        meanS /= static_cast<double>(s.phi.size());
        StepInfo info;
        const State next = st.step(s, &info);
        CHECK(mean(next.phi) - mean(s.phi) == doctest::Approx(cfg.dt * meanS).epsilon(1e-12).scale(1e-3));
        CHECK(std::abs(mean(next.phi) - mean(s.phi) - cfg.dt * meanS) < 1e-13);
        for (std::size_t i = 1; i < info.newtonHistory.size(); ++i)
            CHECK(info.newtonHistory[i] < info.newtonHistory[i - 1]);
        s = next;
    }

    // Conservative case.
    ModelParams q;
    q.chi = 0.5;
    Stepper cons(g, PotentialSpec::floryHuggins(3.0), q, cfg);
    State c = cons.initialize(smooth(g, 0.1, 0.6), smooth(g, 1.0, 0.5));
    const double m0 = mean(c.phi);
    for (int k = 0; k < 10; ++k) c = cons.step(c);
    CHECK(std::abs(mean(c.phi) - m0) <= 1e-12);
}

TEST_CASE("stepper: nutrient step oracles") {
    const Grid g = Grid::rect(8, 8, 1.0, 1.0);
    ModelParams p;
    SchemeConfig cfg;
    cfg.dt = 0.1;
    Stepper st(g, PotentialSpec::floryHuggins(0.0), p, cfg);

    // Uniform data: scalar logistic step sigma1 = sigma0 (1 + dt k0) / (1 + dt kInf sigma0).
    for (double s0 : {0.5, 2.0}) {
        const State s = st.initialize(Field(g, 0.0), Field(g, s0));
        const Field sig = st.stepSigma(s, s.phi);
        for (std::size_t k = 0; k < sig.size(); ++k)
            CHECK(sig[k] == doctest::Approx(s0 * (1 + cfg.dt) / (1 + cfg.dt * s0)).epsilon(1e-13));
    }
    // Minimum principle anchor.
    const State z = st.initialize(smooth(g, 0.0, 0.5), Field(g, 0.0));
    const Field sz = st.stepSigma(z, z.phi);
    for (double v : sz.values()) CHECK(v == 0.0);
}

TEST_CASE("stepper: nutrient budget closes on every subvolume") {
    const Grid g = Grid::rect(16, 12, 4.0, 3.0);
    ModelParams p;
    p.chi = 2.0;
    p.p = 1.6;
    p.mobN = Mobility::rational(0.5, 2.0);
    for (auto adv : {Advection::Minmod, Advection::Upwind}) {
        SchemeConfig cfg;
        cfg.dt = 0.01;
        cfg.advection = adv;
        Stepper st(g, PotentialSpec::floryHuggins(2.0), p, cfg);
        State s = st.initialize(smooth(g, 0.0, 0.8), randomField(g, 0.1, 2.0, 3));
        for (int k = 0; k < 3; ++k) {
            StepInfo info;
            const State next = st.step(s, &info);
            for (const Subvolume& v : {Subvolume::whole(g), Subvolume::leftHalf(g), Subvolume{3, 11, 2, 7}}) {
                const FluxBalance fb = fluxBalance(info.budget, v);
                CHECK(fb.imbalance <= 1e-10);
            }
            const FluxBalance whole = fluxBalance(info.budget, Subvolume::whole(g));
            CHECK(std::abs(whole.diffusive) < 1e-12);
            CHECK(std::abs(whole.chemotaxis) < 1e-12);
            CHECK(next.sigma.min() >= 0.0);
            s = next;
        }
    }
}

TEST_CASE("stepper: old model with chi = 0 matches the full model with unit mobility") {
    const Grid g = Grid::rect(12, 12, 2.0, 2.0);
    ModelParams p;
    SchemeConfig full, old;
    full.dt = old.dt = 0.02;
    old.mode = Mode::OldModel;
    Stepper a(g, PotentialSpec::floryHuggins(2.0), p, full);
    Stepper b(g, PotentialSpec::floryHuggins(2.0), p, old);
    const State s = a.initialize(smooth(g, 0.1, 0.5), smooth(g, 1.0, 0.6));
    const State na = a.step(s), nb = b.step(s);
    for (std::size_t k = 0; k < s.sigma.size(); ++k) CHECK(na.sigma[k] == doctest::Approx(nb.sigma[k]).epsilon(1e-10));
}

TEST_CASE("stepper: approximation-mode nutrient step is the full step below n") {
    const Grid g = Grid::rect(12, 12, 2.0, 2.0);
    ModelParams p;
    p.chi = 1.0;
    SchemeConfig full, approx;
    full.dt = approx.dt = 0.01;
    approx.mode = Mode::Approximation;
    approx.approxN = 8;
    Stepper a(g, PotentialSpec::floryHuggins(2.0), p, full);
    Stepper b(g, PotentialSpec::floryHuggins(2.0), p, approx);
    CHECK_FALSE(b.potential().singular());
    REQUIRE(b.truncation() != nullptr);
    const State s = a.initialize(smooth(g, 0.1, 0.5), smooth(g, 2.0, 1.0));
    const Field phiNext = smooth(g, 0.1, 0.45);
    const Field sa = a.stepSigma(s, phiNext), sb = b.stepSigma(s, phiNext);
    for (std::size_t k = 0; k < sa.size(); ++k) CHECK(sb[k] == doctest::Approx(sa[k]).epsilon(1e-10));
}

TEST_CASE("stepper: step restriction after the allowed halvings") {
    const Grid g = Grid::rect(16, 16, 1.0, 1.0);
    ModelParams p;
    p.chi = 50.0;
    SchemeConfig cfg;
    cfg.dt = 0.5;
    cfg.maxHalvings = 0;
    cfg.advection = Advection::Upwind;
    Stepper st(g, PotentialSpec::floryHuggins(0.0), p, cfg);
    const State s = st.initialize(smooth(g, 0.0, 0.9), Field(g, 1.0));
    CHECK_THROWS_AS(st.stepSigma(s, s.phi), StepRestriction);
    cfg.maxHalvings = 12;
    Stepper relaxed(g, PotentialSpec::floryHuggins(0.0), p, cfg);
    StepInfo info;
    const Field sig = relaxed.stepSigma(s, s.phi, &info);
    CHECK(info.substeps > 1);
    CHECK(sig.min() >= 0.0);
}

TEST_CASE("stepper: rejected parameters") {
    ModelParams p;
    p.p = 2.5;
    CHECK_THROWS_AS(Stepper(Grid::line(8, 1.0), PotentialSpec::floryHuggins(0.0), p, SchemeConfig{}), ConfigError);
}

TEST_CASE("stepper: sourceless gradient flow dissipates energy") {
    const Grid g = Grid::rect(24, 24, 12.0, 12.0);
    ModelParams p;
    p.chi = 1.0;
    p.m = 0.5;
    p.h = SourceH::constant(0.2);
    SchemeConfig cfg;
    cfg.dt = 0.05;
    cfg.mode = Mode::Sourceless;
    Stepper st(g, PotentialSpec::floryHuggins(3.0), p, cfg);
    CHECK(st.params().chi == 0.0);
    CHECK(st.params().m == 0.0);
    IcSpec ic;
    ic.kind = IcKind::RandomPerturbed;
    ic.amplitude = 0.2;
    const State s = st.initialize(makeField(ic, g, 4), Field(g, 1.0));
    const AdvanceResult r = advance(st, s, 40);
    double prev = initialRecord(st, s).energyTotal;
    for (const auto& rec : r.series) {
        CHECK(rec.energyTotal <= prev + 1e-12 * std::abs(prev));
        CHECK(rec.dissipationResidual <= 1e-9);
        prev = rec.energyTotal;
    }
}

TEST_CASE("diagnostics: mean envelope") {
    auto [lo, hi] = meanEnvelope(0.3, 1.0, 0.5, 0.0);
    CHECK(lo == 0.3);
    CHECK(hi == 0.3);
    std::tie(lo, hi) = meanEnvelope(0.0, 1.0, 0.5, 60.0);
    CHECK(lo == doctest::Approx(-0.5));
    CHECK(hi == doctest::Approx(0.5));
    std::tie(lo, hi) = meanEnvelope(0.9, 2.0, 1.0, 1.0);
    CHECK(hi == doctest::Approx(0.9 * std::exp(-2.0) + 0.5 * (1 - std::exp(-2.0))));
    CHECK(hi == doctest::Approx(0.5541).epsilon(1e-3));
    CHECK(lo <= hi);
    CHECK_THROWS_AS(meanEnvelope(0.0, 0.0, 0.5, 1.0), std::domain_error);
    std::tie(lo, hi) = meanEnvelopeOrConstant(0.2, 0.0, 0.0, 3.0);
    CHECK(lo == 0.2);
    CHECK(hi == 0.2);
}

TEST_CASE("diagnostics: twin metrics") {
    const Grid g = Grid::rect(16, 16, 1.0, 1.0);
    const State a0 = makeState(smooth(g, 0.1, 0.3), smooth(g, 1.0, 0.2));
    State a1 = a0;
    a1.t = 0.1;
    a1.sigma += Field(g, 0.01);

    const TwinMetrics same = twinMetrics({a0, a1}, {a0, a1});
    CHECK(same.lhs() == 0.0);
    CHECK(same.rhs() == 0.0);
    CHECK(same.ratio() == 0.0);

    // Constant shift of sigma: only the mean terms react.
    const double c = 0.05;
    State b0 = a0, b1 = a1;
    b0.sigma += Field(g, c);
    b1.sigma += Field(g, c);
    const TwinMetrics m = twinMetrics({a0, a1}, {b0, b1});
    CHECK(m.rhsSigmaDual2 < 1e-28);
    CHECK(m.rhsSigmaMean2 == doctest::Approx(c * c));
    CHECK(m.supSigmaMean2 == doctest::Approx(c * c));
    CHECK(m.supPhiDual2 == 0.0);
    CHECK(m.supSigmaDual == doctest::Approx(c));
    CHECK(m.intSigmaL22 == doctest::Approx(0.1 * c * c));

    TwinAccumulator acc;
    State late = a1;
    late.t = 0.2;
    CHECK_THROWS_AS(acc.add(a1, late), ShapeMismatch);
    CHECK_THROWS_AS(acc.add(a0, makeState(Field(Grid::rect(8, 8, 1.0, 1.0), 0.0), Field(Grid::rect(8, 8, 1.0, 1.0), 1.0))),
                    ShapeMismatch);
}

TEST_CASE("stepper: regularized Newton converges with phi on the penalty kink") {
    // The tumor preset at n = 16 pushes max |phi| through 1 around step 23.
    const RunConfig c = loadConfig(std::string(CHKS_SOURCE_DIR) + "/configs/full_tumor.ini",
                                   {"scheme.mode=approximation", "scheme.n=16"});
    Stepper st(c.grid, c.potential, c.params, c.scheme);
    State s = st.initialize(makeField(c.phiIc, c.grid, c.seed), makeField(c.sigmaIc, c.grid, c.seed + 1));
    int worst = 0;
    for (int k = 0; k < 30; ++k) {
        StepInfo info;
        REQUIRE_NOTHROW(s = st.step(s, &info));
        worst = std::max(worst, info.newtonIters);
    }
    CHECK(s.phi.maxAbs() > 1.0);
    CHECK(worst <= 8);
}
