#include "chks/stepper.hpp"

#include "chks/energy.hpp"
#include "chks/kernels.hpp"
#include "chks/linear_solvers.hpp"
#include "chks/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chks {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double rms(const Field& v) {
    const auto& k = kernels::active();
    return std::sqrt(k.dot(v.data(), v.data(), v.size()) / static_cast<double>(v.size()));
}

double sumInvH2(const Grid& g) {
    double s = 4.0 / (g.hx() * g.hx());
    if (g.dim == 2) s += 4.0 / (g.hy() * g.hy());
    return s;
}

double meanInterior(const FaceField& f) {
    const Grid& g = f.grid;
    double s = 0.0;
    std::size_t count = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i, ++count) s += f.xf(i, j);
    if (g.dim == 2)
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i, ++count) s += f.yf(i, j);
    return count ? s / static_cast<double>(count) : 0.0;
}

ModelParams effectiveParams(const ModelParams& p, Mode mode) {
    ModelParams e = p;
    if (mode == Mode::Sourceless) {
        e.m = 0.0;
        e.h = SourceH::constant(0.0);
        e.chi = 0.0;
        e.betaB = 0.0;
        e.betaB0 = 0.0;
    }
    return e;
}

Field sampleForcing(const std::function<double(double, double, double)>& fn, const Grid& g, double t) {
    if (!fn) return Field(g, 0.0);
    return Field::fromFunction(g, [&](double x, double y) { return fn(x, y, t); });
}

} // namespace

const char* modeName(Mode m) {
    switch (m) {
    case Mode::Full: return "full";
    case Mode::Sourceless: return "sourceless";
    case Mode::OldModel: return "old_model";
    case Mode::Approximation: return "approximation";
    }
    return "?";
}

Stepper::Stepper(const Grid& g, const PotentialSpec& spec, const ModelParams& params, const SchemeConfig& cfg)
    : grid_(g), spec_(spec), params_(effectiveParams(params, cfg.mode)), cfg_(cfg) {
    grid_.check();
    std::vector<std::string> issues;
    if (!(cfg.dt > 0.0)) issues.push_back("scheme: dt = " + formatNumber(cfg.dt) + " must be > 0");
    if (!(cfg.newtonTol > 0.0)) issues.push_back("scheme: newton_tol must be > 0");
    if (!(cfg.linTol > 0.0) || !(cfg.nutrientTol > 0.0)) issues.push_back("scheme: linear tolerances must be > 0");
    if (cfg.newtonMaxIter < 1) issues.push_back("scheme: newton_max_iter must be >= 1");
    if (!(cfg.fractionToBoundary > 0.0 && cfg.fractionToBoundary < 1.0))
        issues.push_back("scheme: fraction_to_boundary must be in (0, 1)");
    if (cfg.mode == Mode::Approximation) {
        if (cfg.approxN < 1) issues.push_back("scheme: approximation mode needs n >= 1");
        else {
            trunc_.emplace(cfg.approxN);
            spec_ = PotentialSpec::regularized(spec.singularKind(), cfg.approxN, spec.lambda);
        }
    }
    const ValidationReport rep = validate(params, g.dim, false);
    for (const auto& l : rep.lines()) issues.push_back(l);
    if (!issues.empty()) throw ConfigError(issues);
    spectral_ = std::make_unique<NeumannSpectral>(grid_);
}

Stepper::~Stepper() = default;

Field Stepper::couplingSigma(const Field& sigma) const {
    if (params_.chi == 0.0) return Field(grid_, 0.0);
    Field c = sigma;
    if (trunc_)
        for (double& v : c.values()) v = trunc_->apply(v);
    c *= params_.chi;
    return c;
}

Field Stepper::chemicalPotential(const Field& phi, const Field& phiLag, const Field& sigma) const {
    const double eps = params_.eps;
    Field mu = laplacian(phi);
    mu *= -eps;
    const Field coupling = couplingSigma(sigma);
    for (std::size_t k = 0; k < mu.size(); ++k)
        mu[k] += (evalF1prime(spec_, phi[k]) - spec_.lambda * phiLag[k]) / eps - coupling[k];
    return mu;
}

State Stepper::initialize(Field phi0, Field sigma0, double t0) const {
    requireSameGrid(phi0, sigma0, "initialize");
    if (!(phi0.grid() == grid_)) throw ShapeMismatch("initial data grid differs from the stepper grid");
    State s;
    s.mu = chemicalPotential(phi0, phi0, sigma0);
    s.phi = std::move(phi0);
    s.sigma = std::move(sigma0);
    s.t = t0;
    return s;
}

std::pair<Field, Field> Stepper::stepCH(const State& s, StepInfo* info) {
    const Grid& g = grid_;
    const double dt = cfg_.dt;
    const double eps = params_.eps;
    const std::size_t n = g.size();
    const bool singular = spec_.singular();
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = g.dim == 2 ? 1.0 / (g.hy() * g.hy()) : 0.0;
    const auto& kern = kernels::active();

    const FaceField mFaces = faceMobilityM(params_, s.phi, s.sigma);
    const double mBar = meanInterior(mFaces);
    double mMax = 0.0;
    for (double v : mFaces.x) mMax = std::max(mMax, v);
    for (double v : mFaces.y) mMax = std::max(mMax, v);

    // Explicit part: phi^n + dt (S^n + g_phi).
    Field explicitPart = s.phi;
    {
        const Field gphi = sampleForcing(forcing_.phi, g, s.t + dt);
        for (std::size_t k = 0; k < n; ++k)
            explicitPart[k] += dt * (sourceS(params_, s.phi[k], s.sigma[k]) + gphi[k]);
    }
    const Field coupling = couplingSigma(s.sigma);
    const double lambda = spec_.lambda;

    // mu(phi) with the lagged concave part and coupling.
    auto muOf = [&](const Field& phi, Field& mu) {
        kern.laplacian(phi.data(), mu.data(), g.nx, g.ny, cx, cy);
        for (std::size_t k = 0; k < n; ++k)
            mu[k] = -eps * mu[k] + (evalF1prime(spec_, phi[k]) - lambda * s.phi[k]) / eps - coupling[k];
    };
    // G(phi) = phi - explicit - dt div(M grad mu(phi)).
    Field mu(g), flux(g);
    auto residual = [&](const Field& phi, Field& G) {
        muOf(phi, mu);
        kern.weightedLaplacian(mu.data(), mFaces.x.data(), g.dim == 2 ? mFaces.y.data() : nullptr, flux.data(),
                               g.nx, g.ny, cx, cy);
        for (std::size_t k = 0; k < n; ++k) G[k] = phi[k] - explicitPart[k] - dt * flux[k];
    };

    Field phi = explicitPart;
    if (singular && phi.maxAbs() >= 1.0) phi = s.phi;

    // Without the barrier the step minimizes the convex functional
    // J = |phi - E|^2 / (2 dt) in the (-div M grad)^-1 metric + eps/2 |grad phi|^2
    //     + sum F1(phi)/eps - (lambda phiLag/eps + coupling) phi,
    // and the Newton matrix is dt (-div M grad) times its Hessian, so Newton
    // directions descend on J even where the residual norm does not decrease.
    auto dot = [](const Field& a, const Field& b) {
        double acc = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
        return acc;
    };
    Field zMerit(g), muMerit(g), wMerit(g), lapMerit(g);
    auto merit = [&](const Field& p, Field* zOut) {
        wMerit = p;
        wMerit -= explicitPart;
        const double shift = mean(wMerit);
        for (double& v : wMerit.values()) v -= shift;
        const LinearOperator negA = [&](std::span<const double> in, std::span<double> out) {
            kern.weightedLaplacian(in.data(), mFaces.x.data(), g.dim == 2 ? mFaces.y.data() : nullptr, out.data(),
                                   g.nx, g.ny, cx, cy);
            for (double& o : out) o = -o;
        };
        const LinearOperator pre = [&](std::span<const double> in, std::span<double> out) {
            spectral_->applyInverseSymbol(in, out, [&](double lam) { return lam > 0.0 ? mBar * lam : 1.0; });
        };
        Field z(g);
        const SolveStats st =
            conjugateGradient(negA, pre, wMerit.values(), z.values(), 1e-13, static_cast<int>(10 * n), true);
        if (!st.converged && st.relResidual > 1e-10)
            throw LinearSolveFailure("cg (merit)", st.iterations, st.relResidual);
        kern.laplacian(p.data(), lapMerit.data(), g.nx, g.ny, cx, cy);
        double J = dot(wMerit, z) / (2.0 * dt) - 0.5 * eps * dot(p, lapMerit);
        for (std::size_t k = 0; k < n; ++k)
            J += evalF1(spec_, p[k]) / eps - (lambda * s.phi[k] / eps + coupling[k]) * p[k];
        if (zOut) *zOut = std::move(z);
        return J;
    };

    Field G(g), trial(g), Gtrial(g), delta(g);
    std::vector<double> fpp(n), work(n), work2(n);
    std::vector<double> history;
    const double lapNorm = sumInvH2(g);

    residual(phi, G);
    double r = rms(G);
    int iters = 0;
    for (;; ++iters) {
        history.push_back(r);
        double fprimeMax = 0.0, fppMax = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            fprimeMax = std::max(fprimeMax, std::abs(evalF1prime(spec_, phi[k])));
            fppMax = std::max(fppMax, evalF1second(spec_, phi[k]));
        }
        // Round-off level of G: cancellation in phi and in dt div(M grad mu),
        // including the error of F1' from rounding phi near +-1.
        const double floor = 16.0 * kEps *
                             (phi.maxAbs() + explicitPart.maxAbs() +
                              dt * mMax * lapNorm *
                                  (eps * lapNorm * phi.maxAbs() + (fprimeMax + fppMax * phi.maxAbs()) / eps +
                                   lambda * s.phi.maxAbs() / eps + coupling.maxAbs()));
        const double gmax = G.maxAbs();
        if (gmax <= cfg_.newtonTol + floor) break;
        if (iters >= cfg_.newtonMaxIter)
            throw NewtonDivergence("iteration cap " + std::to_string(cfg_.newtonMaxIter) + " reached", history);

        for (std::size_t k = 0; k < n; ++k) fpp[k] = evalF1second(spec_, phi[k]) / eps;
        // Median of F1''/eps for the preconditioner: the few cells close to
        // +-1 become isolated outliers instead of skewing every mode.
        work = fpp;
        std::nth_element(work.begin(), work.begin() + n / 2, work.end());
        const double dBar = work[n / 2];

        const LinearOperator jac = [&](std::span<const double> in, std::span<double> out) {
            kern.laplacian(in.data(), work.data(), g.nx, g.ny, cx, cy);
            for (std::size_t k = 0; k < n; ++k) work[k] = -eps * work[k] + fpp[k] * in[k];
            kern.weightedLaplacian(work.data(), mFaces.x.data(), g.dim == 2 ? mFaces.y.data() : nullptr,
                                   work2.data(), g.nx, g.ny, cx, cy);
            for (std::size_t k = 0; k < n; ++k) out[k] = in[k] - dt * work2[k];
        };
        const LinearOperator pre = [&](std::span<const double> in, std::span<double> out) {
            spectral_->applyInverseSymbol(in, out, [&](double lam) {
                return 1.0 + dt * mBar * lam * (eps * lam + dBar);
            });
        };
        std::vector<double> rhs(n);
        for (std::size_t k = 0; k < n; ++k) rhs[k] = -G[k];
        std::fill(delta.values().begin(), delta.values().end(), 0.0);
        const double eta = std::max(cfg_.linTol, std::min(1e-4, gmax));
        const SolveStats st = gmres(jac, pre, rhs, delta.values(), eta, std::max(200, static_cast<int>(n)));
        if (!(st.relResidual <= 1e-2)) throw LinearSolveFailure("gmres", st.iterations, st.relResidual);
        // The flux part of the Jacobian has zero mean, so mean(delta) = -mean(G); impose
        // it exactly to keep the discrete mass law free of solver error.
        const double shift = -mean(G) - mean(delta);
        for (double& v : delta.values()) v += shift;

        auto stepLength = [&](const Field& d) {
            double alpha = 1.0;
            if (!singular) return alpha;
            const double tau = cfg_.fractionToBoundary;
            for (std::size_t k = 0; k < n; ++k) {
                if (d[k] == 0.0) continue;
                const double room = (d[k] > 0.0 ? 1.0 - phi[k] : 1.0 + phi[k]);
                alpha = std::min(alpha, tau * room / std::abs(d[k]));
            }
            return alpha;
        };
        double rTrial = r;
        auto search = [&](const Field& d, int maxHalvings) {
            double alpha = stepLength(d);
            // Armijo data of the convex merit, computed on first use.
            double J0 = 0.0, slope = 0.0;
            bool haveMerit = false;
            for (int ls = 0; ls < maxHalvings; ++ls) {
                for (std::size_t k = 0; k < n; ++k) trial[k] = phi[k] + alpha * d[k];
                residual(trial, Gtrial);
                rTrial = rms(Gtrial);
                if (rTrial < r) return true;
                if (!singular) {
                    if (!haveMerit) {
                        J0 = merit(phi, &zMerit);
                        muOf(phi, muMerit);
                        slope = dot(zMerit, d) / dt + dot(muMerit, d);
                        haveMerit = true;
                    }
                    if (slope < 0.0 && merit(trial, nullptr) <= J0 + 1e-4 * alpha * slope) return true;
                }
                alpha *= 0.5;
            }
            return false;
        };
        if (!search(delta, 40)) {
            history.push_back(rTrial);
            throw NewtonDivergence("line search could not reduce the residual", history);
        }
        std::swap(phi, trial);
        std::swap(G, Gtrial);
        r = rTrial;
    }
    if (info) {
        info->newtonIters = iters;
        info->newtonHistory = std::move(history);
    }
    Field muNext(g);
    muOf(phi, muNext);
    return {std::move(phi), std::move(muNext)};
}

Field Stepper::stepSigma(const State& s, const Field& phiNext, StepInfo* info) {
    StepInfo local;
    StepInfo& inf = info ? *info : local;
    if (cfg_.mode == Mode::OldModel) return stepSigmaOldModel(s, phiNext, inf);
    return stepSigmaTransport(s, phiNext, inf);
}

Field Stepper::stepSigmaOldModel(const State& s, const Field& phiNext, StepInfo& info) {
    const Grid& g = grid_;
    const std::size_t n = g.size();
    const double dt = cfg_.dt;
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = g.dim == 2 ? 1.0 / (g.hy() * g.hy()) : 0.0;
    const auto& kern = kernels::active();

    NutrientBudget budget(g, dt);
    budget.storagePrev = s.sigma;

    // A_f = chi (grad phi)_f, unit diffusion.
    FaceField adv = gradient(phiNext);
    for (double& v : adv.x) v *= params_.chi;
    for (double& v : adv.y) v *= params_.chi;
    const Field divA = divFlux(adv);
    const Field gs = sampleForcing(forcing_.sigma, g, s.t + dt);

    std::vector<double> decay(n), growth(n), rhs(n), lap(n);
    kern.laplacian(s.sigma.data(), lap.data(), g.nx, g.ny, cx, cy);
    for (std::size_t k = 0; k < n; ++k) {
        const double b = beta(params_, phiNext[k]);
        const double sp = std::max(s.sigma[k], 0.0);
        growth[k] = b * params_.kappa0 * s.sigma[k];
        decay[k] = b * params_.kappaInf * std::pow(sp, params_.p - 1.0);
        rhs[k] = dt * (lap[k] - divA[k] + growth[k] - decay[k] * s.sigma[k] + gs[k]);
    }
    double dBar = 0.0;
    for (double v : decay) dBar += v;
    dBar /= static_cast<double>(n);

    const LinearOperator op = [&](std::span<const double> in, std::span<double> out) {
        kern.laplacian(in.data(), out.data(), g.nx, g.ny, cx, cy);
        for (std::size_t k = 0; k < n; ++k) out[k] = (1.0 + dt * decay[k]) * in[k] - dt * out[k];
    };
    const LinearOperator pre = [&](std::span<const double> in, std::span<double> out) {
        spectral_->applyInverseSymbol(in, out, [&](double lam) { return 1.0 + dt * (dBar + lam); });
    };
    Field delta(g);
    const SolveStats st = conjugateGradient(op, pre, rhs, delta.values(), cfg_.nutrientTol, static_cast<int>(10 * n));
    if (!st.converged) throw LinearSolveFailure("cg (nutrient)", st.iterations, st.relResidual);

    Field next = s.sigma;
    next += delta;
    budget.diffusive = gradient(next);
    for (std::size_t k = 0; k < budget.diffusive.x.size(); ++k) budget.diffusive.x[k] *= dt;
    for (std::size_t k = 0; k < budget.diffusive.y.size(); ++k) budget.diffusive.y[k] *= dt;
    budget.advective = adv;
    for (double& v : budget.advective.x) v *= dt;
    for (double& v : budget.advective.y) v *= dt;
    for (std::size_t k = 0; k < n; ++k) budget.reaction[k] = dt * (growth[k] - decay[k] * next[k] + gs[k]);
    budget.storageNext = next;
    info.budget = std::move(budget);
    info.dtUsed = dt;
    info.substeps = 1;
    return next;
}

Field Stepper::stepSigmaTransport(const State& s, const Field& phiNext, StepInfo& info) {
    const Grid& g = grid_;
    const std::size_t n = g.size();
    const double dt = cfg_.dt;
    const auto& kern = kernels::active();
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = g.dim == 2 ? 1.0 / (g.hy() * g.hy()) : 0.0;
    const Truncation* tr = truncation();

    const FaceField nFaces = faceMobilityN(params_, phiNext, s.sigma);
    const double nBar = meanInterior(nFaces);
    const FaceField u = chemotacticVelocity(params_.chi, nFaces, phiNext);
    const Field rate = outflowRate(u);
    const double growthFactor = advectionGrowth(cfg_.advection);

    auto allowedStep = [&](const Field& sigma) {
        double allowed = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (rate[k] == 0.0) continue;
            const double w = tr ? tr->derivative(sigma[k]) : 1.0;
            allowed = std::min(allowed, w / (growthFactor * rate[k]));
        }
        return allowed;
    };
    const double allowed = allowedStep(s.sigma);
    int halvings = 0;
    double tau = dt;
    while (tau > allowed) {
        if (halvings == cfg_.maxHalvings) throw StepRestriction(tau, allowed);
        tau *= 0.5;
        ++halvings;
    }
    const int substeps = 1 << halvings;

    NutrientBudget budget(g, dt);
    budget.storagePrev = s.sigma;
    if (tr)
        for (double& v : budget.storagePrev.values()) v = tr->apply(v);

    std::vector<double> beta_(n);
    for (std::size_t k = 0; k < n; ++k) beta_[k] = beta(params_, phiNext[k]);

    Field sigma = s.sigma;
    std::vector<double> weight(n, 1.0), decay(n), growth(n), rhs(n), lap(n);
    for (int sub = 0; sub < substeps; ++sub) {
        if (sub > 0 && tau > allowedStep(sigma)) throw StepRestriction(tau, allowedStep(sigma));
        const double tNext = s.t + (sub + 1) * tau;
        const Field gs = sampleForcing(forcing_.sigma, g, tNext);
        const FaceField adv = advectiveFlux(u, sigma, cfg_.advection);
        const Field divA = divFlux(adv);
        kern.weightedLaplacian(sigma.data(), nFaces.x.data(), g.dim == 2 ? nFaces.y.data() : nullptr, lap.data(),
                               g.nx, g.ny, cx, cy);
        double dBar = 0.0, wBar = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double sp = std::max(sigma[k], 0.0);
            if (tr) weight[k] = tr->derivative(sigma[k]);
            growth[k] = beta_[k] * params_.kappa0 * sp;
            decay[k] = beta_[k] * params_.kappaInf * std::pow(sp, params_.p - 1.0);
            rhs[k] = tau * (lap[k] - divA[k] + growth[k] - decay[k] * sigma[k] + gs[k]);
            dBar += decay[k];
            wBar += weight[k];
        }
        dBar /= static_cast<double>(n);
        wBar /= static_cast<double>(n);

        // (W + tau D - tau div(n grad)) delta = rhs, an SPD M-matrix.
        const LinearOperator op = [&](std::span<const double> in, std::span<double> out) {
            kern.weightedLaplacian(in.data(), nFaces.x.data(), g.dim == 2 ? nFaces.y.data() : nullptr, out.data(),
                                   g.nx, g.ny, cx, cy);
            for (std::size_t k = 0; k < n; ++k) out[k] = (weight[k] + tau * decay[k]) * in[k] - tau * out[k];
        };
        const LinearOperator pre = [&](std::span<const double> in, std::span<double> out) {
            spectral_->applyInverseSymbol(in, out, [&](double lam) { return wBar + tau * (dBar + nBar * lam); });
        };
        Field delta(g);
        const SolveStats st =
            conjugateGradient(op, pre, rhs, delta.values(), cfg_.nutrientTol, static_cast<int>(10 * n));
        if (!st.converged) throw LinearSolveFailure("cg (nutrient)", st.iterations, st.relResidual);

        Field tilde = sigma;
        tilde += delta;
        // Budget of this substep, in terms of the implicit sigma.
        const FaceField gradTilde = gradient(tilde);
        for (std::size_t k = 0; k < gradTilde.x.size(); ++k) {
            budget.diffusive.x[k] += tau * nFaces.x[k] * gradTilde.x[k];
            budget.advective.x[k] += tau * adv.x[k];
        }
        for (std::size_t k = 0; k < gradTilde.y.size(); ++k) {
            budget.diffusive.y[k] += tau * nFaces.y[k] * gradTilde.y[k];
            budget.advective.y[k] += tau * adv.y[k];
        }
        for (std::size_t k = 0; k < n; ++k) budget.reaction[k] += tau * (growth[k] - decay[k] * tilde[k] + gs[k]);

        if (tr) {
            for (std::size_t k = 0; k < n; ++k) {
                const double sNew = tr->apply(sigma[k]) + weight[k] * delta[k];
                sigma[k] = tr->inverse(sNew, k);
            }
        } else {
            sigma = std::move(tilde);
        }
        std::size_t worst = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (sigma[k] < sigma[worst]) worst = k;
        if (sigma[worst] < -1e-12) throw PositivityLoss(sigma[worst], worst);
    }
    budget.storageNext = sigma;
    if (tr)
        for (double& v : budget.storageNext.values()) v = tr->apply(v);
    info.budget = std::move(budget);
    info.dtUsed = tau;
    info.substeps = substeps;
    return sigma;
}

State Stepper::step(const State& s, StepInfo* info) {
    StepInfo local;
    StepInfo& inf = info ? *info : local;
    auto [phi, mu] = stepCH(s, &inf);
    Field sigma = stepSigma(s, phi, &inf);
    State next;
    next.phi = std::move(phi);
    next.mu = std::move(mu);
    next.sigma = std::move(sigma);
    next.t = s.t + cfg_.dt;
    if (!next.phi.allFinite() || !next.sigma.allFinite() || !next.mu.allFinite())
        throw Error("non-finite values after step at t = " + formatNumber(next.t));
    return next;
}

StepFailure::StepFailure(int stepIndex, std::string inner, const std::string& message, DiagnosticsSeries series)
    : Error("step " + std::to_string(stepIndex) + ": " + message), step(stepIndex), innerKind(std::move(inner)),
      partial(std::move(series)) {}

namespace {

Subvolume resolveSubvolume(const Stepper& st, const AdvanceOptions& opt) {
    const Subvolume& v = opt.subvolume;
    if (v.i1 <= v.i0) return Subvolume::leftHalf(st.grid());
    v.check(st.grid());
    return v;
}

} // namespace

DiagnosticsRecord initialRecord(const Stepper& st, const State& s, const AdvanceOptions& opt) {
    const double y0 = std::isnan(opt.y0) ? mean(s.phi) : opt.y0;
    const double t0 = std::isnan(opt.t0) ? s.t : opt.t0;
    DiagnosticsRecord r = measureState(0, s, st.potential(), st.params(), st.truncation(), y0, t0);
    r.step = opt.firstStep - 1;
    return r;
}

AdvanceResult advance(Stepper& st, State s, int nSteps, const AdvanceOptions& opt) {
    AdvanceResult out;
    const double y0 = std::isnan(opt.y0) ? mean(s.phi) : opt.y0;
    const double t0 = std::isnan(opt.t0) ? s.t : opt.t0;
    const Subvolume sub = resolveSubvolume(st, opt);
    for (int k = 0; k < nSteps; ++k) {
        const int index = opt.firstStep + k;
        try {
            StepInfo info;
            State next = st.step(s, &info);
            DiagnosticsRecord r = measureState(index, next, st.potential(), st.params(), st.truncation(), y0, t0);
            State prevClipped = s, nextClipped = next;
            for (double& v : prevClipped.sigma.values()) v = std::max(v, 0.0);
            for (double& v : nextClipped.sigma.values()) v = std::max(v, 0.0);
            r.dissipationResidual = dissipationResidual(prevClipped, nextClipped, st.config().dt, st.potential(),
                                                        st.params(), st.truncation());
            r.fluxImbalance = fluxBalance(info.budget, sub).imbalance;
            r.newtonIters = info.newtonIters;
            r.dtUsed = info.dtUsed;
            if (opt.observer) opt.observer(next, r);
            out.series.push_back(std::move(r));
            s = std::move(next);
        } catch (const Error& e) {
            throw StepFailure(index, e.kind(), e.what(), std::move(out.series));
        }
    }
    out.state = std::move(s);
    return out;
}

} // namespace chks
