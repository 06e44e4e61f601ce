#pragma once

#include "chks/coefficients.hpp"
#include "chks/diagnostics.hpp"
#include "chks/errors.hpp"
#include "chks/nutrient_flux.hpp"
#include "chks/potentials.hpp"
#include "chks/spectral.hpp"
#include "chks/state.hpp"
#include "chks/truncation.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <optional>

namespace chks {

enum class Mode {
    Full,          ///< chemotactic nutrient equation
    Sourceless,    ///< S = 0, b = 0, chi = 0: pure gradient flow
    OldModel,      ///< sigma_t - Lap sigma + chi Lap phi = b
    Approximation, ///< F_n and T_n regularized system
};

const char* modeName(Mode m);

struct SchemeConfig {
    double dt = 1e-3;
    Mode mode = Mode::Full;
    int approxN = 0; ///< truncation/regularization level (Approximation only)
    double newtonTol = 1e-11;
    int newtonMaxIter = 50;
    double linTol = 1e-10;      ///< GMRES tolerance floor in the Newton solve
    double nutrientTol = 1e-12; ///< CG tolerance of the nutrient increment
    Advection advection = Advection::Minmod;
    int maxHalvings = 5;
    double fractionToBoundary = 0.95;
};

/// Additional right-hand sides g_phi, g_sigma (manufactured solutions).
struct Forcing {
    std::function<double(double x, double y, double t)> phi;
    std::function<double(double x, double y, double t)> sigma;
};

struct StepInfo {
    int newtonIters = 0;
    std::vector<double> newtonHistory; ///< RMS residual per iteration
    double dtUsed = 0.0;
    int substeps = 1;
    NutrientBudget budget;
};

/// Semi-implicit splitting: a Newton-solved convex-splitting step for
/// (phi, mu) followed by a linearly implicit nutrient step.
class Stepper {
public:
    /// Throws ConfigError when the parameters are rejected by validate().
    Stepper(const Grid& g, const PotentialSpec& spec, const ModelParams& params, const SchemeConfig& cfg);
    ~Stepper();
    Stepper(const Stepper&) = delete;
    Stepper& operator=(const Stepper&) = delete;

    const Grid& grid() const { return grid_; }
    /// Potential actually used (Regularized in approximation mode).
    const PotentialSpec& potential() const { return spec_; }
    /// Parameters with the mode's simplifications applied.
    const ModelParams& params() const { return params_; }
    const SchemeConfig& config() const { return cfg_; }
    const Truncation* truncation() const { return trunc_ ? &*trunc_ : nullptr; }

    void setForcing(Forcing f) { forcing_ = std::move(f); }

    /// State with mu computed from phi0 and sigma0.
    State initialize(Field phi0, Field sigma0, double t0 = 0.0) const;

    /// Chemical potential mu = -eps Lap phi + (F1'(phi) - lambda phiLag)/eps - chi sigmaC.
    Field chemicalPotential(const Field& phi, const Field& phiLag, const Field& sigma) const;

    /// Newton solve of the phase-field step; returns (phi, mu) at the new time.
    std::pair<Field, Field> stepCH(const State& s, StepInfo* info = nullptr);

    /// Nutrient step given the new phi.
    Field stepSigma(const State& s, const Field& phiNext, StepInfo* info = nullptr);

    State step(const State& s, StepInfo* info = nullptr);

private:
    Field couplingSigma(const Field& sigma) const;
    Field stepSigmaOldModel(const State& s, const Field& phiNext, StepInfo& info);
    Field stepSigmaTransport(const State& s, const Field& phiNext, StepInfo& info);

    Grid grid_;
    PotentialSpec spec_;
    ModelParams params_;
    SchemeConfig cfg_;
    std::optional<Truncation> trunc_;
    Forcing forcing_;
    std::unique_ptr<NeumannSpectral> spectral_;
};

/// Step failure inside advance(): carries the step index, the original error
/// kind and the diagnostics recorded before the failure.
class StepFailure : public Error {
public:
    StepFailure(int step, std::string innerKind, const std::string& message, DiagnosticsSeries partial);
    const char* kind() const noexcept override { return innerKind.c_str(); }
    int step;
    std::string innerKind;
    DiagnosticsSeries partial;
};

struct AdvanceOptions {
    Subvolume subvolume{}; ///< flux-balance region; empty selects the left half
    double y0 = std::numeric_limits<double>::quiet_NaN(); ///< envelope anchor (default: mean of input phi)
    double t0 = std::numeric_limits<double>::quiet_NaN(); ///< envelope origin (default: input time)
    int firstStep = 1;
    std::function<void(const State&, const DiagnosticsRecord&)> observer;
};

struct AdvanceResult {
    State state;
    DiagnosticsSeries series;
};

/// Record for the initial state (step 0).
DiagnosticsRecord initialRecord(const Stepper& st, const State& s, const AdvanceOptions& opt = {});

/// nSteps steps with diagnostics after each. Throws StepFailure.
AdvanceResult advance(Stepper& st, State s, int nSteps, const AdvanceOptions& opt = {});

} // namespace chks
