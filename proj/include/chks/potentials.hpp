#pragma once

namespace chks {

enum class PotentialKind {
    FloryHuggins, ///< (1+r)ln(1+r) + (1-r)ln(1-r)
    NegLog,       ///< -ln(1-r^2)
    Regularized,  ///< Moreau-Yosida smoothing of a singular base plus an outer penalty
};

/// Configuration potential F = F1 + F2 with F2(r) = -lambda r^2 / 2.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::FloryHuggins;
    PotentialKind base = PotentialKind::FloryHuggins; ///< singular kind behind a Regularized spec
    int n = 0;                                        ///< regularization index (Regularized only)
    double lambda = 0.0;

    static PotentialSpec floryHuggins(double lambda);
    static PotentialSpec negLog(double lambda);
    static PotentialSpec regularized(PotentialKind base, int n, double lambda);

    bool singular() const { return kind != PotentialKind::Regularized; }
    /// The singular kind whose derivative is evaluated (the base for Regularized).
    PotentialKind singularKind() const { return singular() ? kind : base; }
};

const char* potentialName(PotentialKind kind);

// Convex part F1 and its derivatives. For singular kinds |r| < 1 is required
// (DomainViolation otherwise); Regularized specs are defined on all reals and
// dispatch to the F_n family below.
double evalF1(const PotentialSpec& spec, double r);
double evalF1prime(const PotentialSpec& spec, double r);
double evalF1second(const PotentialSpec& spec, double r);

/// Full potential F = F1 - lambda r^2 / 2.
double evalF(const PotentialSpec& spec, double r);

/// Resolvent of the monotone graph F1': the unique s in (-1, 1) with
/// s + weight * F1'(s) = r. Safeguarded Newton with bisection fallback.
double resolvent(PotentialKind base, double weight, double r);

// Regularized family: Yosida approximation of F1' with parameter 1/n plus
// the outer penalty n^3 (|r|-1)_+ sign r.
double evalFnPrime(PotentialKind base, int n, double r);
double evalFnSecond(PotentialKind base, int n, double r);
/// Antiderivative of evalFnPrime with F_n(0) = 0: Moreau envelope of F1 plus
/// n^3 (|r|-1)_+^2 / 2.
double evalFn(PotentialKind base, int n, double r);

} // namespace chks
