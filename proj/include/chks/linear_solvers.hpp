#pragma once

#include <functional>
#include <span>

namespace chks {

using LinearOperator = std::function<void(std::span<const double> in, std::span<double> out)>;

struct SolveStats {
    int iterations = 0;
    double relResidual = 0.0;
    bool converged = false;
};

/// Preconditioned conjugate gradients for a symmetric positive (semi)definite
/// operator. With `zeroMean` the iterates and residuals are kept orthogonal to
/// constants, which makes the singular Neumann problem well posed. `x` holds
/// the initial guess on entry. A null preconditioner means identity.
SolveStats conjugateGradient(const LinearOperator& apply, const LinearOperator& precond,
                             std::span<const double> b, std::span<double> x, double relTol, int maxIter,
                             bool zeroMean = false);

/// Right-preconditioned restarted GMRES(m). `x` holds the initial guess.
SolveStats gmres(const LinearOperator& apply, const LinearOperator& precond, std::span<const double> b,
                 std::span<double> x, double relTol, int maxIter, int restart = 40);

} // namespace chks
