#include "chks/linear_solvers.hpp"

#include "chks/kernels.hpp"

#include <cmath>
#include <vector>

namespace chks {

namespace {

void removeMean(std::span<double> v) {
    if (v.empty()) return;
    double s = 0.0;
    for (double x : v) s += x;
    const double m = s / static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

} // namespace

SolveStats conjugateGradient(const LinearOperator& apply, const LinearOperator& precond,
                             std::span<const double> b, std::span<double> x, double relTol, int maxIter,
                             bool zeroMean) {
    const auto& k = kernels::active();
    const std::size_t n = b.size();
    std::vector<double> r(n), z(n), p(n), ap(n);

    std::vector<double> rhs(b.begin(), b.end());
    if (zeroMean) {
        removeMean(rhs);
        removeMean(x);
    }
    const double bnorm = std::sqrt(k.dot(rhs.data(), rhs.data(), n));
    SolveStats stats;
    if (bnorm == 0.0) {
        for (double& xi : x) xi = 0.0;
        stats.converged = true;
        return stats;
    }

    apply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    if (zeroMean) removeMean(r);

    double rnorm = std::sqrt(k.dot(r.data(), r.data(), n));
    stats.relResidual = rnorm / bnorm;
    if (stats.relResidual <= relTol) {
        stats.converged = true;
        return stats;
    }

    auto applyPrecond = [&](const std::vector<double>& in, std::vector<double>& out) {
        if (precond)
            precond(in, out);
        else
            out = in;
        if (zeroMean) removeMean(out);
    };

    applyPrecond(r, z);
    p = z;
    double rz = k.dot(r.data(), z.data(), n);
    for (int it = 1; it <= maxIter; ++it) {
        apply(p, ap);
        const double pap = k.dot(p.data(), ap.data(), n);
        if (!(pap > 0.0)) {
            stats.iterations = it;
            return stats;
        }
        const double alpha = rz / pap;
        k.axpy(alpha, p.data(), x.data(), n);
        k.axpy(-alpha, ap.data(), r.data(), n);
        if (zeroMean) removeMean(r);
        rnorm = std::sqrt(k.dot(r.data(), r.data(), n));
        stats.iterations = it;
        stats.relResidual = rnorm / bnorm;
        if (stats.relResidual <= relTol) {
            stats.converged = true;
            break;
        }
        applyPrecond(r, z);
        const double rzNew = k.dot(r.data(), z.data(), n);
        k.xpby(z.data(), rzNew / rz, p.data(), n);
        rz = rzNew;
    }
    if (zeroMean) removeMean(x);
    return stats;
}

SolveStats gmres(const LinearOperator& apply, const LinearOperator& precond, std::span<const double> b,
                 std::span<double> x, double relTol, int maxIter, int restart) {
    const auto& k = kernels::active();
    const std::size_t n = b.size();
    const int m = restart;
    SolveStats stats;

    const double bnorm = std::sqrt(k.dot(b.data(), b.data(), n));
    if (bnorm == 0.0) {
        for (double& xi : x) xi = 0.0;
        stats.converged = true;
        return stats;
    }

    // Krylov vectors are allocated on first use; most solves stop well short
    // of the restart length.
    std::vector<std::vector<double>> basis(1, std::vector<double>(n));
    std::vector<std::vector<double>> zs;
    std::vector<double> h(static_cast<std::size_t>(m + 1) * m), cs(m), sn(m), g(m + 1), w(n), r(n);
    auto H = [&](int i, int j) -> double& { return h[static_cast<std::size_t>(j) * (m + 1) + i]; };

    int total = 0;
    while (total < maxIter) {
        apply(x, r);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
        const double beta = std::sqrt(k.dot(r.data(), r.data(), n));
        stats.relResidual = beta / bnorm;
        if (stats.relResidual <= relTol) {
            stats.converged = true;
            return stats;
        }
        for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int j = 0;
        for (; j < m && total < maxIter; ++j) {
            ++total;
            if (zs.size() <= static_cast<std::size_t>(j)) zs.emplace_back(n);
            if (basis.size() <= static_cast<std::size_t>(j + 1)) basis.emplace_back(n);
            if (precond)
                precond(basis[j], zs[j]);
            else
                zs[j] = basis[j];
            apply(zs[j], w);
            for (int i = 0; i <= j; ++i) {
                H(i, j) = k.dot(w.data(), basis[i].data(), n);
                k.axpy(-H(i, j), basis[i].data(), w.data(), n);
            }
            const double hn = std::sqrt(k.dot(w.data(), w.data(), n));
            H(j + 1, j) = hn;
            if (hn > 0.0)
                for (std::size_t i = 0; i < n; ++i) basis[j + 1][i] = w[i] / hn;

            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
                H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
                H(i, j) = t;
            }
            const double a = H(j, j), c = H(j + 1, j);
            const double d = std::hypot(a, c);
            cs[j] = d > 0.0 ? a / d : 1.0;
            sn[j] = d > 0.0 ? c / d : 0.0;
            H(j, j) = d;
            H(j + 1, j) = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            stats.iterations = total;
            stats.relResidual = std::abs(g[j + 1]) / bnorm;
            if (stats.relResidual <= relTol || hn == 0.0) {
                ++j;
                break;
            }
        }

        // Back substitution and update x += Z y.
        std::vector<double> y(j);
        for (int i = j - 1; i >= 0; --i) {
            double s = g[i];
            for (int l = i + 1; l < j; ++l) s -= H(i, l) * y[l];
            y[i] = s / H(i, i);
        }
        for (int i = 0; i < j; ++i) k.axpy(y[i], zs[i].data(), x.data(), n);

        if (stats.relResidual <= relTol) {
            // Confirm with the true residual.
            apply(x, r);
            for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
            stats.relResidual = std::sqrt(k.dot(r.data(), r.data(), n)) / bnorm;
            stats.converged = stats.relResidual <= 10.0 * relTol;
            return stats;
        }
    }
    return stats;
}

} // namespace chks
