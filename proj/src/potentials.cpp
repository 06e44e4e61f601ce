#include "chks/potentials.hpp"

#include "chks/errors.hpp"

#include <cmath>
#include <limits>

namespace chks {

PotentialSpec PotentialSpec::floryHuggins(double lambda) {
    return {PotentialKind::FloryHuggins, PotentialKind::FloryHuggins, 0, lambda};
}

PotentialSpec PotentialSpec::negLog(double lambda) { return {PotentialKind::NegLog, PotentialKind::NegLog, 0, lambda}; }

PotentialSpec PotentialSpec::regularized(PotentialKind base, int n, double lambda) {
    return {PotentialKind::Regularized, base, n, lambda};
}

const char* potentialName(PotentialKind kind) {
    switch (kind) {
    case PotentialKind::FloryHuggins: return "flory_huggins";
    case PotentialKind::NegLog: return "neg_log";
    case PotentialKind::Regularized: return "regularized";
    }
    return "?";
}

namespace {

void requireInterior(double r) {
    if (!(std::abs(r) < 1.0)) throw DomainViolation(r, 1.0 - std::abs(r));
}

// Raw singular formulas; callers guarantee |r| < 1.
double f1(PotentialKind k, double r) {
    if (k == PotentialKind::FloryHuggins) return (1.0 + r) * std::log1p(r) + (1.0 - r) * std::log1p(-r);
    return -(std::log1p(-r) + std::log1p(r));
}

double f1p(PotentialKind k, double r) {
    if (k == PotentialKind::FloryHuggins) return std::log1p(r) - std::log1p(-r);
    return 2.0 * r / ((1.0 - r) * (1.0 + r));
}

double f1pp(PotentialKind k, double r) {
    const double q = (1.0 - r) * (1.0 + r);
    if (k == PotentialKind::FloryHuggins) return 2.0 / q;
    return 2.0 * (1.0 + r * r) / (q * q);
}

} // namespace

double evalF1(const PotentialSpec& spec, double r) {
    if (!spec.singular()) return evalFn(spec.base, spec.n, r);
    requireInterior(r);
    return f1(spec.kind, r);
}

double evalF1prime(const PotentialSpec& spec, double r) {
    if (!spec.singular()) return evalFnPrime(spec.base, spec.n, r);
    requireInterior(r);
    return f1p(spec.kind, r);
}

double evalF1second(const PotentialSpec& spec, double r) {
    if (!spec.singular()) return evalFnSecond(spec.base, spec.n, r);
    requireInterior(r);
    return f1pp(spec.kind, r);
}

double evalF(const PotentialSpec& spec, double r) { return evalF1(spec, r) - 0.5 * spec.lambda * r * r; }

double resolvent(PotentialKind base, double weight, double r) {
    if (r == 0.0) return 0.0;
    // g(s) = s + w F1'(s) - r is increasing on (-1, 1) with g(0) = -r, so
    // the root lies between 0 and sign(r), and within |r| when |r| < 1.
    const double sgn = r > 0.0 ? 1.0 : -1.0;
    const double a = std::abs(r);
    double lo = 0.0;
    double hi = std::min(a, std::nextafter(1.0, 0.0));
    auto g = [&](double s) { return s + weight * f1p(base, s) - a; };
    if (g(hi) <= 0.0) return sgn * hi;
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double gs = g(s);
        if (gs == 0.0) break;
        if (gs > 0.0)
            hi = s;
        else
            lo = s;
        double next = s - gs / (1.0 + weight * f1pp(base, s));
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double change = std::abs(next - s);
        s = next;
        if (change <= 1e-15 || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) break;
    }
    return sgn * s;
}

double evalFnPrime(PotentialKind base, int n, double r) {
    const double w = 1.0 / n;
    const double s = resolvent(base, w, r);
    double v = n * (r - s);
    const double out = std::abs(r) - 1.0;
    if (out > 0.0) {
        const double n3 = static_cast<double>(n) * n * n;
        v += (r > 0.0 ? 1.0 : -1.0) * n3 * out;
    }
    return v;
}

double evalFnSecond(PotentialKind base, int n, double r) {
    const double w = 1.0 / n;
    const double s = resolvent(base, w, r);
    // d/dr of the Yosida map is F1''(s) / (1 + w F1''(s)).
    const double curv = f1pp(base, s);
    double v = std::isfinite(curv) ? curv / (1.0 + w * curv) : static_cast<double>(n);
    if (std::abs(r) > 1.0) v += static_cast<double>(n) * n * n;
    return v;
}

double evalFn(PotentialKind base, int n, double r) {
    const double w = 1.0 / n;
    const double s = resolvent(base, w, r);
    double v = f1(base, s) + 0.5 * n * (r - s) * (r - s);
    const double out = std::abs(r) - 1.0;
    if (out > 0.0) v += 0.5 * static_cast<double>(n) * n * n * out * out;
    return v;
}

} // namespace chks
