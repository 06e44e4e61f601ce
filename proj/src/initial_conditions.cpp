#include "chks/initial_conditions.hpp"

#include "chks/errors.hpp"

#include <cmath>
#include <numbers>

namespace chks {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

const char* icKindName(IcKind k) {
    switch (k) {
    case IcKind::Uniform: return "uniform";
    case IcKind::CosineBump: return "cosine_bump";
    case IcKind::RandomPerturbed: return "random_perturbed";
    case IcKind::TumorSeed: return "tumor_seed";
    }
    return "?";
}

bool parseIcKind(const std::string& s, IcKind& out) {
    for (IcKind k : {IcKind::Uniform, IcKind::CosineBump, IcKind::RandomPerturbed, IcKind::TumorSeed})
        if (s == icKindName(k)) {
            out = k;
            return true;
        }
    return false;
}

void addCosinePerturbation(Field& f, double amplitude) {
    const Grid& g = f.grid();
    const double pi = std::numbers::pi;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double shape = std::cos(pi * g.xc(i) / g.lx);
            if (g.dim == 2) shape *= std::cos(pi * g.yc(j) / g.ly);
            f(i, j) += amplitude * shape;
        }
}

Field makeField(const IcSpec& ic, const Grid& g, std::uint64_t seed) {
    switch (ic.kind) {
    case IcKind::Uniform: return Field(g, ic.mean);
    case IcKind::CosineBump: {
        Field f(g, ic.mean);
        addCosinePerturbation(f, ic.amplitude);
        return f;
    }
    case IcKind::RandomPerturbed: {
        SplitMix64 rng(seed);
        Field f(g);
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = ic.mean + ic.amplitude * (2.0 * rng.uniform() - 1.0);
        return f;
    }
    case IcKind::TumorSeed: {
        const double cx = ic.centerX < 0.0 ? 0.5 * g.lx : ic.centerX;
        const double cy = ic.centerY < 0.0 ? 0.5 * g.ly : ic.centerY;
        return Field::fromFunction(g, [&](double x, double y) {
            const double dy = g.dim == 2 ? y - cy : 0.0;
            const double r = std::hypot(x - cx, dy);
            return ic.mean + (ic.inside - ic.mean) * 0.5 * (1.0 - std::tanh((r - ic.radius) / ic.width));
        });
    }
    }
    return Field(g, ic.mean);
}

std::vector<std::string> checkInitialData(const Field& phi0, const Field& sigma0, bool singular) {
    std::vector<std::string> issues;
    const double m = mean(phi0);
    if (!(m > -1.0 && m < 1.0))
        issues.push_back("initial data: mean of phi0 = " + formatNumber(m) + " must lie in the open interval (-1, 1)");
    if (singular && !(phi0.maxAbs() < 1.0))
        issues.push_back("initial data: max |phi0| = " + formatNumber(phi0.maxAbs()) +
                         " must be < 1 for a singular potential");
    if (!(sigma0.min() >= 0.0))
        issues.push_back("initial data: min of sigma0 = " + formatNumber(sigma0.min()) + " must be >= 0");
    if (!phi0.allFinite() || !sigma0.allFinite()) issues.push_back("initial data: values must be finite");
    return issues;
}

} // namespace chks
