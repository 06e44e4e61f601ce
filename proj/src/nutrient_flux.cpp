#include "chks/nutrient_flux.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chks {

namespace {

double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

template <class CellFn>
FaceField averageToFaces(const Grid& g, CellFn&& cell) {
    FaceField f(g);
    std::vector<double> c(g.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = cell(k);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) f.xf(i, j) = 0.5 * (c[g.index(i - 1, j)] + c[g.index(i, j)]);
    if (g.dim == 2)
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) f.yf(i, j) = 0.5 * (c[g.index(i, j - 1)] + c[g.index(i, j)]);
    return f;
}

// Face value of a 1D stencil (..., a, L | R, b, ...) for velocity sign.
double faceValue(double a, double l, double r, double b, double u, Advection scheme) {
    if (scheme == Advection::Upwind) return u >= 0.0 ? l : r;
    if (u >= 0.0) return l + 0.5 * minmod(l - a, r - l);
    return r - 0.5 * minmod(r - l, b - r);
}

} // namespace

const char* advectionName(Advection a) { return a == Advection::Upwind ? "upwind" : "minmod"; }

FaceField faceMobilityN(const ModelParams& params, const Field& phi, const Field& sigma) {
    requireSameGrid(phi, sigma, "faceMobilityN");
    return averageToFaces(phi.grid(), [&](std::size_t k) { return mobilityN(params, phi[k], sigma[k]); });
}

FaceField faceMobilityM(const ModelParams& params, const Field& phi, const Field& sigma) {
    requireSameGrid(phi, sigma, "faceMobilityM");
    return averageToFaces(phi.grid(), [&](std::size_t k) { return mobilityM(params, phi[k], sigma[k]); });
}

FaceField chemotacticVelocity(double chi, const FaceField& nFaces, const Field& phi) {
    FaceField u = gradient(phi);
    for (std::size_t k = 0; k < u.x.size(); ++k) u.x[k] *= chi * nFaces.x[k];
    for (std::size_t k = 0; k < u.y.size(); ++k) u.y[k] *= chi * nFaces.y[k];
    return u;
}

FaceField advectiveFlux(const FaceField& u, const Field& s, Advection scheme) {
    const Grid& g = s.grid();
    FaceField a(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double uf = u.xf(i, j);
            if (uf == 0.0) continue;
            // Mirror ghosts: the cell beyond the wall repeats the wall cell.
            const double left2 = s(std::max(i - 2, 0), j);
            const double right2 = s(std::min(i + 1, g.nx - 1), j);
            a.xf(i, j) = uf * faceValue(left2, s(i - 1, j), s(i, j), right2, uf, scheme);
        }
    if (g.dim == 2)
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double uf = u.yf(i, j);
                if (uf == 0.0) continue;
                const double below2 = s(i, std::max(j - 2, 0));
                const double above2 = s(i, std::min(j + 1, g.ny - 1));
                a.yf(i, j) = uf * faceValue(below2, s(i, j - 1), s(i, j), above2, uf, scheme);
            }
    return a;
}

Field outflowRate(const FaceField& u) {
    const Grid& g = u.grid;
    Field rate(g);
    const double ihx = 1.0 / g.hx();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double r = std::max(u.xf(i + 1, j), 0.0) * ihx + std::max(-u.xf(i, j), 0.0) * ihx;
            if (g.dim == 2) {
                const double ihy = 1.0 / g.hy();
                r += std::max(u.yf(i, j + 1), 0.0) * ihy + std::max(-u.yf(i, j), 0.0) * ihy;
            }
            rate(i, j) = r;
        }
    return rate;
}

double advectionGrowth(Advection scheme) { return scheme == Advection::Upwind ? 1.0 : 1.5; }

NutrientBudget::NutrientBudget(const Grid& g, double step)
    : diffusive(g), advective(g), reaction(g), storagePrev(g), storageNext(g), dt(step) {}

void Subvolume::check(const Grid& g) const {
    if (!(0 <= i0 && i0 < i1 && i1 <= g.nx && 0 <= j0 && j0 < j1 && j1 <= g.ny))
        throw std::invalid_argument("subvolume [" + std::to_string(i0) + "," + std::to_string(i1) + ")x[" +
                                    std::to_string(j0) + "," + std::to_string(j1) +
                                    ") is not a nonempty cell range of the grid");
}

FluxBalance fluxBalance(const NutrientBudget& b, const Subvolume& v) {
    const Grid& g = b.reaction.grid();
    v.check(g);
    const double vol = g.cellVolume();
    const double areaX = g.hy(); // x faces have transverse extent hy (1 in 1D)
    const double areaY = g.hx();

    double storage = 0.0, source = 0.0;
    for (int j = v.j0; j < v.j1; ++j)
        for (int i = v.i0; i < v.i1; ++i) {
            storage += b.storageNext(i, j) - b.storagePrev(i, j);
            source += b.reaction(i, j);
        }
    auto netOutward = [&](const FaceField& f) {
        double s = 0.0;
        for (int j = v.j0; j < v.j1; ++j) s += (f.xf(v.i1, j) - f.xf(v.i0, j)) * areaX;
        if (g.dim == 2)
            for (int i = v.i0; i < v.i1; ++i) s += (f.yf(i, v.j1) - f.yf(i, v.j0)) * areaY;
        return s;
    };

    FluxBalance out;
    out.storageRate = storage * vol / b.dt;
    out.source = source * vol / b.dt;
    out.diffusive = netOutward(b.diffusive) / b.dt;
    out.chemotaxis = -netOutward(b.advective) / b.dt;
    const double scale =
        std::abs(out.storageRate) + std::abs(out.diffusive) + std::abs(out.chemotaxis) + std::abs(out.source);
    const double gap = std::abs(out.storageRate - (out.diffusive + out.chemotaxis + out.source));
    out.imbalance = scale > 0.0 ? gap / scale : 0.0;
    return out;
}

} // namespace chks
