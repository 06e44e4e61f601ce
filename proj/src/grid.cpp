#include "chks/grid.hpp"

#include "chks/errors.hpp"
#include "chks/kernels.hpp"
#include "chks/linear_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chks {

Grid Grid::line(int nx, double lx) {
    Grid g{1, nx, 1, lx, 1.0};
    g.check();
    return g;
}

Grid Grid::rect(int nx, int ny, double lx, double ly) {
    Grid g{2, nx, ny, lx, ly};
    g.check();
    return g;
}

void Grid::check() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
    if (nx < 4) throw std::invalid_argument("grid needs nx >= 4");
    if (dim == 2 && ny < 4) throw std::invalid_argument("2D grid needs ny >= 4");
    if (dim == 1 && ny != 1) throw std::invalid_argument("1D grid needs ny == 1");
    if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("grid lengths must be positive");
}

Field::Field(const Grid& g, double value) : grid_(g), v_(g.size(), value) {}

Field::Field(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
    if (v_.size() != g.size()) throw ShapeMismatch("field size does not match grid");
}

void requireSameGrid(const Field& a, const Field& b, const char* what) {
    if (!(a.grid() == b.grid())) throw ShapeMismatch(std::string(what) + ": grids differ");
}

Field& Field::operator+=(const Field& o) {
    requireSameGrid(*this, o, "field +=");
    kernels::active().axpy(1.0, o.data(), v_.data(), v_.size());
    return *this;
}

Field& Field::operator-=(const Field& o) {
    requireSameGrid(*this, o, "field -=");
    kernels::active().axpy(-1.0, o.data(), v_.data(), v_.size());
    return *this;
}

Field& Field::operator*=(double a) {
    for (double& x : v_) x *= a;
    return *this;
}

double Field::min() const { return *std::min_element(v_.begin(), v_.end()); }
double Field::max() const { return *std::max_element(v_.begin(), v_.end()); }

double Field::maxAbs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

bool Field::allFinite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double a, Field f) { return f *= a; }

FaceField::FaceField(const Grid& g, double value) : grid(g), x(g.xFaces(), value), y(g.yFaces(), value) {}

void FaceField::clearBoundary() {
    for (int j = 0; j < grid.ny; ++j) {
        xf(0, j) = 0.0;
        xf(grid.nx, j) = 0.0;
    }
    if (grid.dim == 2)
        for (int i = 0; i < grid.nx; ++i) {
            yf(i, 0) = 0.0;
            yf(i, grid.ny) = 0.0;
        }
}

Field laplacian(const Field& v) {
    const Grid& g = v.grid();
    Field out(g);
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = g.dim == 2 ? 1.0 / (g.hy() * g.hy()) : 0.0;
    kernels::active().laplacian(v.data(), out.data(), g.nx, g.ny, cx, cy);
    return out;
}

Field weightedLaplacian(const Field& v, const FaceField& w) {
    const Grid& g = v.grid();
    if (!(w.grid == g)) throw ShapeMismatch("weightedLaplacian: face weights on a different grid");
    Field out(g);
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = g.dim == 2 ? 1.0 / (g.hy() * g.hy()) : 0.0;
    kernels::active().weightedLaplacian(v.data(), w.x.data(), g.dim == 2 ? w.y.data() : nullptr, out.data(),
                                        g.nx, g.ny, cx, cy);
    return out;
}

FaceField gradient(const Field& v) {
    const Grid& g = v.grid();
    FaceField f(g);
    const double ihx = 1.0 / g.hx();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) f.xf(i, j) = (v(i, j) - v(i - 1, j)) * ihx;
    if (g.dim == 2) {
        const double ihy = 1.0 / g.hy();
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) f.yf(i, j) = (v(i, j) - v(i, j - 1)) * ihy;
    }
    return f;
}

Field divFlux(const Grid& g, std::span<const double> fx, std::span<const double> fy) {
    if (fx.size() != g.xFaces() || fy.size() != g.yFaces())
        throw ShapeMismatch("divFlux: face arrays do not match the grid (" + std::to_string(fx.size()) + ", " +
                            std::to_string(fy.size()) + ")");
    Field out(g);
    const double ihx = 1.0 / g.hx();
    for (int j = 0; j < g.ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * (g.nx + 1);
        for (int i = 0; i < g.nx; ++i) out(i, j) = (fx[row + i + 1] - fx[row + i]) * ihx;
    }
    if (g.dim == 2) {
        const double ihy = 1.0 / g.hy();
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out(i, j) += (fy[static_cast<std::size_t>(j + 1) * g.nx + i] -
                              fy[static_cast<std::size_t>(j) * g.nx + i]) *
                             ihy;
    }
    return out;
}

Field divFlux(const FaceField& f) { return divFlux(f.grid, f.x, f.y); }

FaceField faceAverage(const Field& v) {
    const Grid& g = v.grid();
    FaceField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) f.xf(i, j) = 0.5 * (v(i, j) + v(i - 1, j));
    if (g.dim == 2)
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) f.yf(i, j) = 0.5 * (v(i, j) + v(i, j - 1));
    return f;
}

double integral(const Field& v) {
    double s = 0.0;
    for (double x : v.values()) s += x;
    return s * v.grid().cellVolume();
}

double mean(const Field& v) {
    double s = 0.0;
    for (double x : v.values()) s += x;
    return s / static_cast<double>(v.size());
}

double inner(const Field& u, const Field& v) {
    requireSameGrid(u, v, "inner");
    return kernels::active().dot(u.data(), v.data(), u.size()) * u.grid().cellVolume();
}

double l2Norm(const Field& v) { return std::sqrt(inner(v, v)); }

double gradientEnergy(const Field& v, const FaceField* weights) {
    const Grid& g = v.grid();
    double s = 0.0;
    const double ihx = 1.0 / g.hx();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double d = (v(i, j) - v(i - 1, j)) * ihx;
            s += (weights ? weights->xf(i, j) : 1.0) * d * d;
        }
    if (g.dim == 2) {
        const double ihy = 1.0 / g.hy();
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double d = (v(i, j) - v(i, j - 1)) * ihy;
                s += (weights ? weights->yf(i, j) : 1.0) * d * d;
            }
    }
    return s * g.cellVolume();
}

double h1Norm2(const Field& v) { return inner(v, v) + gradientEnergy(v); }

Field invNeumannLaplacian(const Field& v, const SolverControl& ctl) {
    const Grid& g = v.grid();
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = g.dim == 2 ? 1.0 / (g.hy() * g.hy()) : 0.0;
    LinearOperator negLap = [&](std::span<const double> in, std::span<double> out) {
        kernels::active().laplacian(in.data(), out.data(), g.nx, g.ny, cx, cy);
        for (double& o : out) o = -o;
    };
    Field u(g);
    const int cap = ctl.maxIter > 0 ? ctl.maxIter : static_cast<int>(10 * g.size());
    const SolveStats st = conjugateGradient(negLap, nullptr, v.values(), u.values(), ctl.relTol, cap, true);
    if (!st.converged) throw LinearSolveFailure("CG (inverse Neumann Laplacian)", st.iterations, st.relResidual);
    return u;
}

double dualNorm(const Field& v, const SolverControl& ctl) {
    Field fluct = v;
    const double m = mean(v);
    for (double& x : fluct.values()) x -= m;
    if (fluct.maxAbs() == 0.0) return 0.0;
    const Field u = invNeumannLaplacian(fluct, ctl);
    return std::sqrt(std::max(0.0, inner(fluct, u)));
}

} // namespace chks
