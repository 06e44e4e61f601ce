#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chks {

/// Uniform cell-centered tensor grid on [0, lx] (x [0, ly]). Homogeneous
/// Neumann conditions are realized by mirror ghost cells, so every boundary
/// face carries zero flux. In 1D ny == 1 and ly is a unit transverse extent.
struct Grid {
    int dim = 1;
    int nx = 4;
    int ny = 1;
    double lx = 1.0;
    double ly = 1.0;

    static Grid line(int nx, double lx);
    static Grid rect(int nx, int ny, double lx, double ly);

    double hx() const { return lx / nx; }
    double hy() const { return dim == 2 ? ly / ny : 1.0; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    double cellVolume() const { return dim == 2 ? hx() * hy() : hx(); }
    double volume() const { return dim == 2 ? lx * ly : lx; }

    std::size_t xFaces() const { return static_cast<std::size_t>(nx + 1) * ny; }
    std::size_t yFaces() const { return dim == 2 ? static_cast<std::size_t>(nx) * (ny + 1) : 0; }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    double xc(int i) const { return (i + 0.5) * hx(); }
    double yc(int j) const { return dim == 2 ? (j + 0.5) * hy() : 0.5 * ly; }

    /// Throws std::invalid_argument when the invariants (nx >= 4, ny >= 4 in
    /// 2D, positive lengths) do not hold.
    void check() const;

    bool operator==(const Grid&) const = default;
};

/// One real value per cell.
class Field {
public:
    Field() = default;
    explicit Field(const Grid& g, double value = 0.0);
    Field(const Grid& g, std::vector<double> values);

    template <class Fn>
    static Field fromFunction(const Grid& g, Fn&& fn) {
        Field f(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) f.v_[g.index(i, j)] = fn(g.xc(i), g.yc(j));
        return f;
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    std::span<const double> values() const { return v_; }
    std::span<double> values() { return v_; }
    const double* data() const { return v_.data(); }
    double* data() { return v_.data(); }

    double operator[](std::size_t k) const { return v_[k]; }
    double& operator[](std::size_t k) { return v_[k]; }
    double operator()(int i, int j = 0) const { return v_[grid_.index(i, j)]; }
    double& operator()(int i, int j = 0) { return v_[grid_.index(i, j)]; }

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double a);

    double min() const;
    double max() const;
    double maxAbs() const;
    bool allFinite() const;

private:
    Grid grid_{};
    std::vector<double> v_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);

/// Face-centered values: x faces indexed j*(nx+1)+i (face i sits left of cell
/// i), y faces indexed j*nx+i (face j sits below cell j).
struct FaceField {
    Grid grid{};
    std::vector<double> x;
    std::vector<double> y;

    FaceField() = default;
    explicit FaceField(const Grid& g, double value = 0.0);

    double& xf(int i, int j) { return x[static_cast<std::size_t>(j) * (grid.nx + 1) + i]; }
    double xf(int i, int j) const { return x[static_cast<std::size_t>(j) * (grid.nx + 1) + i]; }
    double& yf(int i, int j) { return y[static_cast<std::size_t>(j) * grid.nx + i]; }
    double yf(int i, int j) const { return y[static_cast<std::size_t>(j) * grid.nx + i]; }

    /// Zero the faces on the domain boundary.
    void clearBoundary();
};

void requireSameGrid(const Field& a, const Field& b, const char* what);

/// Mirror-ghost 3/5-point Laplacian.
Field laplacian(const Field& v);

/// div(w grad v) with face weights w.
Field weightedLaplacian(const Field& v, const FaceField& w);

/// Face gradient (v_R - v_L)/h on interior faces; boundary faces are zero.
FaceField gradient(const Field& v);

/// Conservative divergence of face fluxes. Boundary faces must carry zero
/// flux; sizes must match the grid (ShapeMismatch otherwise).
Field divFlux(const Grid& g, std::span<const double> fx, std::span<const double> fy);
Field divFlux(const FaceField& f);

/// Arithmetic average of adjacent cell values on interior faces, zero on the
/// boundary.
FaceField faceAverage(const Field& v);

double integral(const Field& v);
double mean(const Field& v);
/// L2 inner product with cell-volume weights.
double inner(const Field& u, const Field& v);
double l2Norm(const Field& v);
/// Sum over interior faces of w |grad v|^2 times the face control volume.
double gradientEnergy(const Field& v, const FaceField* weights = nullptr);
/// Squared H1 norm: ||v||^2 + ||grad v||^2.
double h1Norm2(const Field& v);

struct SolverControl {
    double relTol = 1e-10;
    int maxIter = 0; ///< 0 selects 10 * (number of cells)
};

/// Solve -Lap u = v - mean(v) with mean(u) = 0 by conjugate gradients.
/// Throws LinearSolveFailure when the iteration cap is reached.
Field invNeumannLaplacian(const Field& v, const SolverControl& ctl = {});

/// Dual (V*) norm of the zero-mean part of v.
double dualNorm(const Field& v, const SolverControl& ctl = {});

} // namespace chks
