#include "kernels_impl.hpp"

namespace chks::kernels::scalar {

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(const double* x, double b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void laplacianRows(const double* v, double* out, int nx, int ny, double cx, double cy, int j0, int j1) {
    for (int j = j0; j < j1; ++j) {
        const double* row = v + static_cast<std::size_t>(j) * nx;
        const double* down = ny > 1 ? v + static_cast<std::size_t>(j > 0 ? j - 1 : j) * nx : nullptr;
        const double* up = ny > 1 ? v + static_cast<std::size_t>(j < ny - 1 ? j + 1 : j) * nx : nullptr;
        double* o = out + static_cast<std::size_t>(j) * nx;
        for (int i = 0; i < nx; ++i) {
            const double c = row[i];
            const double l = i > 0 ? row[i - 1] : c;
            const double r = i < nx - 1 ? row[i + 1] : c;
            double s = cx * ((l - c) + (r - c));
            if (ny > 1) s += cy * ((down[i] - c) + (up[i] - c));
            o[i] = s;
        }
    }
}

void laplacian(const double* v, double* out, int nx, int ny, double cx, double cy) {
    laplacianRows(v, out, nx, ny, cx, cy, 0, ny);
}

void weightedLaplacianRows(const double* v, const double* wx, const double* wy, double* out, int nx,
                           int ny, double cx, double cy, int j0, int j1) {
    for (int j = j0; j < j1; ++j) {
        const double* row = v + static_cast<std::size_t>(j) * nx;
        const double* wxr = wx + static_cast<std::size_t>(j) * (nx + 1);
        double* o = out + static_cast<std::size_t>(j) * nx;
        for (int i = 0; i < nx; ++i) {
            const double c = row[i];
            const double l = i > 0 ? row[i - 1] : c;
            const double r = i < nx - 1 ? row[i + 1] : c;
            double s = cx * (wxr[i + 1] * (r - c) - wxr[i] * (c - l));
            if (ny > 1) {
                const double d = j > 0 ? v[static_cast<std::size_t>(j - 1) * nx + i] : c;
                const double u = j < ny - 1 ? v[static_cast<std::size_t>(j + 1) * nx + i] : c;
                const double wd = wy[static_cast<std::size_t>(j) * nx + i];
                const double wu = wy[static_cast<std::size_t>(j + 1) * nx + i];
                s += cy * (wu * (u - c) - wd * (c - d));
            }
            o[i] = s;
        }
    }
}

void weightedLaplacian(const double* v, const double* wx, const double* wy, double* out, int nx, int ny,
                       double cx, double cy) {
    weightedLaplacianRows(v, wx, wy, out, nx, ny, cx, cy, 0, ny);
}

} // namespace chks::kernels::scalar
