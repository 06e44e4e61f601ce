#include "kernels_impl.hpp"

#include <immintrin.h>

namespace chks::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// Scalar fallback for one cell; must match scalar::laplacianRows term order.
inline double lapCell(const double* row, const double* down, const double* up, int i, int nx, double cx,
                      double cy) {
    const double c = row[i];
    const double l = i > 0 ? row[i - 1] : c;
    const double r = i < nx - 1 ? row[i + 1] : c;
    double s = cx * ((l - c) + (r - c));
    if (down) s += cy * ((down[i] - c) + (up[i] - c));
    return s;
}

inline double wlapCell(const double* v, const double* wx, const double* wy, int i, int j, int nx, int ny,
                       double cx, double cy) {
    const double* row = v + static_cast<std::size_t>(j) * nx;
    const double* wxr = wx + static_cast<std::size_t>(j) * (nx + 1);
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
    return s;
}

} // namespace

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void xpby(const double* x, double b, double* y, std::size_t n) {
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(x + i), vy));
    }
    for (; i < n; ++i) y[i] = x[i] + b * y[i];
}

void laplacian(const double* v, double* out, int nx, int ny, double cx, double cy) {
    if (nx < 6) {
        scalar::laplacian(v, out, nx, ny, cx, cy);
        return;
    }
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vcy = _mm256_set1_pd(cy);
    for (int j = 0; j < ny; ++j) {
        const double* row = v + static_cast<std::size_t>(j) * nx;
        const double* down = ny > 1 ? v + static_cast<std::size_t>(j > 0 ? j - 1 : j) * nx : nullptr;
        const double* up = ny > 1 ? v + static_cast<std::size_t>(j < ny - 1 ? j + 1 : j) * nx : nullptr;
        double* o = out + static_cast<std::size_t>(j) * nx;
        o[0] = lapCell(row, down, up, 0, nx, cx, cy);
        int i = 1;
        for (; i + 4 <= nx - 1; i += 4) {
            const __m256d c = _mm256_loadu_pd(row + i);
            const __m256d l = _mm256_loadu_pd(row + i - 1);
            const __m256d r = _mm256_loadu_pd(row + i + 1);
            __m256d s = _mm256_mul_pd(vcx, _mm256_add_pd(_mm256_sub_pd(l, c), _mm256_sub_pd(r, c)));
            if (down) {
                const __m256d d = _mm256_loadu_pd(down + i);
                const __m256d u = _mm256_loadu_pd(up + i);
                s = _mm256_add_pd(
                    s, _mm256_mul_pd(vcy, _mm256_add_pd(_mm256_sub_pd(d, c), _mm256_sub_pd(u, c))));
            }
            _mm256_storeu_pd(o + i, s);
        }
        for (; i < nx; ++i) o[i] = lapCell(row, down, up, i, nx, cx, cy);
    }
}

void weightedLaplacian(const double* v, const double* wx, const double* wy, double* out, int nx, int ny,
                       double cx, double cy) {
    if (nx < 6) {
        scalar::weightedLaplacian(v, wx, wy, out, nx, ny, cx, cy);
        return;
    }
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vcy = _mm256_set1_pd(cy);
    for (int j = 0; j < ny; ++j) {
        const double* row = v + static_cast<std::size_t>(j) * nx;
        const double* wxr = wx + static_cast<std::size_t>(j) * (nx + 1);
        double* o = out + static_cast<std::size_t>(j) * nx;
        o[0] = wlapCell(v, wx, wy, 0, j, nx, ny, cx, cy);
        const bool twoD = ny > 1;
        const double* down = twoD ? v + static_cast<std::size_t>(j > 0 ? j - 1 : j) * nx : nullptr;
        const double* up = twoD ? v + static_cast<std::size_t>(j < ny - 1 ? j + 1 : j) * nx : nullptr;
        const double* wd = twoD ? wy + static_cast<std::size_t>(j) * nx : nullptr;
        const double* wu = twoD ? wy + static_cast<std::size_t>(j + 1) * nx : nullptr;
        int i = 1;
        for (; i + 4 <= nx - 1; i += 4) {
            const __m256d c = _mm256_loadu_pd(row + i);
            const __m256d l = _mm256_loadu_pd(row + i - 1);
            const __m256d r = _mm256_loadu_pd(row + i + 1);
            const __m256d wl = _mm256_loadu_pd(wxr + i);
            const __m256d wr = _mm256_loadu_pd(wxr + i + 1);
            __m256d s = _mm256_mul_pd(vcx, _mm256_sub_pd(_mm256_mul_pd(wr, _mm256_sub_pd(r, c)),
                                                         _mm256_mul_pd(wl, _mm256_sub_pd(c, l))));
            if (twoD) {
                const __m256d d = _mm256_loadu_pd(down + i);
                const __m256d u = _mm256_loadu_pd(up + i);
                const __m256d a = _mm256_mul_pd(_mm256_loadu_pd(wu + i), _mm256_sub_pd(u, c));
                const __m256d b = _mm256_mul_pd(_mm256_loadu_pd(wd + i), _mm256_sub_pd(c, d));
                s = _mm256_add_pd(s, _mm256_mul_pd(vcy, _mm256_sub_pd(a, b)));
            }
            _mm256_storeu_pd(o + i, s);
        }
        for (; i < nx; ++i) o[i] = wlapCell(v, wx, wy, i, j, nx, ny, cx, cy);
    }
}

} // namespace chks::kernels::avx2
