#pragma once

#include <cstddef>

// Internal entry points of the kernel variants. The row-range helpers let the
// SIMD versions reuse the scalar code for boundary rows.

namespace chks::kernels::scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void xpby(const double* x, double b, double* y, std::size_t n);
void laplacian(const double* v, double* out, int nx, int ny, double cx, double cy);
void laplacianRows(const double* v, double* out, int nx, int ny, double cx, double cy, int j0, int j1);
void weightedLaplacian(const double* v, const double* wx, const double* wy, double* out, int nx, int ny,
                       double cx, double cy);
void weightedLaplacianRows(const double* v, const double* wx, const double* wy, double* out, int nx,
                           int ny, double cx, double cy, int j0, int j1);
} // namespace chks::kernels::scalar

namespace chks::kernels::avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void xpby(const double* x, double b, double* y, std::size_t n);
void laplacian(const double* v, double* out, int nx, int ny, double cx, double cy);
void weightedLaplacian(const double* v, const double* wx, const double* wy, double* out, int nx, int ny,
                       double cx, double cy);
} // namespace chks::kernels::avx2
