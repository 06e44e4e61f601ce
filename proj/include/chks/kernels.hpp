#pragma once

// Data-parallel inner loops. Every routine has a scalar reference version and,
// when the CPU supports it, an AVX2 version; the active table is chosen once
// at startup and can be overridden for testing.

#include <cstddef>
#include <string_view>

namespace chks::kernels {

enum class Isa { Scalar, Avx2 };

struct Table {
    Isa isa;
    const char* name;

    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // y = x + b * y
    void (*xpby)(const double* x, double b, double* y, std::size_t n);
    // Mirror-ghost Laplacian on an nx-by-ny cell grid (ny == 1 for 1D).
    // cx = 1/hx^2, cy = 1/hy^2.
    void (*laplacian)(const double* v, double* out, int nx, int ny, double cx, double cy);
    // out = div(w grad v) with face weights wx ((nx+1)*ny, boundary faces
    // ignored) and wy (nx*(ny+1)); wy may be null in 1D.
    void (*weightedLaplacian)(const double* v, const double* wx, const double* wy, double* out,
                              int nx, int ny, double cx, double cy);
};

const Table& scalarTable();
/// Null when the AVX2 variants were not compiled in.
const Table* avx2Table();

bool cpuHasAvx2();

/// The table currently used by the library.
const Table& active();

/// Force a specific variant. Returns false (and leaves the selection alone)
/// when the variant is unavailable on this build or CPU.
bool select(Isa isa);

/// Best available variant for this machine.
Isa detect();

bool parseIsa(std::string_view name, Isa& out);

} // namespace chks::kernels
