#include "chks/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace chks {

namespace {
// The FFTW planner is not thread-safe; execution on distinct plans is.
std::mutex& plannerMutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct NeumannSpectral::Plans {
    double* buf = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

NeumannSpectral::NeumannSpectral(const Grid& g) : grid_(g), eig_(g.size()), plans_(std::make_unique<Plans>()) {
    const double pi = std::numbers::pi;
    std::vector<double> ex(g.nx), ey(g.ny, 0.0);
    for (int i = 0; i < g.nx; ++i) {
        const double s = std::sin(pi * i / (2.0 * g.nx));
        ex[i] = 4.0 * s * s / (g.hx() * g.hx());
    }
    if (g.dim == 2)
        for (int j = 0; j < g.ny; ++j) {
            const double s = std::sin(pi * j / (2.0 * g.ny));
            ey[j] = 4.0 * s * s / (g.hy() * g.hy());
        }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) eig_[g.index(i, j)] = ex[i] + ey[j];

    std::lock_guard lock(plannerMutex());
    plans_->buf = fftw_alloc_real(g.size());
    if (g.dim == 1) {
        plans_->forward = fftw_plan_r2r_1d(g.nx, plans_->buf, plans_->buf, FFTW_REDFT10, FFTW_ESTIMATE);
        plans_->backward = fftw_plan_r2r_1d(g.nx, plans_->buf, plans_->buf, FFTW_REDFT01, FFTW_ESTIMATE);
    } else {
        plans_->forward =
            fftw_plan_r2r_2d(g.ny, g.nx, plans_->buf, plans_->buf, FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
        plans_->backward =
            fftw_plan_r2r_2d(g.ny, g.nx, plans_->buf, plans_->buf, FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
    }
    if (!plans_->forward || !plans_->backward) throw std::runtime_error("FFTW planning failed");
}

NeumannSpectral::~NeumannSpectral() {
    std::lock_guard lock(plannerMutex());
    if (plans_->forward) fftw_destroy_plan(plans_->forward);
    if (plans_->backward) fftw_destroy_plan(plans_->backward);
    if (plans_->buf) fftw_free(plans_->buf);
}

void NeumannSpectral::applyInverseSymbol(std::span<const double> in, std::span<double> out,
                                         const std::function<double(double)>& symbol) {
    const std::size_t n = grid_.size();
    double* buf = plans_->buf;
    for (std::size_t k = 0; k < n; ++k) buf[k] = in[k];
    fftw_execute(plans_->forward);
    // Unnormalized DCT-II followed by DCT-III scales by 2N per dimension.
    const double scale = grid_.dim == 2 ? 1.0 / (4.0 * grid_.nx * grid_.ny) : 1.0 / (2.0 * grid_.nx);
    for (std::size_t k = 0; k < n; ++k) buf[k] *= scale / symbol(eig_[k]);
    fftw_execute(plans_->backward);
    for (std::size_t k = 0; k < n; ++k) out[k] = buf[k];
}

} // namespace chks
