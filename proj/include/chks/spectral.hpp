#pragma once

#include "chks/grid.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace chks {

/// Cosine-transform diagonalization of the mirror-ghost Laplacian. The DCT-II
/// modes are exact eigenvectors of the discrete operator, so constant-
/// coefficient problems built from it can be solved exactly in O(N log N).
/// Used as the preconditioner for the implicit solves.
class NeumannSpectral {
public:
    explicit NeumannSpectral(const Grid& g);
    ~NeumannSpectral();
    NeumannSpectral(const NeumannSpectral&) = delete;
    NeumannSpectral& operator=(const NeumannSpectral&) = delete;

    const Grid& grid() const { return grid_; }

    /// Eigenvalues of -Lap_h, one per mode (mode (0,0) is zero).
    std::span<const double> eigenvalues() const { return eig_; }

    /// out = Q diag(1 / symbol(lambda)) Q^T in, with symbol evaluated on the
    /// eigenvalues of -Lap_h. `in` and `out` may alias.
    void applyInverseSymbol(std::span<const double> in, std::span<double> out,
                            const std::function<double(double)>& symbol);

private:
    struct Plans;
    Grid grid_;
    std::vector<double> eig_;
    std::unique_ptr<Plans> plans_;
};

} // namespace chks
