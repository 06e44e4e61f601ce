#pragma once

#include <cstddef>

namespace chks {

/// Concave C^{1,1} cutoff T_n: identity up to n, then n + 1 - exp(-(r - n)),
/// which saturates at n + 1.
class Truncation {
public:
    explicit Truncation(int n);

    int n() const { return n_; }

    double apply(double r) const;
    /// T_n'(r), in (0, 1].
    double derivative(double r) const;
    /// gamma_n = T_n^{-1}; RangeViolation (with `cell`) when s >= n + 1.
    double inverse(double s, std::size_t cell = 0) const;
    /// L_n(sigma) = integral_0^sigma T_n'(r) ln r dr, sigma >= 0.
    double evalLn(double sigma) const;

private:
    int n_;
};

/// e^x E_1(x) for x > 0.
double scaledE1(double x);

} // namespace chks
