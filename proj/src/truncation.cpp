#include "chks/truncation.hpp"

#include "chks/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chks {

double scaledE1(double x) {
    if (!(x > 0.0)) throw std::domain_error("scaledE1 needs x > 0");
    if (x < 40.0) return -std::exp(x) * std::expint(-x);
    // Continued fraction e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...))), modified Lentz.
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 200; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h;
}

Truncation::Truncation(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("truncation level must be a positive integer");
}

double Truncation::apply(double r) const {
    if (r <= n_) return r;
    return n_ - std::expm1(-(r - n_));
}

double Truncation::derivative(double r) const { return r <= n_ ? 1.0 : std::exp(-(r - n_)); }

double Truncation::inverse(double s, std::size_t cell) const {
    if (s <= n_) return s;
    const double gap = n_ + 1.0 - s;
    if (!(gap > 0.0)) throw RangeViolation(s, n_ + 1.0, cell);
    return n_ - std::log(gap);
}

double Truncation::evalLn(double sigma) const {
    if (sigma < 0.0) throw NegativeSigma(sigma);
    if (sigma == 0.0) return 0.0;
    if (sigma <= n_) return sigma * (std::log(sigma) - 1.0);
    const double n = n_;
    const double decay = std::exp(n - sigma);
    return n * (std::log(n) - 1.0) + std::log(n) - decay * std::log(sigma) + scaledE1(n) -
           decay * scaledE1(sigma);
}

} // namespace chks
