#include "chks/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <utility>

namespace chks {

std::string formatNumber(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) return "?";
    return std::string(buf.data(), end);
}

DomainViolation::DomainViolation(double v, double m)
    : Error("potential argument " + formatNumber(v) + " outside (-1, 1), margin " + formatNumber(m)),
      value(v), margin(m) {}

NegativeSigma::NegativeSigma(double v)
    : Error("negative nutrient concentration " + formatNumber(v)), value(v) {}

RangeViolation::RangeViolation(double v, double limit_, std::size_t cell_)
    : Error("truncated variable " + formatNumber(v) + " reached saturation level " +
            formatNumber(limit_) + " at cell " + std::to_string(cell_)),
      value(v), limit(limit_), cell(cell_) {}

LinearSolveFailure::LinearSolveFailure(const std::string& solver, int it, double res)
    : Error(solver + " did not converge: " + std::to_string(it) + " iterations, relative residual " +
            formatNumber(res)),
      iterations(it), relResidual(res) {}

NewtonDivergence::NewtonDivergence(const std::string& why, std::vector<double> history)
    : Error("Newton solver failed: " + why), residualHistory(std::move(history)) {}

PositivityLoss::PositivityLoss(double minValue_, std::size_t cell_)
    : Error("nutrient positivity lost: min sigma " + formatNumber(minValue_) + " at cell " +
            std::to_string(cell_)),
      minValue(minValue_), cell(cell_) {}

StepRestriction::StepRestriction(double tried, double allowed)
    : Error("time step " + formatNumber(tried) + " exceeds the explicit flux limit " +
            formatNumber(allowed) + " after all halvings"),
      dtTried(tried), dtAllowed(allowed) {}

namespace {
std::string joinIssues(const std::vector<std::string>& issues) {
    std::string out = "configuration rejected";
    for (const auto& line : issues) out += "\n  " + line;
    return out;
}
} // namespace

ConfigError::ConfigError(std::vector<std::string> issues_)
    : Error(joinIssues(issues_)), issues(std::move(issues_)) {}

} // namespace chks
