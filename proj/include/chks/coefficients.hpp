#pragma once

#include <string>
#include <vector>

namespace chks {

/// Bounded source h(phi, sigma) sampled on a tensor table and interpolated
/// bilinearly; arguments outside the table are clamped to its edges.
struct SourceTable {
    std::vector<double> phiNodes;   ///< strictly increasing
    std::vector<double> sigmaNodes; ///< strictly increasing
    std::vector<double> values;     ///< row-major, sigma index slowest

    double eval(double phi, double sigma) const;
    double supNorm() const;
    /// Empty when well formed, otherwise a description of the defect.
    std::string defect() const;
};

struct SourceH {
    enum class Kind { Constant, Table } kind = Kind::Constant;
    double value = 0.0;
    SourceTable table;

    static SourceH constant(double v) { return {Kind::Constant, v, {}}; }
    double eval(double phi, double sigma) const;
    /// H = sup |h|.
    double supNorm() const;
};

/// Mobility with bounds m0 <= value <= mMax. The Rational shape is
/// m0 + (mMax - m0) * sigma / ((1 + sigma)(1 + phi^2)), smooth in both
/// arguments with |d/dphi| <= mMax.
struct Mobility {
    enum class Shape { Constant, Rational } shape = Shape::Constant;
    double m0 = 1.0;
    double mMax = 1.0;

    static Mobility constant(double v) { return {Shape::Constant, v, v}; }
    static Mobility rational(double m0, double mMax) { return {Shape::Rational, m0, mMax}; }

    double value(double phi, double sigma) const;
    /// Global Lipschitz constant used in the N estimates.
    double lipschitz() const { return mMax; }
};

struct ModelParams {
    double chi = 0.0;       ///< chemotactic sensitivity
    double eps = 1.0;       ///< interface parameter
    double m = 0.0;         ///< linear relaxation rate of the mass source
    SourceH h;              ///< bounded part of the mass source
    double kappa0 = 1.0;    ///< logistic growth rate
    double kappaInf = 1.0;  ///< logistic decay rate
    double p = 2.0;         ///< logistic exponent in (1, 2]
    double betaB = 1.0;     ///< plateau height of beta on [-3/2, 3/2]
    double betaB0 = 1.0;    ///< lower bound of beta on [-3/2, 3/2]
    Mobility mobM;          ///< phase-field mobility
    Mobility mobN;          ///< nutrient mobility
};

struct ValidationIssue {
    std::string rule; ///< what is being checked
    std::string lhs;  ///< evaluated left-hand side, e.g. "H/m = 1.5"
    std::string relation;
    std::string rhs;  ///< evaluated right-hand side
    std::string str() const;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool accepted() const { return issues.empty(); }
    std::vector<std::string> lines() const;
};

/// Check the parameter assumptions. `dim` selects the logistic-exponent
/// window; `strict3d` adds the three-dimensional regularity conditions.
ValidationReport validate(const ModelParams& params, int dim, bool strict3d);

/// S = -m phi + h(phi, sigma).
double sourceS(const ModelParams& params, double phi, double sigma);

/// Trapezoid: betaB on [-3/2, 3/2], linear ramps to zero at |phi| = 2.
double beta(const ModelParams& params, double phi);

/// b = beta(phi)(kappa0 sigma - kappaInf sigma^p). Throws NegativeSigma for
/// sigma < -1e-14; smaller negative round-off is treated as zero.
double sourceB(const ModelParams& params, double phi, double sigma);

double mobilityM(const ModelParams& params, double phi, double sigma);
double mobilityN(const ModelParams& params, double phi, double sigma);
/// N = integral_0^sigma n(phi, s) ds.
double bigN(const ModelParams& params, double phi, double sigma);
/// n1 = dN/dphi.
double n1(const ModelParams& params, double phi, double sigma);

} // namespace chks
