#include "chks/coefficients.hpp"

#include "chks/errors.hpp"

#include <algorithm>
#include <cmath>

namespace chks {

namespace {

double clampedSigma(double sigma) {
    if (sigma < -1e-14) throw NegativeSigma(sigma);
    return sigma < 0.0 ? 0.0 : sigma;
}

// Position of x in increasing nodes: index of left node and weight of right.
std::pair<std::size_t, double> locate(const std::vector<double>& nodes, double x) {
    if (nodes.size() == 1 || x <= nodes.front()) return {0, 0.0};
    if (x >= nodes.back()) return {nodes.size() - 2, 1.0};
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - nodes.begin()) - 1;
    return {k, (x - nodes[k]) / (nodes[k + 1] - nodes[k])};
}

} // namespace

double SourceTable::eval(double phi, double sigma) const {
    const std::size_t np = phiNodes.size();
    auto at = [&](std::size_t ip, std::size_t is) { return values[is * np + ip]; };
    const auto [ip, wp] = locate(phiNodes, phi);
    const auto [is, ws] = locate(sigmaNodes, sigma);
    const std::size_t ip1 = np > 1 ? ip + 1 : ip;
    const std::size_t is1 = sigmaNodes.size() > 1 ? is + 1 : is;
    const double a = (1.0 - wp) * at(ip, is) + wp * at(ip1, is);
    const double b = (1.0 - wp) * at(ip, is1) + wp * at(ip1, is1);
    return (1.0 - ws) * a + ws * b;
}

double SourceTable::supNorm() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
}

std::string SourceTable::defect() const {
    if (phiNodes.empty() || sigmaNodes.empty()) return "h table needs at least one node per axis";
    if (values.size() != phiNodes.size() * sigmaNodes.size())
        return "h table has " + std::to_string(values.size()) + " values, expected " +
               std::to_string(phiNodes.size() * sigmaNodes.size());
    auto increasing = [](const std::vector<double>& v) {
        return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return !(a < b); }) == v.end();
    };
    if (!increasing(phiNodes) || !increasing(sigmaNodes)) return "h table nodes must be strictly increasing";
    for (double v : values)
        if (!std::isfinite(v)) return "h table values must be finite";
    return {};
}

double SourceH::eval(double phi, double sigma) const {
    return kind == Kind::Constant ? value : table.eval(phi, sigma);
}

double SourceH::supNorm() const { return kind == Kind::Constant ? std::abs(value) : table.supNorm(); }

double Mobility::value(double phi, double sigma) const {
    if (shape == Shape::Constant) return m0;
    const double s = std::max(sigma, 0.0);
    return m0 + (mMax - m0) * s / ((1.0 + s) * (1.0 + phi * phi));
}

std::string ValidationIssue::str() const { return rule + ": " + lhs + " must be " + relation + " " + rhs; }

std::vector<std::string> ValidationReport::lines() const {
    std::vector<std::string> out;
    out.reserve(issues.size());
    for (const auto& i : issues) out.push_back(i.str());
    return out;
}

ValidationReport validate(const ModelParams& p, int dim, bool strict3d) {
    ValidationReport rep;
    auto fail = [&](std::string rule, std::string lhs, std::string rel, std::string rhs) {
        rep.issues.push_back({std::move(rule), std::move(lhs), std::move(rel), std::move(rhs)});
    };
    const auto num = formatNumber;

    if (!(p.chi >= 0.0)) fail("chemotactic sensitivity", "chi = " + num(p.chi), ">=", "0");
    if (!(p.eps > 0.0 && p.eps <= 1.0)) fail("interface parameter", "eps = " + num(p.eps), "in", "(0, 1]");
    if (!(p.m >= 0.0)) fail("mass relaxation rate", "m = " + num(p.m), ">=", "0");

    if (p.h.kind == SourceH::Kind::Table) {
        if (const auto d = p.h.table.defect(); !d.empty()) fail("mass source table", d, "", "well formed");
    }
    const double H = p.h.kind == SourceH::Kind::Table && !p.h.table.defect().empty() ? 0.0 : p.h.supNorm();
    if (p.m > 0.0) {
        if (!(H / p.m < 1.0)) fail("source compatibility", "H/m = " + num(H / p.m), "<", "1");
    } else if (H > 0.0) {
        fail("source compatibility (m = 0 requires h = 0)", "H = " + num(H), "=", "0");
    }

    if (!(p.kappa0 > 0.0)) fail("logistic growth rate", "kappa0 = " + num(p.kappa0), ">", "0");
    if (!(p.kappaInf > 0.0)) fail("logistic decay rate", "kappa_inf = " + num(p.kappaInf), ">", "0");
    if (dim == 1) {
        if (!(p.p > 1.0 && p.p <= 2.0)) fail("logistic exponent window (d=1)", "p = " + num(p.p), "in", "(1, 2]");
    } else {
        const double lo = dim == 2 ? 1.5 : 1.6;
        const std::string rule = "logistic exponent window (d=" + std::to_string(dim) + ")";
        if (!(p.p >= lo)) fail(rule, "p = " + num(p.p), ">=", num(lo));
        if (!(p.p <= 2.0)) fail(rule, "p = " + num(p.p), "<=", "2");
    }

    if (!(p.betaB0 > 0.0)) fail("beta plateau lower bound", "b0 = " + num(p.betaB0), ">", "0");
    if (!(p.betaB0 <= p.betaB)) fail("beta plateau", "b0 = " + num(p.betaB0), "<=", "B = " + num(p.betaB));

    auto checkMobility = [&](const Mobility& mob, const char* name) {
        const std::string n(name);
        if (!(mob.m0 > 0.0)) fail(n + " lower bound", n + " m0 = " + num(mob.m0), ">", "0");
        if (!(mob.m0 <= mob.mMax))
            fail(n + " bounds", n + " m0 = " + num(mob.m0), "<=", "M = " + num(mob.mMax));
    };
    checkMobility(p.mobM, "mobility_m");
    checkMobility(p.mobN, "mobility_n");

    if (strict3d) {
        const double bound = std::sqrt(2.0 * p.kappaInf * p.betaB0);
        if (!(p.chi < bound))
            fail("chemotaxis smallness (strict 3D)", "chi = " + num(p.chi), "<",
                 "sqrt(2*kappa_inf*b0) = " + num(bound));
        if (p.mobN.shape != Mobility::Shape::Constant || p.mobN.m0 != 1.0)
            fail("nutrient mobility (strict 3D)", "mobility_n", "identically", "1");
    }
    return rep;
}

double sourceS(const ModelParams& p, double phi, double sigma) { return -p.m * phi + p.h.eval(phi, sigma); }

double beta(const ModelParams& p, double phi) {
    const double a = std::abs(phi);
    if (a <= 1.5) return p.betaB;
    if (a >= 2.0) return 0.0;
    return p.betaB * (2.0 - a) / 0.5;
}

double sourceB(const ModelParams& p, double phi, double sigma) {
    const double s = clampedSigma(sigma);
    return beta(p, phi) * (p.kappa0 * s - p.kappaInf * std::pow(s, p.p));
}

double mobilityM(const ModelParams& p, double phi, double sigma) { return p.mobM.value(phi, sigma); }

double mobilityN(const ModelParams& p, double phi, double sigma) { return p.mobN.value(phi, clampedSigma(sigma)); }

double bigN(const ModelParams& p, double phi, double sigma) {
    const double s = clampedSigma(sigma);
    const Mobility& mob = p.mobN;
    if (mob.shape == Mobility::Shape::Constant) return mob.m0 * s;
    return mob.m0 * s + (mob.mMax - mob.m0) / (1.0 + phi * phi) * (s - std::log1p(s));
}

double n1(const ModelParams& p, double phi, double sigma) {
    const double s = clampedSigma(sigma);
    const Mobility& mob = p.mobN;
    if (mob.shape == Mobility::Shape::Constant) return 0.0;
    const double q = 1.0 + phi * phi;
    return (mob.mMax - mob.m0) * (-2.0 * phi / (q * q)) * (s - std::log1p(s));
}

} // namespace chks
