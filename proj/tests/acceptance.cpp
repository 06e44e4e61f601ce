// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
#include "chks/cli.hpp"
#include "chks/config.hpp"
#include "chks/diagnostics.hpp"
#include "chks/errors.hpp"
#include "chks/initial_conditions.hpp"
#include "chks/stepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace chks;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kSource = CHKS_SOURCE_DIR;
constexpr double kPi = std::numbers::pi;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

std::string configPath(const std::string& name) { return (kSource / "configs" / name).string(); }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("chks_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Simulation {
    DiagnosticsSeries series; // includes step 0
    State final;
    std::string failure;      // error kind, empty on success
};

// Same initial data as the command-line tool.
Simulation simulate(const RunConfig& c, int steps = -1) {
    Stepper st(c.grid, c.potential, c.params, c.scheme);
    const State s0 = st.initialize(makeField(c.phiIc, c.grid, c.seed), makeField(c.sigmaIc, c.grid, c.seed + 1));
    Simulation out;
    out.series.push_back(initialRecord(st, s0));
    try {
        AdvanceResult r = advance(st, s0, steps < 0 ? c.steps : steps);
        out.series.insert(out.series.end(), r.series.begin(), r.series.end());
        out.final = std::move(r.state);
    } catch (const StepFailure& f) {
        out.series.insert(out.series.end(), f.partial.begin(), f.partial.end());
        out.failure = f.innerKind;
    }
    return out;
}

double fitSlope(const std::vector<double>& h, const std::vector<double>& e) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double x = std::log(h[k]), y = std::log(e[k]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Verdict operatorConsistency() {
    const auto start = Clock::now();
    std::vector<double> hs, lapErr, gradErr;
    for (int nx : {32, 64, 128, 256}) {
        const Grid g = Grid::line(nx, 1.0);
        const Field v = Field::fromFunction(g, [](double x, double) { return std::cos(kPi * x); });
        const Field lap = laplacian(v);
        double el = 0.0;
        for (int i = 0; i < nx; ++i) el = std::max(el, std::abs(lap(i) + kPi * kPi * std::cos(kPi * g.xc(i))));
        const FaceField grad = gradient(v);
        double eg = 0.0;
        for (int i = 1; i < nx; ++i) eg = std::max(eg, std::abs(grad.xf(i, 0) + kPi * std::sin(kPi * i * g.hx())));
        hs.push_back(g.hx());
        lapErr.push_back(el);
        gradErr.push_back(eg);
    }
    const double sl = fitSlope(hs, lapErr), sg = fitSlope(hs, gradErr);
    const Grid g = Grid::line(256, 1.0);
    const double dn = dualNorm(Field::fromFunction(g, [](double x, double) { return std::cos(kPi * x); }));
    const double exact = 1.0 / (kPi * std::sqrt(2.0));
    const double rel = std::abs(dn - exact) / exact;
    const double t = seconds(start);
    Verdict v;
    v.pass = sl >= 1.8 && sl <= 2.2 && sg >= 1.8 && sg <= 2.2 && rel <= 0.01 && t < 10.0;
    v.detail = "laplacian slope " + fmt("%.3f", sl) + ", gradient slope " + fmt("%.3f", sg) + ", dual norm rel err " +
               fmt("%.2e", rel) + ", " + fmt("%.2f", t) + " s";
    return v;
}

Verdict massDynamics() {
    const RunConfig c = loadConfig(configPath("mass_dynamics.ini"), {});
    const auto start = Clock::now();
    const Simulation s = simulate(c);
    const double t = seconds(start);
    const double dt = c.scheme.dt, m = c.params.m, hv = c.params.h.value, H = c.params.h.supNorm();
    const double y0 = s.series.front().phiMean;
    const double bound = std::max(std::abs(y0), H / m) + 2.0 * dt;
    double err = 0.0, reach = 0.0;
    for (const auto& r : s.series) {
        const double y = hv / m + (y0 - hv / m) * std::exp(-m * r.t);
        err = std::max(err, std::abs(r.phiMean - y));
        reach = std::max(reach, std::abs(r.phiMean));
    }

    // m = h = 0: conserved mean.
    const RunConfig c0 = loadConfig(configPath("mass_dynamics.ini"), {"params.m=0", "params.h=0"});
    const Simulation s0 = simulate(c0);
    double drift = 0.0;
    for (const auto& r : s0.series) drift = std::max(drift, std::abs(r.phiMean - s0.series.front().phiMean));

    Verdict v;
    v.pass = s.failure.empty() && s0.failure.empty() && err <= 3.0 * dt && reach <= bound && drift <= 1e-12 &&
             t < 30.0;
    v.detail = "max |mean - ode| " + fmt("%.2e", err) + " (<= " + fmt("%.2e", 3 * dt) + "), max |mean| " +
               fmt("%.4f", reach) + " (<= " + fmt("%.4f", bound) + "), conserved drift " + fmt("%.1e", drift) +
               ", 128^2 x 500 in " + fmt("%.1f", t) + " s";
    if (!s.failure.empty() || !s0.failure.empty()) v.detail += ", run failed: " + s.failure + s0.failure;
    return v;
}

Verdict energyLaw() {
    const RunConfig c = loadConfig(configPath("sourceless_spinodal.ini"), {});
    const Simulation s = simulate(c);
    double worst = -std::numeric_limits<double>::infinity();
    int increases = 0;
    for (std::size_t k = 1; k < s.series.size(); ++k) {
        const double e0 = s.series[k - 1].energyTotal, e1 = s.series[k].energyTotal;
        const double rise = (e1 - e0) / std::max(std::abs(e0), 1e-300);
        worst = std::max(worst, rise);
        if (e1 - e0 > 1e-12 * std::abs(e0)) ++increases;
    }
    Verdict v;
    v.pass = s.failure.empty() && static_cast<int>(s.series.size()) == c.steps + 1 && increases == 0;
    v.detail = std::to_string(s.series.size() - 1) + " steps, increases " + std::to_string(increases) +
               ", largest relative change " + fmt("%.2e", worst) + ", energy " +
               fmt("%.6g", s.series.front().energyTotal) + " -> " + fmt("%.6g", s.series.back().energyTotal);
    if (!s.failure.empty()) v.detail += ", failed: " + s.failure;
    return v;
}

struct MatrixRun {
    std::string label;
    bool floryHuggins = false;
    Simulation sim;
};

std::vector<MatrixRun> fullMatrix() {
    std::vector<MatrixRun> runs;
    const std::vector<std::pair<std::string, std::vector<std::string>>> potentials = {
        {"flory_huggins", {"potential.kind=flory_huggins"}},
        {"neg_log", {"potential.kind=neg_log"}},
        {"regularized n=16", {"potential.kind=flory_huggins", "scheme.mode=approximation", "scheme.n=16"}},
    };
    const std::vector<std::pair<std::string, std::vector<std::string>>> mobilities = {
        {"constant", {}},
        {"rational",
         {"params.mobility_m=rational", "params.mobility_m_m0=0.5", "params.mobility_m_max=1.5",
          "params.mobility_n=rational", "params.mobility_n_m0=0.5", "params.mobility_n_max=1.5"}},
    };
    for (const auto& [pname, pov] : potentials)
        for (const auto& [mname, mov] : mobilities)
            for (const char* p : {"1.6", "2"}) {
                std::vector<std::string> ov = pov;
                ov.insert(ov.end(), mov.begin(), mov.end());
                ov.push_back(std::string("params.p=") + p);
                ov.push_back("output.snapshot_every=0");
                const RunConfig c = loadConfig(configPath("full_tumor.ini"), ov);
                runs.push_back({pname + "/" + mname + "/p=" + p, pname == "flory_huggins", simulate(c)});
            }
    return runs;
}

Verdict minimumPrinciple(const std::vector<MatrixRun>& runs) {
    double worst = std::numeric_limits<double>::infinity();
    std::string worstLabel, failed;
    for (const auto& r : runs) {
        if (!r.sim.failure.empty()) failed += " " + r.label + "[" + r.sim.failure + "]";
        for (const auto& rec : r.sim.series)
            if (rec.sigmaMin < worst) worst = rec.sigmaMin, worstLabel = r.label;
    }

    const RunConfig full = loadConfig(configPath("old_model_steep.ini"), {});
    const Simulation sf = simulate(full);
    double fullMin = std::numeric_limits<double>::infinity();
    for (const auto& rec : sf.series) fullMin = std::min(fullMin, rec.sigmaMin);

    const RunConfig old = loadConfig(configPath("old_model_steep.ini"), {"scheme.mode=old_model"});
    const Simulation so = simulate(old, 200);
    double oldMin = std::numeric_limits<double>::infinity();
    int firstNegative = -1;
    for (const auto& rec : so.series) {
        oldMin = std::min(oldMin, rec.sigmaMin);
        if (firstNegative < 0 && rec.sigmaMin < -1e-6) firstNegative = rec.step;
    }

    Verdict v;
    v.pass = failed.empty() && worst >= -1e-12 && sf.failure.empty() && fullMin >= -1e-12 && firstNegative >= 0;
    v.detail = std::to_string(runs.size()) + " full-mode runs, min sigma " + fmt("%.4g", worst) + " (" + worstLabel +
               "); steep preset: full min " + fmt("%.4g", fullMin) + ", old model min " + fmt("%.4g", oldMin) +
               (firstNegative >= 0 ? " (below -1e-6 from step " + std::to_string(firstNegative) + ")"
                                   : " (never below -1e-6)");
    if (!so.failure.empty())
        v.detail += ", old model stopped after step " + std::to_string(so.series.back().step) + " [" + so.failure + "]";
    if (!failed.empty()) v.detail += "; failures:" + failed;
    return v;
}

Verdict separation(const std::vector<MatrixRun>& runs) {
    double fhDelta = std::numeric_limits<double>::infinity();
    int fhRuns = 0;
    for (const auto& r : runs) {
        if (!r.floryHuggins) continue;
        ++fhRuns;
        for (const auto& rec : r.sim.series) fhDelta = std::min(fhDelta, rec.sepDelta);
    }
    const RunConfig c = loadConfig(configPath("separation_2d.ini"), {"output.snapshot_every=0"});
    const Simulation s = simulate(c);
    const double T = c.tEnd;
    double inf = std::numeric_limits<double>::infinity(), all = inf;
    for (const auto& rec : s.series) {
        all = std::min(all, rec.sepDelta);
        if (rec.t >= 0.1 * T - 1e-12) inf = std::min(inf, rec.sepDelta);
    }
    Verdict v;
    v.pass = s.failure.empty() && fhRuns > 0 && fhDelta > 0.0 && all > 0.0 && inf > 0.0;
    v.detail = "flory_huggins matrix runs: min 1 - max|phi| " + fmt("%.4g", fhDelta) + " over " +
               std::to_string(fhRuns) + " runs; separation preset: inf over [0.1T, T] " + fmt("%.4g", inf);
    if (!s.failure.empty()) v.detail += ", failed: " + s.failure;
    return v;
}

std::vector<std::map<std::string, std::string>> readCsv(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string line;
    std::vector<std::string> header;
    std::vector<std::map<std::string, std::string>> rows;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        if (!s.empty() && s.back() == ',') out.push_back("");
        return out;
    };
    if (std::getline(in, line)) header = split(line);
    while (std::getline(in, line)) {
        const auto cells = split(line);
        std::map<std::string, std::string> row;
        for (std::size_t k = 0; k < header.size() && k < cells.size(); ++k) row[header[k]] = cells[k];
        rows.push_back(std::move(row));
    }
    return rows;
}

int cli(std::vector<std::string> args, std::string* errText = nullptr) {
    args.insert(args.begin(), "chks");
    std::ostringstream out, err;
    const int code = runCli(args, out, err);
    if (errText) *errText = err.str();
    return code;
}

Verdict approximationConvergence() {
    const fs::path dir = scratch("nconv");
    const auto start = Clock::now();
    const int code = cli({"nconv", "--config", configPath("nconv_standard.ini"), "--out", dir.string()});
    const double t = seconds(start);
    Verdict v;
    if (code != kExitOk) {
        v.detail = "nconv exited with " + std::to_string(code);
        return v;
    }
    const auto rows = readCsv(dir / "nconv.csv");
    std::vector<int> ns;
    std::vector<double> sig, exc;
    for (const auto& r : rows) {
        ns.push_back(std::stoi(r.at("n")));
        sig.push_back(std::stod(r.at("sigma_l2_diff")));
        exc.push_back(std::stod(r.at("phi_excess")));
    }
    bool monotone = ns == std::vector<int>{4, 8, 16};
    for (std::size_t k = 1; k < ns.size(); ++k) monotone = monotone && sig[k] < sig[k - 1] && exc[k] <= exc[k - 1];
    v.pass = monotone && !exc.empty() && exc.back() <= 1e-3 && t < 120.0;
    v.detail = "n = 4, 8, 16: sigma diff";
    for (double d : sig) v.detail += " " + fmt("%.3g", d);
    v.detail += "; excess";
    for (double d : exc) v.detail += " " + fmt("%.3g", d);
    v.detail += "; " + fmt("%.1f", t) + " s";
    return v;
}

Verdict continuousDependence() {
    std::map<double, std::pair<double, double>> res; // amplitude -> (ratio, sup sigma dual)
    std::string failed;
    for (double a : {1e-2, 1e-3, 5e-4, 1e-4}) {
        const fs::path dir = scratch("twin");
        const int code = cli({"twin", "--config", configPath("twin.ini"), "--out", dir.string(), "--override",
                              "twin.amplitude=" + fmt("%.17g", a)});
        if (code != kExitOk) {
            failed += " " + fmt("%g", a);
            continue;
        }
        std::map<std::string, double> m;
        for (const auto& r : readCsv(dir / "twin_summary.csv")) m[r.at("metric")] = std::stod(r.at("value"));
        res[a] = {m.at("ratio"), m.at("sup_sigma_dual")};
    }
    Verdict v;
    if (!failed.empty()) {
        v.detail = "twin run failed for amplitude" + failed;
        return v;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double a : {1e-2, 1e-3, 1e-4}) {
        lo = std::min(lo, res[a].first);
        hi = std::max(hi, res[a].first);
    }
    const double halving = res[5e-4].second / res[1e-3].second;
    v.pass = std::isfinite(hi) && lo > 0.0 && hi / lo <= 2.0 && std::abs(halving - 0.5) <= 0.25 * 0.5;
    v.detail = "lhs/rhs at 1e-2, 1e-3, 1e-4: " + fmt("%.4g", res[1e-2].first) + ", " + fmt("%.4g", res[1e-3].first) +
               ", " + fmt("%.4g", res[1e-4].first) + " (spread " + fmt("%.3f", hi / lo) +
               "x); sup sigma dual ratio on halving " + fmt("%.4f", halving);
    return v;
}

// phi* = a cos(pi x) e^-t, sigma* = 1 + b cos(pi x) e^-t on [0, 1] with unit
// eps and mobilities, beta on its plateau.
struct Manufactured {
    double a = 0.5, b = 0.25;
    double lambda = 1.0, chi = 0.5, m = 0.5, h = 0.1, kappa0 = 1.0, kappaInf = 1.0;

    double phi(double x, double t) const { return a * std::cos(kPi * x) * std::exp(-t); }
    double sigma(double x, double t) const { return 1.0 + b * std::cos(kPi * x) * std::exp(-t); }

    double gPhi(double x, double t) const {
        const double e = std::exp(-t);
        const double p = a * std::cos(kPi * x) * e;
        const double px = -a * kPi * std::sin(kPi * x) * e;
        const double pxx = -kPi * kPi * p;
        const double pxxxx = kPi * kPi * kPi * kPi * p;
        const double sxx = -kPi * kPi * b * std::cos(kPi * x) * e;
        // Flory-Huggins F1'' and F1'''.
        const double f2 = 2.0 / (1.0 - p * p);
        const double f3 = 4.0 * p / ((1.0 - p * p) * (1.0 - p * p));
        const double muxx = -pxxxx + f2 * pxx + f3 * px * px - lambda * pxx - chi * sxx;
        return -p - muxx - (-m * p + h);
    }
    double gSigma(double x, double t) const {
        const double e = std::exp(-t);
        const double s = sigma(x, t);
        const double sx = -b * kPi * std::sin(kPi * x) * e;
        const double sxx = -kPi * kPi * b * std::cos(kPi * x) * e;
        const double px = -a * kPi * std::sin(kPi * x) * e;
        const double pxx = -kPi * kPi * a * std::cos(kPi * x) * e;
        const double st = -(s - 1.0);
        return st - sxx + chi * (sx * px + s * pxx) - (kappa0 * s - kappaInf * s * s);
    }
};

double manufacturedError(int nx, double dt, double T) {
    const Manufactured ms;
    const Grid g = Grid::line(nx, 1.0);
    ModelParams p;
    p.chi = ms.chi;
    p.m = ms.m;
    p.h = SourceH::constant(ms.h);
    p.kappa0 = ms.kappa0;
    p.kappaInf = ms.kappaInf;
    p.p = 2.0;
    SchemeConfig cfg;
    cfg.dt = dt;
    Stepper st(g, PotentialSpec::floryHuggins(ms.lambda), p, cfg);
    st.setForcing({[&](double x, double, double t) { return ms.gPhi(x, t); },
                   [&](double x, double, double t) { return ms.gSigma(x, t); }});
    State s = st.initialize(Field::fromFunction(g, [&](double x, double) { return ms.phi(x, 0.0); }),
                            Field::fromFunction(g, [&](double x, double) { return ms.sigma(x, 0.0); }));
    const int steps = static_cast<int>(std::lround(T / dt));
    for (int k = 0; k < steps; ++k) s = st.step(s);
    const Field ep = s.phi - Field::fromFunction(g, [&](double x, double) { return ms.phi(x, s.t); });
    const Field es = s.sigma - Field::fromFunction(g, [&](double x, double) { return ms.sigma(x, s.t); });
    return l2Norm(ep) + l2Norm(es);
}

Verdict manufactured(Clock::time_point suiteStart) {
    Verdict v;
    try {
        // dt proportional to h^2 so the temporal error is of the same order.
        std::vector<double> hs, es;
        for (int nx : {16, 32, 64}) {
            const double h = 1.0 / nx;
            const double T = 0.1;
            const int steps = static_cast<int>(std::ceil(T / (0.5 * h * h)));
            hs.push_back(h);
            es.push_back(manufacturedError(nx, T / steps, T));
        }
        std::vector<double> dts, et;
        for (double dt : {0.02, 0.01, 0.005}) {
            dts.push_back(dt);
            et.push_back(manufacturedError(512, dt, 0.4));
        }
        const double so = std::min(std::log2(es[0] / es[1]), std::log2(es[1] / es[2]));
        const double to = std::min(std::log2(et[0] / et[1]), std::log2(et[1] / et[2]));
        const double total = seconds(suiteStart);
        v.pass = so >= 1.8 && to >= 0.8 && total < 300.0;
        v.detail = "spatial order " + fmt("%.3f", so) + " (errors " + fmt("%.2e", es[0]) + ", " + fmt("%.2e", es[1]) +
                   ", " + fmt("%.2e", es[2]) + "), temporal order " + fmt("%.3f", to) + " (errors " +
                   fmt("%.2e", et[0]) + ", " + fmt("%.2e", et[1]) + ", " + fmt("%.2e", et[2]) +
                   "), suite runtime " + fmt("%.0f", total) + " s";
    } catch (const Error& e) {
        v.detail = std::string("solver failed: ") + e.what() + " [" + e.kind() + "]";
    }
    return v;
}

Verdict validationGates() {
    const fs::path golden = kSource / "tests" / "golden";
    const std::vector<std::string> required = {"source_compatibility", "p_window_2d", "p_window_3d", "smallness_3d",
                                               "phi0_mean",            "phi0_bound",  "sigma0_negative"};
    int checked = 0;
    std::string mismatches;
    std::vector<std::string> seen;
    for (const auto& entry : fs::directory_iterator(golden)) {
        if (entry.path().extension() != ".ini") continue;
        const std::string stem = entry.path().stem().string();
        seen.push_back(stem);
        std::string err;
        const int code = cli({"run", "--config", entry.path().string(), "--out", scratch("golden").string()}, &err);
        ++checked;
        if (code != kExitConfig || err != slurp(fs::path(entry.path()).replace_extension(".txt")))
            mismatches += " " + stem;
    }
    std::string missing;
    for (const auto& r : required)
        if (std::find(seen.begin(), seen.end(), r) == seen.end()) missing += " " + r;
    Verdict v;
    v.pass = mismatches.empty() && missing.empty();
    v.detail = std::to_string(checked) + " rejection configs checked against golden messages";
    if (!mismatches.empty()) v.detail += "; mismatched:" + mismatches;
    if (!missing.empty()) v.detail += "; missing:" + missing;
    return v;
}

template <class Fn>
Verdict guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        return {false, std::string("error: ") + e.what() + " [" + e.kind() + "]"};
    } catch (const std::exception& e) {
        return {false, std::string("error: ") + e.what()};
    }
}

} // namespace

int main() {
    const auto start = Clock::now();
    std::vector<std::pair<std::string, Verdict>> results;
    auto record = [&](const char* name, Verdict v) {
        results.emplace_back(name, v);
        std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", results.size(), name, v.detail.c_str());
        std::fflush(stdout);
    };

    record("operator consistency", guarded(operatorConsistency));
    record("mass dynamics", guarded(massDynamics));
    record("energy law", guarded(energyLaw));
    std::vector<MatrixRun> matrix;
    try {
        matrix = fullMatrix();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "full-mode matrix: %s\n", e.what());
    }
    record("minimum principle", guarded([&] { return minimumPrinciple(matrix); }));
    record("separation", guarded([&] { return separation(matrix); }));
    record("approximation convergence", guarded(approximationConvergence));
    record("continuous dependence", guarded(continuousDependence));
    record("manufactured solution", guarded([&] { return manufactured(start); }));
    record("validation gates", guarded(validationGates));

    int failures = 0;
    for (const auto& [name, v] : results) failures += v.pass ? 0 : 1;
    std::printf("%d/%zu criteria passed in %.1f s\n", static_cast<int>(results.size()) - failures, results.size(),
                seconds(start));
    return failures == 0 ? 0 : 1;
}
