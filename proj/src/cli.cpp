#include "chks/cli.hpp"

#include "chks/config.hpp"
#include "chks/diagnostics.hpp"
#include "chks/errors.hpp"
#include "chks/initial_conditions.hpp"
#include "chks/kernels.hpp"
#include "chks/output.hpp"
#include "chks/stepper.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>

namespace fs = std::filesystem;

namespace chks {

namespace {

struct Options {
    std::string config;
    std::string configB;
    std::vector<std::string> overrides;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string kernels = "auto";
};

struct InitialData {
    Field phi;
    Field sigma;
};

// Seeds: phi uses the configured seed, sigma the next one.
InitialData makeInitialData(const RunConfig& c) {
    InitialData d{makeField(c.phiIc, c.grid, c.seed), makeField(c.sigmaIc, c.grid, c.seed + 1)};
    return d;
}

void requireAdmissible(const InitialData& d, const RunConfig& c) {
    const auto issues = checkInitialData(d.phi, d.sigma, c.potential.singular());
    if (!issues.empty()) throw ConfigError(issues);
}

RunConfig load(const Options& o, const std::string& path) {
    RunConfig c = loadConfig(path, o.overrides);
    if (o.seed) c.seed = *o.seed;
    return c;
}

std::ofstream openOut(const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
}

void writeSnapshots(const fs::path& dir, const State& s, int step, SnapshotFormat fmt) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "%06d", step);
    if (fmt == SnapshotFormat::Pgm || fmt == SnapshotFormat::Both) {
        writePgm((dir / ("phi_" + std::string(tag) + ".pgm")).string(), s.phi);
        writePgm((dir / ("sigma_" + std::string(tag) + ".pgm")).string(), s.sigma);
    }
    if (fmt == SnapshotFormat::Raw || fmt == SnapshotFormat::Both) {
        writeRaw((dir / ("phi_" + std::string(tag) + ".raw")).string(), s.phi, s.t);
        writeRaw((dir / ("sigma_" + std::string(tag) + ".raw")).string(), s.sigma, s.t);
    }
}

int cmdRun(const Options& o, std::ostream& out, std::ostream& err) {
    const RunConfig c = load(o, o.config);
    Stepper st(c.grid, c.potential, c.params, c.scheme);
    const InitialData d = makeInitialData(c);
    requireAdmissible(d, c);
    const fs::path dir(o.out);
    fs::create_directories(dir);

    std::ofstream csv = openOut(dir / c.output.csv);
    csv << diagnosticsHeader() << '\n';
    State s = st.initialize(d.phi, d.sigma);
    AdvanceOptions opt;
    opt.subvolume = c.output.subvolume;
    const DiagnosticsRecord r0 = initialRecord(st, s, opt);
    csv << diagnosticsRow(r0) << '\n';
    if (c.output.snapshotEvery > 0) writeSnapshots(dir, s, 0, c.output.snapshotFormat);

    opt.observer = [&](const State& next, const DiagnosticsRecord& r) {
        csv << diagnosticsRow(r) << '\n';
        if (c.output.snapshotEvery > 0 && r.step % c.output.snapshotEvery == 0)
            writeSnapshots(dir, next, r.step, c.output.snapshotFormat);
    };
    try {
        AdvanceResult res = advance(st, s, c.steps, opt);
        s = std::move(res.state);
    } catch (const StepFailure& f) {
        csv << failureRow(f.step, f.step * c.scheme.dt, f.innerKind) << '\n';
        err << "run failed: " << f.what() << " [" << f.innerKind << "]\n";
        return kExitFailure;
    }
    if (c.output.finalRaw) {
        writeRaw((dir / "phi_final.raw").string(), s.phi, s.t);
        writeRaw((dir / "sigma_final.raw").string(), s.sigma, s.t);
    }
    out << "run: " << c.steps << " steps to t = " << formatNumber(s.t) << " (" << modeName(c.scheme.mode)
        << ", kernels " << kernels::active().name << ")\n";
    out << "  min sigma = " << formatNumber(s.sigma.min()) << ", 1 - max|phi| = " << formatNumber(1.0 - s.phi.maxAbs())
        << ", mean phi = " << formatNumber(mean(s.phi)) << '\n';
    return kExitOk;
}

int cmdTwin(const Options& o, std::ostream& out, std::ostream& err) {
    const RunConfig ca = load(o, o.config);
    RunConfig cb = o.configB.empty() ? ca : load(o, o.configB);
    std::vector<std::string> issues;
    if (!(ca.grid == cb.grid)) issues.push_back("twin: the two runs have different grids");
    if (ca.scheme.dt != cb.scheme.dt || ca.steps != cb.steps)
        issues.push_back("twin: the two runs have different timelines (dt or number of steps)");
    if (!issues.empty()) throw ConfigError(issues);

    Stepper sa(ca.grid, ca.potential, ca.params, ca.scheme);
    Stepper sb(cb.grid, cb.potential, cb.params, cb.scheme);
    InitialData da = makeInitialData(ca);
    InitialData db = makeInitialData(cb);
    if (o.configB.empty()) addCosinePerturbation(ca.twin.field == "phi" ? db.phi : db.sigma, ca.twin.amplitude);
    requireAdmissible(da, ca);
    requireAdmissible(db, cb);

    const fs::path dir(o.out);
    fs::create_directories(dir);
    std::ofstream csv = openOut(dir / "twin.csv");
    csv << "step,t,phi_dual2,phi_mean_diff,sigma_dual2,sigma_mean_diff,phi_v2,sigma_l22\n";

    State a = sa.initialize(da.phi, da.sigma);
    State b = sb.initialize(db.phi, db.sigma);
    TwinAccumulator acc;
    auto emit = [&](int step) {
        acc.add(a, b);
        const TwinSample& s = acc.samples().back();
        csv << step << ',' << formatNumber(s.t) << ',' << formatNumber(s.phiDual2) << ','
            << formatNumber(s.phiMeanDiff) << ',' << formatNumber(s.sigmaDual2) << ','
            << formatNumber(s.sigmaMeanDiff) << ',' << formatNumber(s.phiV2) << ',' << formatNumber(s.sigmaL22)
            << '\n';
    };
    emit(0);
    for (int k = 1; k <= ca.steps; ++k) {
        try {
            if (o.threads > 1) {
                auto fa = std::async(std::launch::async, [&] { return sa.step(a); });
                State nb = sb.step(b);
                a = fa.get();
                b = std::move(nb);
            } else {
                a = sa.step(a);
                b = sb.step(b);
            }
        } catch (const Error& e) {
            err << "twin failed at step " << k << ": " << e.what() << " [" << e.kind() << "]\n";
            return kExitFailure;
        }
        emit(k);
    }

    const TwinMetrics& m = acc.metrics();
    std::ofstream sum = openOut(dir / "twin_summary.csv");
    sum << "metric,value\n";
    const std::pair<const char*, double> rows[] = {
        {"sup_phi_dual2", m.supPhiDual2},     {"sup_phi_mean2", m.supPhiMean2},
        {"sup_phi_mean", m.supPhiMean},       {"sup_sigma_dual2", m.supSigmaDual2},
        {"sup_sigma_mean2", m.supSigmaMean2}, {"int_phi_v2", m.intPhiV2},
        {"int_sigma_l22", m.intSigmaL22},     {"rhs_phi_dual2", m.rhsPhiDual2},
        {"rhs_phi_mean2", m.rhsPhiMean2},     {"rhs_phi_mean", m.rhsPhiMean},
        {"rhs_sigma_dual2", m.rhsSigmaDual2}, {"rhs_sigma_mean2", m.rhsSigmaMean2},
        {"sup_sigma_dual", m.supSigmaDual},   {"lhs", m.lhs()},
        {"rhs", m.rhs()},                     {"ratio", m.ratio()},
    };
    for (const auto& [name, v] : rows) sum << name << ',' << formatNumber(v) << '\n';
    out << "twin: " << ca.steps << " steps, lhs/rhs = " << formatNumber(m.ratio())
        << ", sup_t ||sigma1 - sigma2||_* = " << formatNumber(m.supSigmaDual) << '\n';
    return kExitOk;
}

struct Trajectory {
    std::optional<State> final;
    std::string status = "ok";
    std::string message;
};

Trajectory runTo(const RunConfig& c, const SchemeConfig& scheme) {
    Trajectory t;
    try {
        Stepper st(c.grid, c.potential, c.params, scheme);
        const InitialData d = makeInitialData(c);
        State s = st.initialize(d.phi, d.sigma);
        for (int k = 0; k < c.steps; ++k) s = st.step(s);
        t.final = std::move(s);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        t.status = e.kind();
        t.message = e.what();
    }
    return t;
}

int cmdNConv(const Options& o, std::ostream& out, std::ostream& err) {
    const RunConfig c = load(o, o.config);
    requireAdmissible(makeInitialData(c), c);
    const fs::path dir(o.out);
    fs::create_directories(dir);

    SchemeConfig ref = c.scheme;
    ref.mode = Mode::Full;
    std::vector<SchemeConfig> schemes;
    for (int n : c.nList) {
        SchemeConfig s = c.scheme;
        s.mode = Mode::Approximation;
        s.approxN = n;
        schemes.push_back(s);
    }
    // Validate every scheme up front so rejections exit with status 2.
    Stepper(c.grid, c.potential, c.params, ref);
    for (const auto& s : schemes) Stepper(c.grid, c.potential, c.params, s);

    std::vector<Trajectory> runs(schemes.size());
    Trajectory reference;
    if (!schemes.empty()) {
        if (o.threads > 1) {
            std::vector<std::future<Trajectory>> fut;
            auto refFut = std::async(std::launch::async, [&] { return runTo(c, ref); });
            for (const auto& s : schemes) fut.push_back(std::async(std::launch::async, [&c, s] { return runTo(c, s); }));
            reference = refFut.get();
            for (std::size_t k = 0; k < fut.size(); ++k) runs[k] = fut[k].get();
        } else {
            reference = runTo(c, ref);
            for (std::size_t k = 0; k < schemes.size(); ++k) runs[k] = runTo(c, schemes[k]);
        }
    }

    std::ofstream csv = openOut(dir / "nconv.csv");
    csv << "n,phi_l2_diff,sigma_l2_diff,phi_excess,status\n";
    if (!schemes.empty() && !reference.final) {
        err << "nconv: reference run failed: " << reference.message << " [" << reference.status << "]\n";
        return kExitFailure;
    }
    int status = kExitOk;
    for (std::size_t k = 0; k < schemes.size(); ++k) {
        const Trajectory& t = runs[k];
        if (!t.final) {
            csv << c.nList[k] << ",,,," << t.status << '\n';
            err << "nconv: n = " << c.nList[k] << " failed: " << t.message << '\n';
            status = kExitFailure;
            continue;
        }
        const double dphi = l2Norm(t.final->phi - reference.final->phi);
        const double dsig = l2Norm(t.final->sigma - reference.final->sigma);
        const double excess = std::max(t.final->phi.maxAbs() - 1.0, 0.0);
        csv << c.nList[k] << ',' << formatNumber(dphi) << ',' << formatNumber(dsig) << ',' << formatNumber(excess)
            << ",ok\n";
        out << "n = " << c.nList[k] << ": ||phi_n - phi_ref|| = " << formatNumber(dphi)
            << ", ||sigma_n - sigma_ref|| = " << formatNumber(dsig) << ", max(|phi_n| - 1)+ = " << formatNumber(excess)
            << '\n';
    }
    if (schemes.empty()) out << "nconv: empty n list, nothing to compare\n";
    return status;
}

int cmdCompare(const Options& o, std::ostream& out, std::ostream& err) {
    const RunConfig c = load(o, o.config);
    SchemeConfig fullCfg = c.scheme, oldCfg = c.scheme;
    fullCfg.mode = Mode::Full;
    oldCfg.mode = Mode::OldModel;
    Stepper full(c.grid, c.potential, c.params, fullCfg);
    Stepper old(c.grid, c.potential, c.params, oldCfg);
    const InitialData d = makeInitialData(c);
    requireAdmissible(d, c);
    const Subvolume sub = c.output.subvolume.i1 > c.output.subvolume.i0 ? c.output.subvolume
                                                                        : Subvolume::leftHalf(c.grid);
    const fs::path dir(o.out);
    fs::create_directories(dir);
    std::ofstream csv = openOut(dir / "compare.csv");
    csv << "step,t,sigma_min_full,sigma_min_old,full_storage,full_diffusive,full_chemotaxis,full_source,"
           "full_imbalance,old_storage,old_diffusive,old_chemotaxis,old_source,old_imbalance\n";

    State a = full.initialize(d.phi, d.sigma);
    State b = old.initialize(d.phi, d.sigma);
    csv << "0,0," << formatNumber(a.sigma.min()) << ',' << formatNumber(b.sigma.min()) << ",,,,,,,,,,\n";
    int firstNegative = -1, oldFailedAt = -1;
    std::string oldFailure;
    double worstFull = a.sigma.min(), worstOld = b.sigma.min();
    for (int k = 1; k <= c.steps; ++k) {
        StepInfo ia, ib;
        try {
            a = full.step(a, &ia);
        } catch (const Error& e) {
            err << "compare failed at step " << k << " (full model): " << e.what() << " [" << e.kind() << "]\n";
            return kExitFailure;
        }
        // The old model is allowed to break down; its column goes blank from then on.
        if (oldFailedAt < 0) {
            try {
                b = old.step(b, &ib);
            } catch (const Error& e) {
                oldFailedAt = k;
                oldFailure = std::string(e.kind());
            }
        }
        const bool oldOk = oldFailedAt < 0;
        const FluxBalance fa = fluxBalance(ia.budget, sub);
        worstFull = std::min(worstFull, a.sigma.min());
        if (oldOk) {
            worstOld = std::min(worstOld, b.sigma.min());
            if (firstNegative < 0 && b.sigma.min() < 0.0) firstNegative = k;
        }
        csv << k << ',' << formatNumber(a.t) << ',' << formatNumber(a.sigma.min()) << ','
            << (oldOk ? formatNumber(b.sigma.min()) : oldFailure);
        csv << ',' << formatNumber(fa.storageRate) << ',' << formatNumber(fa.diffusive) << ','
            << formatNumber(fa.chemotaxis) << ',' << formatNumber(fa.source) << ',' << formatNumber(fa.imbalance);
        if (oldOk) {
            const FluxBalance fb = fluxBalance(ib.budget, sub);
            csv << ',' << formatNumber(fb.storageRate) << ',' << formatNumber(fb.diffusive) << ','
                << formatNumber(fb.chemotaxis) << ',' << formatNumber(fb.source) << ',' << formatNumber(fb.imbalance);
        } else {
            csv << ",,,,,";
        }
        csv << '\n';
    }
    out << "compare: min sigma full = " << formatNumber(worstFull) << ", old model = " << formatNumber(worstOld);
    if (firstNegative >= 0) out << " (old model negative from step " << firstNegative << ")";
    out << '\n';
    if (oldFailedAt >= 0) out << "compare: old model stopped at step " << oldFailedAt << " [" << oldFailure << "]\n";
    return kExitOk;
}

} // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cahn-Hilliard-Keller-Segel tumor growth simulator", "chks"};
    app.require_subcommand(1, 1);
    Options o;
    auto common = [&](CLI::App* sub, bool needConfig) {
        auto* cfg = sub->add_option("--config", o.config, "INI configuration file");
        if (needConfig) cfg->required();
        sub->add_option("--override", o.overrides, "section.key=value (repeatable)");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--seed", o.seed, "seed for random initial data");
        sub->add_option("--threads", o.threads, "worker threads for twin/nconv")->check(CLI::Range(1, 256));
        sub->add_option("--kernels", o.kernels, "inner-loop variant: auto, scalar, avx2");
    };
    auto* run = app.add_subcommand("run", "simulate and write the diagnostics CSV");
    auto* twin = app.add_subcommand("twin", "two runs from nearby data, continuous-dependence metrics");
    auto* nconv = app.add_subcommand("nconv", "approximation-mode runs for each n against the full model");
    auto* compare = app.add_subcommand("compare", "full and old nutrient model from the same data");
    for (auto* s : {run, twin, nconv, compare}) common(s, true);
    twin->add_option("--config-b", o.configB, "second configuration (default: perturb the first)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    kernels::Isa isa{};
    if (!kernels::parseIsa(o.kernels, isa)) {
        err << "unknown --kernels value '" << o.kernels << "' (expected auto, scalar or avx2)\n";
        return kExitConfig;
    }
    if (!kernels::select(isa)) {
        err << "kernel variant '" << o.kernels << "' is not available on this machine\n";
        return kExitConfig;
    }

    try {
        if (run->parsed()) return cmdRun(o, out, err);
        if (twin->parsed()) return cmdTwin(o, out, err);
        if (nconv->parsed()) return cmdNConv(o, out, err);
        return cmdCompare(o, out, err);
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace chks
