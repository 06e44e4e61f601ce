#include "chks/config.hpp"

#include "chks/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace chks {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> splitList(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Typed access that remembers which keys were read and collects errors.
class Reader {
public:
    explicit Reader(const IniDocument& d) : doc_(d) {}

    std::optional<std::string> raw(const std::string& key) {
        used_.insert(key);
        return doc_.get(key);
    }

    double real(const std::string& key, double def) {
        const auto v = raw(key);
        if (!v) return def;
        double out = 0.0;
        const char* b = v->data();
        const char* e = b + v->size();
        const auto res = std::from_chars(b, e, out);
        if (res.ec != std::errc() || res.ptr != e || !std::isfinite(out)) {
            issues.push_back(key + ": '" + *v + "' is not a finite number");
            return def;
        }
        return out;
    }

    long long integer(const std::string& key, long long def) {
        const auto v = raw(key);
        if (!v) return def;
        long long out = 0;
        const char* b = v->data();
        const char* e = b + v->size();
        const auto res = std::from_chars(b, e, out);
        if (res.ec != std::errc() || res.ptr != e) {
            issues.push_back(key + ": '" + *v + "' is not an integer");
            return def;
        }
        return out;
    }

    std::uint64_t unsigned64(const std::string& key, std::uint64_t def) {
        const auto v = raw(key);
        if (!v) return def;
        std::uint64_t out = 0;
        const char* b = v->data();
        const char* e = b + v->size();
        const auto res = std::from_chars(b, e, out);
        if (res.ec != std::errc() || res.ptr != e) {
            issues.push_back(key + ": '" + *v + "' is not an unsigned 64-bit integer");
            return def;
        }
        return out;
    }

    bool boolean(const std::string& key, bool def) {
        const auto v = raw(key);
        if (!v) return def;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        issues.push_back(key + ": '" + *v + "' is not a boolean");
        return def;
    }

    std::string word(const std::string& key, const std::string& def, std::initializer_list<const char*> allowed) {
        const auto v = raw(key);
        if (!v) return def;
        for (const char* a : allowed)
            if (*v == a) return *v;
        std::string list;
        for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
        issues.push_back(key + ": '" + *v + "' is not one of {" + list + "}");
        return def;
    }

    std::vector<double> reals(const std::string& key) {
        std::vector<double> out;
        const auto v = raw(key);
        if (!v) return out;
        for (const auto& item : splitList(*v)) {
            double x = 0.0;
            const auto res = std::from_chars(item.data(), item.data() + item.size(), x);
            if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
                issues.push_back(key + ": '" + item + "' is not a number");
                continue;
            }
            out.push_back(x);
        }
        return out;
    }

    void reportUnused() {
        for (const auto& [k, v] : doc_.entries())
            if (!used_.count(k)) issues.push_back(k + ": unknown key");
    }

    std::vector<std::string> issues;

private:
    const IniDocument& doc_;
    std::set<std::string> used_;
};

Mobility readMobility(Reader& r, const std::string& prefix) {
    const std::string shape = r.word(prefix, "constant", {"constant", "rational"});
    const double m0 = r.real(prefix + "_m0", 1.0);
    const double mMax = r.real(prefix + "_max", m0);
    if (shape == "rational") return Mobility::rational(m0, mMax);
    Mobility m = Mobility::constant(m0);
    m.mMax = mMax;
    return m;
}

IcSpec readIc(Reader& r, const std::string& field, IcKind defKind, double defMean) {
    IcSpec ic;
    const auto kindText = r.raw("ic." + field);
    ic.kind = defKind;
    if (kindText && !parseIcKind(*kindText, ic.kind))
        r.issues.push_back("ic." + field + ": '" + *kindText +
                           "' is not one of {uniform, cosine_bump, random_perturbed, tumor_seed}");
    const std::string p = "ic." + field + "_";
    ic.mean = r.real(p + "mean", defMean);
    ic.amplitude = r.real(p + "amplitude", 0.0);
    ic.inside = r.real(p + "inside", ic.mean);
    ic.radius = r.real(p + "radius", 0.25);
    ic.width = r.real(p + "width", 0.05);
    ic.centerX = r.real(p + "center_x", -1.0);
    ic.centerY = r.real(p + "center_y", -1.0);
    if (ic.kind == IcKind::TumorSeed && !(ic.width > 0.0)) r.issues.push_back(p + "width must be > 0");
    return ic;
}

} // namespace

IniDocument IniDocument::parse(const std::string& text, const std::string& origin) {
    IniDocument doc;
    std::vector<std::string> issues;
    std::stringstream ss(text);
    std::string line, section;
    int lineNo = 0;
    while (std::getline(ss, line)) {
        ++lineNo;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineNo);
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                issues.push_back(where + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back(where + ": expected key = value");
            continue;
        }
        if (section.empty()) {
            issues.push_back(where + ": key outside of a section");
            continue;
        }
        const std::string key = section + "." + trim(line.substr(0, eq));
        if (doc.entries_.count(key)) {
            issues.push_back(where + ": duplicate key " + key);
            continue;
        }
        doc.entries_[key] = trim(line.substr(eq + 1));
    }
    if (!issues.empty()) throw ConfigError(issues);
    return doc;
}

void IniDocument::applyOverride(const std::string& assignment) {
    const auto eq = assignment.find('=');
    const std::string key = eq == std::string::npos ? "" : trim(assignment.substr(0, eq));
    if (key.empty() || key.find('.') == std::string::npos || key.front() == '.' || key.back() == '.')
        throw ConfigError({"override '" + assignment + "' must have the form section.key=value"});
    entries_[key] = trim(assignment.substr(eq + 1));
}

std::optional<std::string> IniDocument::get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> validationIssues(const RunConfig& cfg) {
    const ValidationReport rep =
        cfg.strict3d ? validate(cfg.params, 3, true) : validate(cfg.params, cfg.grid.dim, false);
    return rep.lines();
}

RunConfig buildConfig(const IniDocument& doc) {
    Reader r(doc);
    RunConfig c;

    const long long dim = r.integer("grid.dim", 2);
    const long long nx = r.integer("grid.nx", 64);
    const long long ny = r.integer("grid.ny", dim == 1 ? 1 : nx);
    const double lx = r.real("grid.lx", 1.0);
    const double ly = r.real("grid.ly", dim == 1 ? 1.0 : lx);
    if (dim != 1 && dim != 2) r.issues.push_back("grid.dim: " + std::to_string(dim) + " must be 1 or 2");
    if (nx < 4 || nx > (1 << 14)) r.issues.push_back("grid.nx: " + std::to_string(nx) + " must be in [4, 16384]");
    if (dim == 2 && (ny < 4 || ny > (1 << 14)))
        r.issues.push_back("grid.ny: " + std::to_string(ny) + " must be in [4, 16384]");
    if (dim == 1 && ny != 1) r.issues.push_back("grid.ny: must be 1 in 1D");
    if (!(lx > 0.0) || !(ly > 0.0)) r.issues.push_back("grid: lengths must be > 0");
    c.grid.dim = static_cast<int>(dim);
    c.grid.nx = static_cast<int>(nx);
    c.grid.ny = dim == 1 ? 1 : static_cast<int>(ny);
    c.grid.lx = lx;
    c.grid.ly = ly;

    const std::string kind = r.word("potential.kind", "flory_huggins", {"flory_huggins", "neg_log"});
    const double lambda = r.real("potential.lambda", 0.0);
    if (!(lambda >= 0.0)) r.issues.push_back("potential.lambda: " + formatNumber(lambda) + " must be >= 0");
    c.potential = kind == "neg_log" ? PotentialSpec::negLog(lambda) : PotentialSpec::floryHuggins(lambda);

    ModelParams& p = c.params;
    p.chi = r.real("params.chi", 0.0);
    p.eps = r.real("params.eps", 1.0);
    p.m = r.real("params.m", 0.0);
    const auto phiNodes = r.reals("params.h_table_phi");
    const auto sigmaNodes = r.reals("params.h_table_sigma");
    const auto values = r.reals("params.h_table_values");
    const double hConst = r.real("params.h", 0.0);
    if (!values.empty() || !phiNodes.empty() || !sigmaNodes.empty()) {
        p.h.kind = SourceH::Kind::Table;
        p.h.table = {phiNodes, sigmaNodes, values};
    } else {
        p.h = SourceH::constant(hConst);
    }
    p.kappa0 = r.real("params.kappa0", 1.0);
    p.kappaInf = r.real("params.kappa_inf", 1.0);
    p.p = r.real("params.p", 2.0);
    p.betaB = r.real("params.beta_B", 1.0);
    p.betaB0 = r.real("params.beta_b0", p.betaB);
    p.mobM = readMobility(r, "params.mobility_m");
    p.mobN = readMobility(r, "params.mobility_n");
    c.strict3d = r.boolean("params.strict3d", false);

    SchemeConfig& s = c.scheme;
    s.dt = r.real("scheme.dt", 1e-3);
    const std::string mode =
        r.word("scheme.mode", "full", {"full", "sourceless", "old_model", "approximation"});
    s.mode = mode == "sourceless"      ? Mode::Sourceless
             : mode == "old_model"     ? Mode::OldModel
             : mode == "approximation" ? Mode::Approximation
                                       : Mode::Full;
    s.approxN = static_cast<int>(r.integer("scheme.n", 0));
    s.newtonTol = r.real("scheme.newton_tol", s.newtonTol);
    s.newtonMaxIter = static_cast<int>(r.integer("scheme.newton_max_iter", s.newtonMaxIter));
    s.linTol = r.real("scheme.lin_tol", s.linTol);
    s.nutrientTol = r.real("scheme.nutrient_tol", s.nutrientTol);
    s.advection = r.word("scheme.advection", "minmod", {"minmod", "upwind"}) == "upwind" ? Advection::Upwind
                                                                                         : Advection::Minmod;
    s.maxHalvings = static_cast<int>(r.integer("scheme.max_halvings", s.maxHalvings));
    s.fractionToBoundary = r.real("scheme.fraction_to_boundary", s.fractionToBoundary);
    c.tEnd = r.real("scheme.t_end", 0.0);
    const long long steps = r.integer("scheme.steps", -1);
    if (!(s.dt > 0.0)) r.issues.push_back("scheme.dt: " + formatNumber(s.dt) + " must be > 0");
    if (s.mode == Mode::Approximation && s.approxN < 1)
        r.issues.push_back("scheme.n: approximation mode needs n >= 1");
    if (steps >= 0) {
        c.steps = static_cast<int>(steps);
        c.tEnd = c.steps * s.dt;
    } else if (s.dt > 0.0) {
        if (!(c.tEnd >= 0.0)) r.issues.push_back("scheme.t_end: must be >= 0");
        c.steps = static_cast<int>(std::llround(c.tEnd / s.dt));
    }

    c.phiIc = readIc(r, "phi", IcKind::Uniform, 0.0);
    c.sigmaIc = readIc(r, "sigma", IcKind::Uniform, 1.0);
    c.seed = r.unsigned64("ic.seed", 1);

    OutputSpec& o = c.output;
    o.csv = r.raw("output.csv").value_or(o.csv);
    o.snapshotEvery = static_cast<int>(r.integer("output.snapshot_every", 0));
    const std::string fmt = r.word("output.snapshot_format", "pgm", {"pgm", "raw", "both"});
    o.snapshotFormat = fmt == "raw" ? SnapshotFormat::Raw : fmt == "both" ? SnapshotFormat::Both : SnapshotFormat::Pgm;
    o.finalRaw = r.boolean("output.final_raw", true);
    if (const auto sv = r.raw("output.subvolume")) {
        const auto parts = splitList(*sv);
        std::vector<int> idx;
        for (const auto& part : parts) {
            int v = 0;
            const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
            if (res.ec == std::errc() && res.ptr == part.data() + part.size()) idx.push_back(v);
        }
        if (idx.size() != 4 || idx.size() != parts.size()) {
            r.issues.push_back("output.subvolume: expected four cell indices i0,i1,j0,j1");
        } else {
            o.subvolume = {idx[0], idx[1], idx[2], idx[3]};
            if (c.grid.dim == 1 && o.subvolume.j1 == 0) o.subvolume.j1 = 1;
            try {
                o.subvolume.check(c.grid);
            } catch (const std::invalid_argument& e) {
                r.issues.push_back(std::string("output.subvolume: ") + e.what());
            }
        }
    }

    c.twin.field = r.word("twin.field", "sigma", {"phi", "sigma"});
    c.twin.amplitude = r.real("twin.amplitude", 1e-3);
    for (double v : r.reals("nconv.n_list")) {
        if (v < 1 || v != std::floor(v)) {
            r.issues.push_back("nconv.n_list: " + formatNumber(v) + " is not a positive integer");
            continue;
        }
        c.nList.push_back(static_cast<int>(v));
    }
    r.reportUnused();

    std::vector<std::string> issues = std::move(r.issues);
    for (auto& l : validationIssues(c)) issues.push_back(std::move(l));
    if (!issues.empty()) throw ConfigError(issues);
    return c;
}

RunConfig loadConfig(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot read config file " + path});
    std::stringstream ss;
    ss << in.rdbuf();
    IniDocument doc = IniDocument::parse(ss.str(), path);
    for (const auto& o : overrides) doc.applyOverride(o);
    return buildConfig(doc);
}

} // namespace chks
