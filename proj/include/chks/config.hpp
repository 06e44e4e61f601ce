#pragma once

#include "chks/coefficients.hpp"
#include "chks/grid.hpp"
#include "chks/initial_conditions.hpp"
#include "chks/nutrient_flux.hpp"
#include "chks/potentials.hpp"
#include "chks/stepper.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chks {

/// Flat INI text: "[section]" headers, "key = value" lines, '#' or ';'
/// comments. Keys are addressed as "section.key".
class IniDocument {
public:
    /// Throws ConfigError on malformed lines or duplicate keys.
    static IniDocument parse(const std::string& text, const std::string& origin = "config");
    /// "section.key=value"; throws ConfigError when malformed.
    void applyOverride(const std::string& assignment);

    const std::map<std::string, std::string>& entries() const { return entries_; }
    std::optional<std::string> get(const std::string& key) const;

private:
    std::map<std::string, std::string> entries_;
};

enum class SnapshotFormat { None, Pgm, Raw, Both };

struct OutputSpec {
    std::string csv = "diagnostics.csv";
    int snapshotEvery = 0; ///< 0 disables snapshots
    SnapshotFormat snapshotFormat = SnapshotFormat::Pgm;
    Subvolume subvolume{}; ///< empty selects the left half
    bool finalRaw = true;
};

struct TwinSpec {
    std::string field = "sigma"; ///< perturbed field: phi or sigma
    double amplitude = 1e-3;
};

struct RunConfig {
    Grid grid;
    PotentialSpec potential;
    ModelParams params;
    bool strict3d = false;
    SchemeConfig scheme;
    int steps = 0;
    double tEnd = 0.0;
    IcSpec phiIc;
    IcSpec sigmaIc;
    std::uint64_t seed = 1;
    OutputSpec output;
    TwinSpec twin;
    std::vector<int> nList;
};

/// Parse and validate. Every problem found (unknown keys, malformed numbers,
/// rejected parameters) is collected into one ConfigError.
RunConfig buildConfig(const IniDocument& doc);

/// Read, apply overrides, build. A missing file is a ConfigError.
RunConfig loadConfig(const std::string& path, const std::vector<std::string>& overrides);

/// Parameter validation lines for the config (grid dimension or strict 3D).
std::vector<std::string> validationIssues(const RunConfig& cfg);

} // namespace chks
