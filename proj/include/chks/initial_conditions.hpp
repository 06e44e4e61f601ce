#pragma once

#include "chks/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace chks {

/// splitmix64 (Steele, Lea, Flood). next() returns the 64-bit output;
/// uniform() maps the top 53 bits to [0, 1).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double uniform();

private:
    std::uint64_t state_;
};

enum class IcKind { Uniform, CosineBump, RandomPerturbed, TumorSeed };

const char* icKindName(IcKind k);
bool parseIcKind(const std::string& s, IcKind& out);

/// Recipe for one initial field.
///  uniform:          mean
///  cosine_bump:      mean + amplitude cos(pi x / lx) [cos(pi y / ly)]
///  random_perturbed: mean + amplitude (2U - 1), U uniform on [0, 1)
///  tumor_seed:       mean + (inside - mean)(1 - tanh((r - radius) / width)) / 2
///                    with r the distance to (centerX, centerY)
struct IcSpec {
    IcKind kind = IcKind::Uniform;
    double mean = 0.0;
    double amplitude = 0.0;
    double inside = 0.0;
    double radius = 0.25;
    double width = 0.05;
    double centerX = -1.0; ///< negative selects the domain center
    double centerY = -1.0;
};

Field makeField(const IcSpec& ic, const Grid& g, std::uint64_t seed);

/// Adds amplitude * cos(pi x / lx) [cos(pi y / ly)] to f.
void addCosinePerturbation(Field& f, double amplitude);

/// Problems with the initial data: mean phi0 in (-1, 1), |phi0| < 1 (when
/// `singular`), sigma0 >= 0. Empty when admissible.
std::vector<std::string> checkInitialData(const Field& phi0, const Field& sigma0, bool singular);

} // namespace chks
