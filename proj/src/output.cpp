#include "chks/output.hpp"

#include "chks/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace chks {

static_assert(std::endian::native == std::endian::little, "RAW snapshots assume a little-endian host");

const std::string& diagnosticsHeader() {
    static const std::string h =
        "step,t,energy_total,energy_gl,energy_mix,dissipation_residual,phi_mean,phi_mean_lo,phi_mean_hi,"
        "sigma_min,sigma_mass,sep_delta,flux_imbalance,newton_iters,dt_used,status";
    return h;
}

std::string diagnosticsRow(const DiagnosticsRecord& r) {
    std::string s = std::to_string(r.step);
    for (double v : {r.t, r.energyTotal, r.energyGL, r.energyMix, r.dissipationResidual, r.phiMean, r.phiMeanLo,
                     r.phiMeanHi, r.sigmaMin, r.sigmaMass, r.sepDelta, r.fluxImbalance}) {
        s += ',';
        s += formatNumber(v);
    }
    s += ',' + std::to_string(r.newtonIters) + ',' + formatNumber(r.dtUsed) + ',' + r.status;
    return s;
}

std::string failureRow(int step, double t, const std::string& kind) {
    return std::to_string(step) + ',' + formatNumber(t) + ",,,,,,,,,,,,,," + kind;
}

void writePgm(const std::string& path, const Field& f) {
    const Grid& g = f.grid();
    const double lo = f.min(), hi = f.max();
    const double scale = hi > lo ? (hi - lo) / 65535.0 : 0.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P5\n# value = " << formatNumber(lo) << " + " << formatNumber(scale) << " * pixel\n"
        << g.nx << ' ' << g.ny << "\n65535\n";
    // PGM rows run top to bottom; write the largest y first.
    for (int j = g.ny - 1; j >= 0; --j)
        for (int i = 0; i < g.nx; ++i) {
            const double v = scale > 0.0 ? (f(i, j) - lo) / scale : 0.0;
            const auto px = static_cast<std::uint16_t>(std::clamp(std::lround(v), 0L, 65535L));
            const unsigned char bytes[2] = {static_cast<unsigned char>(px >> 8), static_cast<unsigned char>(px & 0xff)};
            out.write(reinterpret_cast<const char*>(bytes), 2);
        }
}

void writeRaw(const std::string& path, const Field& f, double t) {
    const Grid& g = f.grid();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write("CHKSRAW1", 8);
    const std::int32_t nx = g.nx, ny = g.ny;
    out.write(reinterpret_cast<const char*>(&nx), 4);
    out.write(reinterpret_cast<const char*>(&ny), 4);
    out.write(reinterpret_cast<const char*>(&t), 8);
    out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
}

RawSnapshot readRaw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "CHKSRAW1", 8) != 0) throw std::runtime_error(path + ": not a CHKSRAW1 file");
    std::int32_t nx = 0, ny = 0;
    RawSnapshot s;
    in.read(reinterpret_cast<char*>(&nx), 4);
    in.read(reinterpret_cast<char*>(&ny), 4);
    in.read(reinterpret_cast<char*>(&s.t), 8);
    if (!in || nx < 1 || ny < 1) throw std::runtime_error(path + ": bad header");
    s.nx = nx;
    s.ny = ny;
    s.values.resize(static_cast<std::size_t>(nx) * ny);
    in.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error(path + ": truncated data");
    return s;
}

} // namespace chks
