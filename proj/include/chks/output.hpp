#pragma once

#include "chks/diagnostics.hpp"
#include "chks/grid.hpp"

#include <ostream>
#include <string>

namespace chks {

/// Header of the diagnostics CSV.
const std::string& diagnosticsHeader();

/// One CSV row; numbers in shortest round-trip form.
std::string diagnosticsRow(const DiagnosticsRecord& r);

/// Row for a failed step: index, attempted time, empty measurements, status.
std::string failureRow(int step, double t, const std::string& kind);

/// 16-bit binary PGM. Values are mapped affinely onto [0, 65535]; the map
/// (value = offset + scale * pixel) is stored in a header comment.
void writePgm(const std::string& path, const Field& f);

/// Binary dump: "CHKSRAW1", int32 nx, int32 ny, float64 t, then nx*ny float64
/// values (row-major, x fastest), all little endian.
void writeRaw(const std::string& path, const Field& f, double t);

struct RawSnapshot {
    int nx = 0;
    int ny = 0;
    double t = 0.0;
    std::vector<double> values;
};

/// Throws std::runtime_error on malformed files.
RawSnapshot readRaw(const std::string& path);

} // namespace chks
