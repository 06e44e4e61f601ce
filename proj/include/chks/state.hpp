#pragma once

#include "chks/grid.hpp"

namespace chks {

/// Evolving snapshot: order parameter, chemical potential, nutrient, time.
struct State {
    Field phi;
    Field mu;
    Field sigma;
    double t = 0.0;
};

} // namespace chks
