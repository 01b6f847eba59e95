#include "nudge/grid.hpp"

#include <numbers>
#include <string>

#include "nudge/errors.hpp"

namespace nudge {

Grid::Grid(int n, double l) : n_(n), l_(l) {
    if (n < 4 || n % 2 != 0) {
        throw ConfigError("grid size must be an even integer >= 4, got " + std::to_string(n));
    }
    if (!(l > 0.0)) {
        throw ConfigError("grid length must be positive");
    }
}

double Grid::physical_wavenumber(int i) const {
    return 2.0 * std::numbers::pi * wavenumber(i) / l_;
}

}  // namespace nudge
