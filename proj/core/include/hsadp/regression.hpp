#pragma once

#include <span>
#include <vector>

#include "hsadp/vfa.hpp"

namespace hsadp {

struct LinearFit {
    std::vector<double> theta;  ///< original feature units, intercept first
    int rank = 0;               ///< rank of the standardized design
    bool ridge = false;         ///< normal equations were singular
};

/// Weighted least squares (or least absolute deviations via IRLS) of y on the
/// row-major design x (rows x cols, column 0 the intercept). Columns are
/// standardized before solving; constant columns get coefficient 0. Empty
/// weights mean uniform.
[[nodiscard]] LinearFit fit_linear(std::span<const double> x, int rows, int cols, std::span<const double> y,
                                   std::span<const double> weights = {}, Loss loss = Loss::Squared);

}  // namespace hsadp
