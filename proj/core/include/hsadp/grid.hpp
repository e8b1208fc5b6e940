#pragma once

#include <span>
#include <vector>

namespace hsadp {

/// Evenly spaced values {min, min+step, ..., max}. Every error PMF in the
/// library lives on one of these.
struct ValueGrid {
    double min = 0.0;
    double max = 0.0;
    double step = 1.0;

    [[nodiscard]] int size() const;
    [[nodiscard]] double value(int index) const { return min + step * index; }
    /// Nearest grid index, clamped to the grid.
    [[nodiscard]] int index_of(double v) const;
    [[nodiscard]] double snap(double v) const { return value(index_of(v)); }
    /// Throws InputError unless step > 0 and min < max.
    void validate() const;

    friend bool operator==(const ValueGrid&, const ValueGrid&) = default;
};

using Pmf = std::vector<double>;

[[nodiscard]] double pmf_total(std::span<const double> pmf);

/// Scales to unit mass; throws ContractViolation on zero or negative mass.
void normalize(Pmf& pmf);

/// Grid-snapped histogram of `values`, normalized. Empty input gives an all-zero vector.
[[nodiscard]] Pmf histogram_pmf(std::span<const double> values, const ValueGrid& grid);

/// Checks nonnegativity and unit mass within `tol`.
[[nodiscard]] bool is_valid_pmf(std::span<const double> pmf, double tol = 1e-9);

/// Compensated (Neumaier) running sum.
class KahanSum {
public:
    void add(double x);
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace hsadp
