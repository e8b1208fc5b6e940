#include "hsadp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsadp/errors.hpp"

namespace hsadp {

int ValueGrid::size() const {
    return static_cast<int>(std::floor((max - min) / step + 0.5)) + 1;
}

int ValueGrid::index_of(double v) const {
    const double raw = std::round((v - min) / step);
    if (!(raw > 0.0)) return 0;
    const int last = size() - 1;
    return raw >= last ? last : static_cast<int>(raw);
}

void ValueGrid::validate() const {
    if (!(step > 0.0)) throw InputError("value grid step must be positive");
    if (!(min < max)) throw InputError("value grid requires min < max");
    if (size() > 1'000'000) throw InputError("value grid too fine: " + std::to_string(size()) + " points");
}

double pmf_total(std::span<const double> pmf) {
    KahanSum s;
    for (double p : pmf) s.add(p);
    return s.value();
}

void normalize(Pmf& pmf) {
    const double total = pmf_total(pmf);
    if (!(total > 0.0)) throw ContractViolation("cannot normalize a PMF with zero mass");
    for (double& p : pmf) p /= total;
}

Pmf histogram_pmf(std::span<const double> values, const ValueGrid& grid) {
    Pmf pmf(grid.size(), 0.0);
    if (values.empty()) return pmf;
    for (double v : values) pmf[grid.index_of(v)] += 1.0;
    const double n = static_cast<double>(values.size());
    for (double& p : pmf) p /= n;
    return pmf;
}

bool is_valid_pmf(std::span<const double> pmf, double tol) {
    for (double p : pmf)
        if (!(p >= 0.0)) return false;
    return std::abs(pmf_total(pmf) - 1.0) <= tol;
}

void KahanSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

}  // namespace hsadp
