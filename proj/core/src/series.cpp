#include "hsadp/series.hpp"

#include <string>

#include "hsadp/errors.hpp"

namespace hsadp {

int TrainingSeries::first_slot() const {
    if (timestamps.empty()) return 0;
    std::int64_t seconds = timestamps.front() % 86400;
    if (seconds < 0) seconds += 86400;
    return static_cast<int>(seconds / kStepSeconds);
}

void TrainingSeries::validate() const {
    if (actual.size() != reference.size())
        throw InputError("actual and reference lengths differ (" + std::to_string(actual.size()) + " vs " +
                         std::to_string(reference.size()) + ")");
    if (actual.size() < 2) throw InputError("training series needs at least 2 points");
    if (!timestamps.empty()) {
        if (timestamps.size() != actual.size()) throw InputError("timestamp count does not match values");
        const std::int64_t step = timestamps[1] - timestamps[0];
        if (step <= 0) throw InputError("timestamps must be strictly increasing");
        for (std::size_t i = 1; i < timestamps.size(); ++i)
            if (timestamps[i] - timestamps[i - 1] != step)
                throw InputError("non-uniform cadence at index " + std::to_string(i));
    }
    if (!temperature.empty() && temperature.size() != actual.size())
        throw InputError("temperature length does not match values");
}

std::vector<double> compute_errors(std::span<const double> actual, std::span<const double> reference) {
    if (actual.size() != reference.size()) throw InputError("actual and reference lengths differ");
    std::vector<double> out(actual.size());
    for (std::size_t i = 0; i < actual.size(); ++i) out[i] = actual[i] - reference[i];
    return out;
}

std::vector<double> compute_errors(const TrainingSeries& series) {
    series.validate();
    return compute_errors(series.actual, series.reference);
}

}  // namespace hsadp
