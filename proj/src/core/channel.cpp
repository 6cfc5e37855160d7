#include "pdpmc/engine/channel.hpp"

#include "pdpmc/core/error.hpp"

namespace pdpmc {

std::size_t select_channel(std::span<const double> rates, double eta2) {
    double total = 0.0;
    std::size_t last_positive = rates.size();
    for (std::size_t a = 0; a < rates.size(); ++a) {
        if (rates[a] < 0.0) throw NegativeRate("select_channel: negative rate");
        if (rates[a] > 0.0) {
            total += rates[a];
            last_positive = a;
        }
    }
    if (last_positive == rates.size())
        throw InvalidArgument("select_channel: all rates are zero (waiting time should have been infinite)");
    const double threshold = eta2 * total;
    double cumulative = 0.0;
    for (std::size_t a = 0; a < rates.size(); ++a) {
        if (rates[a] == 0.0) continue;
        cumulative += rates[a];
        if (threshold <= cumulative) return a;
    }
    return last_positive;
}

} // namespace pdpmc
