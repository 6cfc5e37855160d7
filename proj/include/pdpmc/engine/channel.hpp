#pragma once

#include <cstddef>
#include <span>

namespace pdpmc {

/// Picks channel alpha with probability rates[alpha] / sum(rates) by inverting the
/// cumulative sum at eta2 * total. A variate landing exactly on a boundary goes to
/// the lower channel. Throws InvalidArgument if no rate is strictly positive.
std::size_t select_channel(std::span<const double> rates, double eta2);

} // namespace pdpmc
