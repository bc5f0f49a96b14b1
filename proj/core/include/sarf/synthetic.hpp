#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "sarf/features.hpp"
#include "sarf/market_data.hpp"

namespace sarf {

// Geometric random walk of daily bars on weekdays starting at `start`.
BarSeries random_walk_bars(std::size_t n_bars, std::uint64_t seed, std::string symbol = "SYN",
                           Date start = Date::from_ymd(2015, 1, 2));

// Frame with the 15 technical column names filled with Gaussian noise and
// the four sentiment columns drawn as class probabilities. The label equals
// (composite > 0) with probability `signal_probability`, flipped otherwise.
FeatureFrame sentiment_signal_frame(std::size_t n_days, double signal_probability, std::uint64_t seed);

// n x 6 frame of standard normals; label = 1 iff column `signal` > 0.
FeatureFrame planted_signal_frame(std::size_t n_rows, std::uint64_t seed, std::size_t signal = 3);

}  // namespace sarf
