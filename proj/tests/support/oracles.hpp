#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the reward, policy or loss code under test.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "wapsel/datagen.hpp"
#include "wapsel/domain.hpp"
#include "wapsel/head.hpp"
#include "wapsel/measurement.hpp"

namespace oracle {

// Tolerances in ms by app code, typed in from the published table.
inline constexpr std::array<double, 8> kToleranceMs{200, 50, 100, 1000, 2000, 5000, 10000, 500};

// App usage by time of day, typed in from the published usage charts;
// columns in AppType order.
inline constexpr std::array<std::array<double, 8>, 4> kInDistProfile{{
    {0.25, 0.20, 0.25, 0.00, 0.10, 0.00, 0.00, 0.20},
    {0.20, 0.20, 0.25, 0.20, 0.15, 0.00, 0.00, 0.00},
    {0.10, 0.20, 0.20, 0.00, 0.20, 0.30, 0.00, 0.00},
    {0.10, 0.00, 0.00, 0.30, 0.10, 0.00, 0.40, 0.10},
}};
inline constexpr std::array<std::array<double, 8>, 4> kOodProfile{{
    {0.25, 0.20, 0.30, 0.00, 0.15, 0.10, 0.00, 0.00},
    {0.25, 0.20, 0.25, 0.00, 0.20, 0.10, 0.00, 0.00},
    {0.05, 0.15, 0.25, 0.00, 0.20, 0.35, 0.00, 0.00},
    {0.20, 0.15, 0.25, 0.00, 0.10, 0.30, 0.00, 0.00},
}};

// Objective per action by direct loops over the history and the devices.
std::array<double, 8> objective(const wapsel::Context& ctx, const wapsel::MeasurementVector& mv,
                                double w_l, double w_p, bool naive);

// First index of the maximum / minimum by linear scan.
std::size_t first_max(const std::array<double, 8>& v);
std::size_t first_min(const std::array<double, 8>& v);

// -log(exp(z_y) / sum exp(z)) in long double.
double softmax_nll(const std::array<double, 8>& logits, std::size_t y);

// Mode of preferred tuples over the history, lowest index on ties.
std::size_t rule_action(const std::vector<wapsel::AppType>& history);

wapsel::Context random_context(std::mt19937_64& rng, std::size_t window = 10, bool with_peer = true);
wapsel::MeasurementVector random_measurements(std::mt19937_64& rng);

// Small grid: 16 scenarios x logs_per_session samples.
wapsel::DatasetConfig small_dataset_config(std::size_t logs_per_session, std::uint64_t seed);
wapsel::Dataset small_dataset(std::size_t logs_per_session, std::uint64_t seed,
                              wapsel::Stream stream = wapsel::Stream::inDistribution);

// Random model with parameters uniform in [-scale, scale].
wapsel::HeadModel random_model(std::size_t layers, std::size_t hidden, std::mt19937_64& rng,
                               double scale = 0.5);

std::vector<double> random_features(std::mt19937_64& rng);

}  // namespace oracle
