#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "matrixtx/scenario.hpp"

namespace matrixtx {

struct RunOptions {
    std::string output_override;
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

/// Release-curve experiment: normalized release per selected model over the
/// configured grid; PBS columns come with standard-error companions.
void run_release(const ScenarioConfig& cfg, const RunOptions& opts);

/// Channel-response experiment: absorbed molecules per transmitter model.
void run_channel(const ScenarioConfig& cfg, const RunOptions& opts);

/// Absorption-rate experiment; requires a uniform (linear) time grid.
void run_rate(const ScenarioConfig& cfg, const RunOptions& opts);

}  // namespace matrixtx
