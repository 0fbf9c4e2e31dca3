#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace matrixtx {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TimeGridSpec {
    double min = 0.0;   // s
    double max = 0.0;   // s
    int points = 0;
    bool log_spacing = false;
};

struct PbsBlock {
    double time_step = 1e-6;  // s
    int realizations = 100;
    int record_stride = 1;
    std::uint64_t seed = 1;
};

/// Parsed experiment description. Lengths and times accept explicit unit
/// suffixes in the config file ("1 um", "1e-3 s"); everything is stored in SI.
struct ScenarioConfig {
    std::vector<double> loading_ratios;  // A/Cs, one column set per entry
    double radius = 1e-6;                // a, m
    double diffusivity = 1e-9;           // D, m^2/s
    double molecules = 1e4;              // M_inf; 0 selects the degenerate all-zero output
    double rx_radius = 0.0;              // m
    double distance = 0.0;               // m
    bool has_geometry = false;
    std::vector<std::string> models;
    TimeGridSpec grid;
    PbsBlock pbs;
    std::string output;

    static ScenarioConfig load(const std::string& path);
    static ScenarioConfig from_json_text(const std::string& text,
                                         const std::string& origin);
    void validate_base() const;
};

/// "1 um" / "2.5e-7 m" / plain number (SI) -> meters.
double parse_length(const std::string& text);
/// "1e-6 s" / "5 ms" / plain number (SI) -> seconds.
double parse_time(const std::string& text);
/// "1e-9 m^2/s" / "1000 um^2/s" / plain number (SI) -> m^2/s.
double parse_diffusivity(const std::string& text);

}  // namespace matrixtx
