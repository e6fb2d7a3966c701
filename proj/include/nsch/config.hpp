#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "nsch/control.hpp"

namespace nsch {

/// Malformed configuration text or a value that fails validation. The
/// message names the line or field and, where one applies, the violated
/// assumption.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct InitialSpec {
    std::string preset = "bubble";  // bubble | equilibrium | stripe | snapshot
    double radius = 3.2;
    double width = 4.0;
    double value = 1.0;
    double relax_time = 0.05;
    std::string velocity = "zero";  // zero | vortex | snapshot
    double velocity_amplitude = 1.0;
    std::filesystem::path phi_file;
    std::filesystem::path v_file;
};

/// Control shapes for u0 and the target generator: zero, or a steady
/// four-cell straining force amplitude * curl(sin(2 pi x/lx) sin(2 pi y/ly)).
struct ControlSpec {
    std::string shape = "zero";  // zero | strain | snapshot
    double amplitude = 0.0;
    std::filesystem::path file;
};

struct TargetSpec {
    std::string kind = "generated";  // generated | initial | snapshot
    ControlSpec control{"strain", 40.0, {}};
    std::filesystem::path phi_Q_file;      // snapshot: the same field at every node
    std::filesystem::path phi_Omega_file;
};

struct RunConfig {
    GridSpec grid{64, 64, 12.8, 12.8};
    TimeSpec time;
    PhysParams physics;
    InitialSpec initial;
    ControlSpec control;  // u0 (optimize) or the applied force (simulate)
    ControlSpec verify_control{"strain", 20.0, {}};  // base control of the verify checks
    double verify_amplitude = 150.0;                  // max |h| of the random directions
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double alpha3 = 1e-7;
    TargetSpec target;
    ControlBounds bounds{{-30.0, -30.0}, {30.0, 30.0}, {}, {}};
    OptimOptions optimizer;
    std::filesystem::path out_dir = "out";
    int snapshot_stride = 0;
    int threads = 1;
    std::uint64_t seed = 1;
    bool refine_duality = true;
};

/// Parses `section.key = value` lines ('#' starts a comment). Unknown keys,
/// malformed lines and bad numbers raise ConfigError with the line number;
/// the result is validated against the model assumptions.
RunConfig parse_config(std::istream& is);
RunConfig parse_config(const std::filesystem::path& path);

/// Throws ConfigError naming the field and the violated assumption.
void validate_config(const RunConfig& cfg);

/// Samples a control shape at every time node.
ControlField make_control(const ControlSpec& spec, const GridSpec& grid, const TimeSpec& time);

/// Initial data, targets and bounds assembled from the configuration;
/// generated targets run the forward model with the target control.
Problem build_problem(const RunConfig& cfg);

/// Same configuration with nx, ny doubled and dt halved.
RunConfig refined(const RunConfig& cfg);

/// Worker count: NSCH_THREADS when set, else the configured value.
int effective_threads(const RunConfig& cfg);

}  // namespace nsch
