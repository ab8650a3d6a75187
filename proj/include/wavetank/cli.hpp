#pragma once

// Batch runs driven by a YAML config: parsing, orchestration and result files.

#include "wavetank/observability.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavetank {

enum class Kind { Simulate, Pohozaev, MainIdentity, ObservabilityScan, Dispersion };

Kind parse_kind(const std::string& name);
std::string kind_name(Kind kind);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double energy = 1e-6;      // relative drift of H over a simulate run
    double identity = 1e-4;    // main identity, relative to its reference scale
    double pohozaev = 1e-5;
    double dispersion = 1e-3;  // relative frequency error
};

struct RunConfig {
    Kind kind = Kind::Simulate;
    TankConfig tank;
    InitialDataSpec initial;
    bool random_initial = false;
    std::uint64_t seed = 1;
    std::string output = "out";
    int jobs = 1;
    int steps = 0;
    std::optional<double> T;  // alternative to steps; must be a whole number of dt
    std::vector<int> scan_N{1, 2, 4, 8};
    double K0 = 2.0;
    int dispersion_n = 1;
    int dispersion_m = 0;
    double dispersion_amplitude = 1e-4;  // relative to h
    double dispersion_periods = 4.0;
    Tolerances tol;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    int resolved_steps() const;
};

/// Parses and validates a config file; throws ConfigError.
RunConfig load_config(const std::string& path);

/// Runs the configured experiment, writes results.txt, series.dat and
/// summary.txt under `output`, and returns the exit code:
/// 0 all checks pass, 1 a check failed, 3 numerical failure.
int run(const RunConfig& config, std::ostream& log);

struct DispersionReport {
    double k = 0.0;
    double omega_linear = 0.0;
    double omega_measured = 0.0;
    double relative_error = 0.0;
    std::vector<double> t;
    std::vector<double> amplitude;  // projection of eta on the mode
};

/// Angular frequency from the zero crossings of a sampled oscillation.
double measure_frequency(const std::vector<double>& t, const std::vector<double>& s);

/// Linear standing wave in mode (n, m) with eta amplitude a h and psi = 0,
/// integrated for the given number of linear periods.
DispersionReport measure_dispersion(const TankConfig& cfg, int n, int m, double amplitude, double periods);

}  // namespace wavetank
