#pragma once

// Experiment driver behind the command-line tool: configuration parsing,
// SNR sweeps, figure presets and CSV emission.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mimome/channel.hpp"
#include "mimome/errors.hpp"
#include "mimome/solver.hpp"

namespace mimome {

// Bad command line or config file; the message names the offending key.
class UsageError : public InputError {
public:
    using InputError::InputError;
};

enum class Mode { capacity_total, capacity_per_antenna, optimize, sweep_alpha, verify, figure };

std::string to_string(Mode m);
/// Inverse of to_string; throws UsageError.
Mode parse_mode(const std::string& s);

struct SnrSweep {
    double start = 0.0;
    double step = 5.0;
    double stop = 40.0;

    /// start <= stop, step > 0, all finite; throws UsageError.
    void validate() const;
    /// start, start + step, ... up to stop (inclusive, with 1e-9 slack).
    std::vector<double> points() const;
    /// Parses "start:step:stop" or a single value.
    static SnrSweep parse(const std::string& s);
};

struct ExperimentConfig {
    ChannelSpec spec{};  // n_t, n_r, n_e and variances; sigma_h2 = ratio * sigma_g2
    bool spec_given = false;  // antenna counts came from the user
    bool ratio_given = false;
    SnrSweep snr{};
    bool snr_given = false;
    std::vector<double> power;  // per-antenna limits (linear); empty = derive from SNR
    std::vector<std::vector<double>> power_splits;  // relative weights per antenna; empty = equal
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    Mode mode = Mode::capacity_total;
    std::optional<int> figure_id;
    std::size_t alpha_points = 21;
    std::size_t trials = 50;
    std::filesystem::path output;  // empty = default name in default_output_dir(); "-" = stdout
    std::filesystem::path trace_output;
    SolverConfig solver{};
    bool bits = false;  // CSV rate columns in bits (mean_bits, std_err_bits)

    void validate() const;
};

/// MIMOME_OUTPUT_DIR if set and nonempty, else the working directory.
std::filesystem::path default_output_dir();

struct ParseOutcome {
    std::optional<ExperimentConfig> config;  // empty when help/version was printed
    int exit_code = 0;
};

/// Parses argv (and an optional --config key=value file). Flag values win
/// over file values. Throws UsageError on malformed or missing values.
ParseOutcome parse_config(int argc, const char* const* argv, std::ostream& out);

/// Runs one experiment and writes its CSV. Returns the process exit code;
/// diagnostics go to `log`.
int run(const ExperimentConfig& config, std::ostream& log);

/// 10 log10(sigma_g2) + snr_db.
double eavesdropper_snr_db(double snr_db, double sigma_g2);

/// Header shared by the capacity-style CSVs (nats).
inline constexpr const char* kCapacityHeader =
    "snr_db,p_g_db,mean_nats,std_err_nats,n_samples,mode,nt,nr,ne,ratio,seed";

}  // namespace mimome
