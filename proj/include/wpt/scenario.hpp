#pragma once

#include "wpt/impairments.hpp"
#include "wpt/linkchain.hpp"
#include "wpt/waveform.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wpt {

/// Tone amplitude as a number or relative to the tone count ("1/N", "1/sqrtN").
struct AmplitudeRule {
    enum class Kind { Value, InverseN, InverseSqrtN };
    Kind kind = Kind::Value;
    double value = 1.0;

    static AmplitudeRule parse(std::string_view text);
    double resolve(int n_tones) const;
    std::string to_string() const;
};

enum class WaveformKind { Multisine, Constellation };

struct WaveformSection {
    WaveformKind kind = WaveformKind::Constellation;
    int n_tones = 1;
    AmplitudeRule amplitude;
    double phase_rad = 0.7853981633974483;
    double fundamental_hz = 200e3;
    int n_periods = 1;
    Modulation modulation = Modulation::Qpsk;
    double bit_rate = 1e6;
    std::size_t n_symbols = 4000;
    double sample_rate_hz = 40e6;
};

struct SweepSection {
    std::string variable;
    std::vector<std::string> values;
};

/// Grid and signal settings for the multisine DAC study.
struct Fig2Section {
    std::vector<int> n_tones{1, 2, 4, 8, 16};
    double amplitude_min = 1e-2;
    double amplitude_max = 1e2;
    int amplitude_points = 60;
    double phase_rad = 0.7853981633974483;
    double fundamental_hz = 200e3;
    double sample_rate_hz = 40e6;
    int dac_bits = 12;
};

/// Everything one experiment run needs. Sections mirror the config file.
struct Scenario {
    WaveformSection waveform;
    TransmitterModel transmitter = TransmitterModel::default_model();
    ChannelModel channel;
    HarvesterModel harvester = HarvesterModel::default_model();
    SweepSection sweep;
    Fig2Section fig2;
    double cfo_hz = 1000.0;
    std::string output_csv;
    std::uint64_t seed = 1;

    /// Sweep variables accepted in [sweep] variable.
    static const std::vector<std::string>& sweep_variables();

    WaveformSource source() const;
    /// Copy with the sweep variable set to `value`.
    Scenario at(std::string_view value) const;
    /// Throws ConfigError naming the first offending section.
    void validate() const;
};

/// Parses the sectioned key=value format. `base_dir` resolves relative file
/// references (harvester curve_file).
Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// "a:b:step" (inclusive) or a comma-separated list.
std::vector<std::string> expand_values(std::string_view text);

} // namespace wpt
