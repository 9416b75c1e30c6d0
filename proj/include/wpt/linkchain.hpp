#pragma once

#include "wpt/impairments.hpp"
#include "wpt/waveform.hpp"

#include <cstdint>
#include <filesystem>
#include <utility>
#include <variant>
#include <vector>

namespace wpt {

/// Reflector offsets seen at 1 m: constructive placement gains 3-4 dB, the
/// destructive one loses 2-3 dB.
inline constexpr double kReflectorConstructiveDb = 3.5;
inline constexpr double kReflectorDestructiveDb = -2.5;

/// Frequency-flat attenuation: base loss at the reference distance, a log-distance
/// term, and a reflector gain (positive helps).
struct ChannelModel {
    double distance_m = 1.0;
    double reference_distance_m = 1.0;
    double base_attenuation_db = 24.0;
    double path_loss_exponent = 2.0;
    double reflector_offset_db = 0.0;

    void validate() const;
    double attenuation_db() const;
};

/// One point of the RF-to-DC efficiency curve.
struct EfficiencyPoint {
    double input_dbm;
    double efficiency;
};

/// Threshold-gated rectifier. Efficiency is interpolated linearly in (dBm, fraction)
/// between table anchors and held at the ends.
struct HarvesterModel {
    double detection_threshold_dbm = -15.0;
    std::vector<EfficiencyPoint> efficiency_curve;
    double load_resistance_ohm = 286.0;
    /// Multiplier for waveform-shape-dependent rectification gains; 1 means the
    /// harvester responds to average power only.
    double shape_factor = 1.0;

    /// -15 dBm -> 0, -5 dBm -> 10 %, 6 dBm -> 20 %. The middle anchor is a calibration
    /// stand-in, not a measurement.
    static HarvesterModel default_model();

    void validate() const;
    /// Conversion efficiency at `input_dbm`, ignoring the detection threshold.
    double efficiency(double input_dbm) const;
};

/// Reads a two-column (dBm, fraction) table. Blank lines and '#' comments are
/// skipped; columns may be separated by whitespace or a comma.
std::vector<EfficiencyPoint> load_efficiency_table(const std::filesystem::path& path);

/// Stage powers in watts.
struct PowerTrace {
    double p_in_dc = 0.0;
    double p_out_rf = 0.0;
    double p_in_rf = 0.0;
    double p_out_dc = 0.0;

    /// All non-negative; p_out_rf <= p_in_dc, p_in_rf <= p_out_rf, p_out_dc <= p_in_rf.
    void validate() const;
};

struct EfficiencyReport {
    double eta_dc_rf = 0.0;
    double eta_rf_rf = 0.0;
    double eta_rf_dc = 0.0;
    /// Always eta_dc_rf * eta_rf_rf * eta_rf_dc.
    double eta_dc_dc = 0.0;
};

double propagate(double p_out_rf_w, const ChannelModel& ch);
double harvest(double p_in_rf_w, const HarvesterModel& h);
EfficiencyReport assemble_report(const PowerTrace& trace);

struct MultisineSource {
    MultisineSpec spec;
    double sample_rate_hz = 40e6;
    int n_periods = 1;
};

struct SymbolSource {
    ConstellationSpec spec;
    std::size_t n_symbols = 10000;
    double sample_rate_hz = 40e6;
    std::uint64_t seed = 1;
};

using WaveformSource = std::variant<MultisineSource, SymbolSource>;

SampledWaveform generate(const WaveformSource& source);

struct ChainResult {
    PowerTrace trace;
    EfficiencyReport report;
};

/// generate -> clip -> quantize -> internal PA -> external PA -> propagate -> harvest.
ChainResult run_chain(const WaveformSource& source, const TransmitterModel& tx,
                      const ChannelModel& ch, const HarvesterModel& h);

/// Same chain from an already generated baseband waveform.
ChainResult run_chain(const SampledWaveform& baseband, const TransmitterModel& tx,
                      const ChannelModel& ch, const HarvesterModel& h);

} // namespace wpt
