#pragma once

#include "wpt/waveform.hpp"

#include <optional>

namespace wpt {

/// DAC with a symmetric +/- full_scale output range and a mid-tread quantizer.
///
/// The quantizer step is 2 * full_scale / (2^bits - 1) and the output levels are
/// k * step for |k| <= 2^(bits-1) - 1, so zero is a level and every in-range input
/// lands within half a step of its output.
struct DacModel {
    double full_scale = 1.0;
    int bits = 12;

    void validate() const;
    double lsb() const;
    int max_code() const;
};

/// Memoryless Rapp-style AM/AM amplifier stage:
///   out = g v / (1 + (g^2 v^2 / P_sat)^p)^(1/2p)
/// with g the linear voltage gain and v the input envelope. Phase passes through.
/// Powers are in the units of |x|^2 of the waveform fed to the stage.
struct PaStage {
    double small_signal_gain_db = 0.0;
    double saturation_power = 1.0;
    double smoothness = 2.0;

    void validate() const;
    double linear_gain() const;
    /// Output envelope for input envelope `v` >= 0.
    double transfer(double v) const;
};

/// USRP-style transmitter: DAC, internal PA with tunable gain G, fixed-gain external PA.
///
/// Waveforms leave the DAC in full-scale units; `fullscale_dbm` is the power a
/// |x|^2 = 1 sample carries at the internal PA input. Downstream of that, waveform
/// power is in mW.
struct TransmitterModel {
    static constexpr double kMinGainDb = 40.0;
    static constexpr double kMaxGainDb = 57.0;

    DacModel dac;
    double gain_db = 51.0;
    double internal_psat_dbm = 20.0;
    double internal_smoothness = 2.0;
    PaStage external_pa{43.5, 0.0, 2.0};
    double fullscale_dbm = 0.0;
    double dc_at_min_gain_w = 12.4;
    double dc_at_max_gain_w = 11.4;
    double external_dc_w = 0.0;

    /// Calibrated defaults: external-PA knee at G = 51 dB for unit-power drive,
    /// best-G DC-to-RF efficiency just under 13.5 %.
    static TransmitterModel default_model();

    void validate() const;
    TransmitterModel with_gain(double g_db) const;

    /// Internal PA at the current gain setting.
    PaStage internal_pa() const;
    /// Affine DC draw: dc_at_min_gain_w at 40 dB to dc_at_max_gain_w at 57 dB, plus external_dc_w.
    double dc_input_w() const;
    /// Gain setting at which a unit-power drive puts the external PA at its knee
    /// (g^2 v^2 = P_sat).
    double knee_gain_db() const;
};

/// Hard clip of each branch to +/- full_scale.
SampledWaveform clip(const SampledWaveform& w, const DacModel& dac);

/// Per-branch uniform quantization. Rejects samples outside +/- full_scale.
SampledWaveform quantize(const SampledWaveform& w, const DacModel& dac);

/// sqrt(2) * Re{x(t) exp(j 2 pi f_c t)} sampled at `passband_rate_hz`, which must be an
/// integer multiple of the baseband rate (baseband samples are held). The carrier must
/// fit an integer number of cycles in the waveform duration. `baseband_bandwidth_hz`
/// defaults to half the baseband rate and feeds the Nyquist check.
RealWaveform upconvert(const SampledWaveform& w, double carrier_hz, double passband_rate_hz,
                       std::optional<double> baseband_bandwidth_hz = std::nullopt);

SampledWaveform amplify(const SampledWaveform& w, const PaStage& stage);

/// DAC clip + quantize, scale to mW at the internal PA input, then both PA stages.
/// The result is the transmitted envelope in sqrt(mW) units.
SampledWaveform transmit(const SampledWaveform& w, const TransmitterModel& tx);

} // namespace wpt
