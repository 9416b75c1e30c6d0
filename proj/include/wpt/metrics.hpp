#pragma once

#include "wpt/waveform.hpp"

namespace wpt {

/// Power figures of one waveform. For complex baseband input, peak and PAPR are the
/// passband-equivalent values (peak of sqrt(2) Re{x e^{j w_c t}} squared, i.e.
/// 2 max|x|^2), which is what the carrier-modulated signal would show.
struct WaveformMetrics {
    double average_power = 0.0;
    double peak_power = 0.0;
    double papr = 0.0;
    double peak_time = 0.0;
};

/// Mean of |x[k]|^2. Summed in extended precision with compensation.
double average_power(const SampledWaveform& w);
/// Mean of x[k]^2.
double average_power(const RealWaveform& w);

/// max x[k]^2 / mean x[k]^2.
double papr(const RealWaveform& w);
/// Passband-equivalent PAPR of a complex baseband waveform: 2 max|x|^2 / mean|x|^2.
/// Unclipped co-phased multisines give 2 N; a branch-clipped one with both branches
/// at full scale gives 4 / mean|x|^2.
double papr(const SampledWaveform& w);

WaveformMetrics measure(const SampledWaveform& w);
WaveformMetrics measure(const RealWaveform& w);

/// sqrt(mean|ref - dist|^2 / mean|ref|^2).
double evm(const SampledWaveform& reference, const SampledWaveform& distorted);

/// Divides `w` by the least-squares complex gain that maps `reference` onto it.
SampledWaveform normalize_gain(const SampledWaveform& w, const SampledWaveform& reference);

/// Multiplies by exp(j 2 pi offset t), t = k / sample_rate.
SampledWaveform inject_cfo(const SampledWaveform& w, double offset_hz);

/// Data-aided estimate of the rotation rate of `w` relative to `pilot`, in Hz.
double estimate_cfo(const SampledWaveform& w, const SampledWaveform& pilot);

/// Removes the rotation rate estimated against `pilot`.
SampledWaveform compensate_cfo(const SampledWaveform& w, const SampledWaveform& pilot);

} // namespace wpt
