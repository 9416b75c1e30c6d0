#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wpt {

using Complex = std::complex<double>;

/// Complex baseband samples in DAC full-scale units, taken at t = k / sample_rate.
/// Immutable once built; every processing stage returns a new waveform.
class SampledWaveform {
public:
    SampledWaveform(std::vector<Complex> samples, double sample_rate_hz);

    std::span<const Complex> samples() const noexcept { return samples_; }
    double sample_rate() const noexcept { return sample_rate_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double duration() const noexcept { return static_cast<double>(samples_.size()) / sample_rate_; }
    double time_at(std::size_t k) const noexcept { return static_cast<double>(k) / sample_rate_; }

    const Complex& operator[](std::size_t k) const noexcept { return samples_[k]; }

    /// Returns a copy with every sample multiplied by `factor`.
    SampledWaveform scaled(double factor) const;

private:
    std::vector<Complex> samples_;
    double sample_rate_;
};

/// Real-valued passband samples.
class RealWaveform {
public:
    RealWaveform(std::vector<double> samples, double sample_rate_hz);

    std::span<const double> samples() const noexcept { return samples_; }
    double sample_rate() const noexcept { return sample_rate_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double duration() const noexcept { return static_cast<double>(samples_.size()) / sample_rate_; }

    double operator[](std::size_t k) const noexcept { return samples_[k]; }

private:
    std::vector<double> samples_;
    double sample_rate_;
};

/// N harmonic tones, tone n (1-based) at n * fundamental with its own amplitude and phase.
struct MultisineSpec {
    std::vector<double> amplitudes;
    std::vector<double> phases_rad;
    double fundamental_hz = 200e3;

    /// Equal amplitude and phase for every tone.
    static MultisineSpec co_phased(int n_tones, double amplitude, double phase_rad,
                                   double fundamental_hz = 200e3);

    int n_tones() const noexcept { return static_cast<int>(amplitudes.size()); }
    double tone_frequency(int n) const noexcept { return n * fundamental_hz; }
    double highest_frequency() const noexcept { return n_tones() * fundamental_hz; }
    double period() const noexcept { return 1.0 / fundamental_hz; }
    bool is_co_phased() const noexcept;

    /// Throws InvalidArgument unless n_tones >= 1, amplitudes > 0, fundamental > 0.
    void validate() const;

    /// Continuous-time value x(t).
    Complex evaluate(double t) const;
};

enum class Modulation { Qpsk, Psk8, Qam8, Qam16 };

std::string_view to_string(Modulation m);
/// Accepts "QPSK", "8-PSK", "8PSK", "8-QAM", "16-QAM" and friends, case-insensitive.
Modulation parse_modulation(std::string_view name);

struct ConstellationSpec {
    Modulation modulation = Modulation::Qpsk;
    std::vector<Complex> points;
    double bit_rate = 1e6;
    int bits_per_symbol = 2;

    static ConstellationSpec make(Modulation m, double bit_rate);

    std::string_view name() const { return to_string(modulation); }
    /// Mean of |p|^2 over the (equiprobable) points.
    double average_power() const;
};

/// Tone sum sampled at k / sample_rate over `n_periods` fundamental periods.
/// Rejects sample rates below 2 * (highest tone).
SampledWaveform generate_multisine(const MultisineSpec& spec, double sample_rate_hz, int n_periods);

/// Uniform i.i.d. symbols from the constellation, each held for
/// sample_rate * bits_per_symbol / bit_rate samples (must be an integer).
SampledWaveform generate_symbol_stream(const ConstellationSpec& spec, std::size_t n_symbols,
                                       double sample_rate_hz, std::uint64_t seed);

/// Samples per symbol for the given rate; throws if it is not a positive integer.
std::size_t samples_per_symbol(const ConstellationSpec& spec, double sample_rate_hz);

} // namespace wpt
