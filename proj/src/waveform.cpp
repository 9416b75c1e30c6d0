#include "wpt/waveform.hpp"

#include "wpt/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace wpt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Integer ratio a / b when it exists to within rounding, else 0.
std::int64_t integer_ratio(double a, double b)
{
    const double r = a / b;
    const double n = std::round(r);
    if (n < 1.0 || std::abs(r - n) > 1e-9 * n) {
        return 0;
    }
    return static_cast<std::int64_t>(n);
}

} // namespace

SampledWaveform::SampledWaveform(std::vector<Complex> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_(sample_rate_hz)
{
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
        throw InvalidArgument("waveform sample rate must be positive");
    }
    if (samples_.empty()) {
        throw InvalidArgument("waveform must contain at least one sample");
    }
}

SampledWaveform SampledWaveform::scaled(double factor) const
{
    std::vector<Complex> out(samples_.size());
    std::transform(samples_.begin(), samples_.end(), out.begin(),
                   [factor](const Complex& x) { return x * factor; });
    return {std::move(out), sample_rate_};
}

RealWaveform::RealWaveform(std::vector<double> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_(sample_rate_hz)
{
    if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
        throw InvalidArgument("waveform sample rate must be positive");
    }
    if (samples_.empty()) {
        throw InvalidArgument("waveform must contain at least one sample");
    }
}

MultisineSpec MultisineSpec::co_phased(int n_tones, double amplitude, double phase_rad,
                                       double fundamental_hz)
{
    if (n_tones < 1) {
        throw InvalidArgument("multisine needs at least one tone");
    }
    MultisineSpec spec;
    spec.amplitudes.assign(static_cast<std::size_t>(n_tones), amplitude);
    spec.phases_rad.assign(static_cast<std::size_t>(n_tones), phase_rad);
    spec.fundamental_hz = fundamental_hz;
    spec.validate();
    return spec;
}

bool MultisineSpec::is_co_phased() const noexcept
{
    if (amplitudes.empty()) {
        return false;
    }
    return std::all_of(amplitudes.begin(), amplitudes.end(),
                       [&](double a) { return a == amplitudes.front(); }) &&
           std::all_of(phases_rad.begin(), phases_rad.end(),
                       [&](double p) { return p == phases_rad.front(); });
}

void MultisineSpec::validate() const
{
    if (amplitudes.empty()) {
        throw InvalidArgument("multisine needs at least one tone");
    }
    if (phases_rad.size() != amplitudes.size()) {
        throw InvalidArgument(fmt::format("multisine has {} amplitudes but {} phases",
                                          amplitudes.size(), phases_rad.size()));
    }
    for (std::size_t n = 0; n < amplitudes.size(); ++n) {
        if (!(amplitudes[n] > 0.0) || !std::isfinite(amplitudes[n])) {
            throw InvalidArgument(fmt::format("tone {} amplitude must be positive", n + 1));
        }
        if (!std::isfinite(phases_rad[n])) {
            throw InvalidArgument(fmt::format("tone {} phase is not finite", n + 1));
        }
    }
    if (!(fundamental_hz > 0.0) || !std::isfinite(fundamental_hz)) {
        throw InvalidArgument("multisine fundamental must be positive");
    }
}

Complex MultisineSpec::evaluate(double t) const
{
    Complex acc{0.0, 0.0};
    for (std::size_t n = 0; n < amplitudes.size(); ++n) {
        // Reduce the phase to one cycle first so large t keeps full precision.
        const double cycles = static_cast<double>(n + 1) * fundamental_hz * t;
        const double phase = kTwoPi * (cycles - std::floor(cycles)) + phases_rad[n];
        acc += std::polar(amplitudes[n], phase);
    }
    return acc;
}

SampledWaveform generate_multisine(const MultisineSpec& spec, double sample_rate_hz, int n_periods)
{
    spec.validate();
    if (n_periods < 1) {
        throw InvalidArgument("multisine needs at least one period");
    }
    if (!(sample_rate_hz > 0.0)) {
        throw InvalidArgument("sample rate must be positive");
    }
    const double highest = spec.highest_frequency();
    if (sample_rate_hz < 2.0 * highest) {
        throw InvalidArgument(fmt::format(
            "sample rate {:g} Hz violates Nyquist for tone {} at {:g} Hz (needs >= {:g} Hz)",
            sample_rate_hz, spec.n_tones(), highest, 2.0 * highest));
    }
    const std::int64_t total = integer_ratio(n_periods * sample_rate_hz, spec.fundamental_hz);
    if (total == 0) {
        throw InvalidArgument(fmt::format(
            "{} period(s) of {:g} Hz do not span an integer number of samples at {:g} Hz",
            n_periods, spec.fundamental_hz, sample_rate_hz));
    }

    const std::int64_t per_period = integer_ratio(sample_rate_hz, spec.fundamental_hz);
    std::vector<Complex> samples(static_cast<std::size_t>(total));
    for (std::int64_t k = 0; k < total; ++k) {
        Complex acc{0.0, 0.0};
        for (int n = 1; n <= spec.n_tones(); ++n) {
            double cycle_fraction;
            if (per_period > 0) {
                // Exact phase bookkeeping keeps x[k] and x[k + per_period] bit-identical.
                cycle_fraction = static_cast<double>((n * k) % per_period) /
                                 static_cast<double>(per_period);
            } else {
                const double cycles = n * spec.fundamental_hz * static_cast<double>(k) / sample_rate_hz;
                cycle_fraction = cycles - std::floor(cycles);
            }
            const auto idx = static_cast<std::size_t>(n - 1);
            acc += std::polar(spec.amplitudes[idx], kTwoPi * cycle_fraction + spec.phases_rad[idx]);
        }
        samples[static_cast<std::size_t>(k)] = acc;
    }
    return {std::move(samples), sample_rate_hz};
}

std::string_view to_string(Modulation m)
{
    switch (m) {
    case Modulation::Qpsk: return "QPSK";
    case Modulation::Psk8: return "8-PSK";
    case Modulation::Qam8: return "8-QAM";
    case Modulation::Qam16: return "16-QAM";
    }
    return "?";
}

Modulation parse_modulation(std::string_view name)
{
    std::string key;
    for (char c : name) {
        if (c != '-' && c != '_' && c != ' ') {
            key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
    }
    if (key == "QPSK" || key == "4PSK") return Modulation::Qpsk;
    if (key == "8PSK") return Modulation::Psk8;
    if (key == "8QAM") return Modulation::Qam8;
    if (key == "16QAM") return Modulation::Qam16;
    throw InvalidArgument(fmt::format("unknown modulation '{}'", name));
}

ConstellationSpec ConstellationSpec::make(Modulation m, double bit_rate)
{
    if (!(bit_rate > 0.0)) {
        throw InvalidArgument("bit rate must be positive");
    }
    const double h = 1.0 / std::numbers::sqrt2;
    ConstellationSpec spec;
    spec.modulation = m;
    spec.bit_rate = bit_rate;
    switch (m) {
    case Modulation::Qpsk:
        spec.bits_per_symbol = 2;
        spec.points = {{h, h}, {-h, h}, {-h, -h}, {h, -h}};
        break;
    case Modulation::Psk8:
        spec.bits_per_symbol = 3;
        for (int k = 0; k < 8; ++k) {
            spec.points.push_back(std::polar(1.0, kTwoPi * k / 8.0));
        }
        // Snap the axis points so |Re|, |Im| <= 1 holds exactly.
        for (auto& p : spec.points) {
            p = {std::clamp(p.real(), -1.0, 1.0), std::clamp(p.imag(), -1.0, 1.0)};
        }
        break;
    case Modulation::Qam8:
        spec.bits_per_symbol = 3;
        spec.points = {{h, 0.0}, {0.0, h}, {-h, 0.0}, {0.0, -h},
                       {h, h},   {-h, h},  {-h, -h},  {h, -h}};
        break;
    case Modulation::Qam16: {
        spec.bits_per_symbol = 4;
        const double d = h / 3.0;
        for (int i : {-3, -1, 1, 3}) {
            for (int q : {-3, -1, 1, 3}) {
                spec.points.emplace_back(i * d, q * d);
            }
        }
        break;
    }
    }
    return spec;
}

double ConstellationSpec::average_power() const
{
    const double sum = std::accumulate(points.begin(), points.end(), 0.0,
                                       [](double s, const Complex& p) { return s + std::norm(p); });
    return sum / static_cast<double>(points.size());
}

std::size_t samples_per_symbol(const ConstellationSpec& spec, double sample_rate_hz)
{
    if (!(sample_rate_hz > 0.0) || !(spec.bit_rate > 0.0)) {
        throw InvalidArgument("sample rate and bit rate must be positive");
    }
    const std::int64_t sps = integer_ratio(sample_rate_hz * spec.bits_per_symbol, spec.bit_rate);
    if (sps == 0) {
        throw InvalidArgument(fmt::format(
            "{} at {:g} bit/s needs {:g} samples per symbol at {:g} Hz; must be a positive integer",
            spec.name(), spec.bit_rate, sample_rate_hz * spec.bits_per_symbol / spec.bit_rate,
            sample_rate_hz));
    }
    return static_cast<std::size_t>(sps);
}

SampledWaveform generate_symbol_stream(const ConstellationSpec& spec, std::size_t n_symbols,
                                       double sample_rate_hz, std::uint64_t seed)
{
    if (n_symbols == 0) {
        throw InvalidArgument("symbol stream needs at least one symbol");
    }
    const std::size_t order = spec.points.size();
    if (order == 0 || (order & (order - 1)) != 0) {
        throw InvalidArgument("constellation size must be a power of two");
    }
    const std::size_t sps = samples_per_symbol(spec, sample_rate_hz);

    // mt19937_64 output is fully specified, and modulo a power of two is unbiased,
    // so streams are reproducible across standard libraries.
    std::mt19937_64 rng(seed);
    std::vector<Complex> samples;
    samples.reserve(n_symbols * sps);
    for (std::size_t s = 0; s < n_symbols; ++s) {
        const Complex symbol = spec.points[static_cast<std::size_t>(rng() % order)];
        samples.insert(samples.end(), sps, symbol);
    }
    return {std::move(samples), sample_rate_hz};
}

} // namespace wpt
