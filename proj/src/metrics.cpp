#include "wpt/metrics.hpp"

#include "wpt/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wpt {

namespace {

// Neumaier summation in long double.
class AccurateSum {
public:
    void add(long double v)
    {
        const long double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    long double value() const { return sum_ + comp_; }

private:
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

void require_same_grid(const SampledWaveform& a, const SampledWaveform& b, const char* what)
{
    if (a.size() != b.size()) {
        throw InvalidArgument(fmt::format("{}: lengths differ ({} vs {})", what, a.size(), b.size()));
    }
    if (a.sample_rate() != b.sample_rate()) {
        throw InvalidArgument(fmt::format("{}: sample rates differ ({:g} vs {:g} Hz)", what,
                                          a.sample_rate(), b.sample_rate()));
    }
}

double wrap_to_pi(double a)
{
    return std::remainder(a, 2.0 * std::numbers::pi);
}

} // namespace

double average_power(const SampledWaveform& w)
{
    AccurateSum s;
    for (const Complex& x : w.samples()) {
        s.add(static_cast<long double>(std::norm(x)));
    }
    return static_cast<double>(s.value() / static_cast<long double>(w.size()));
}

double average_power(const RealWaveform& w)
{
    AccurateSum s;
    for (double x : w.samples()) {
        s.add(static_cast<long double>(x) * x);
    }
    return static_cast<double>(s.value() / static_cast<long double>(w.size()));
}

WaveformMetrics measure(const SampledWaveform& w)
{
    WaveformMetrics m;
    m.average_power = average_power(w);
    std::size_t k_peak = 0;
    double peak = -1.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double p = std::norm(w[k]);
        if (p > peak) {
            peak = p;
            k_peak = k;
        }
    }
    m.peak_power = 2.0 * peak;
    m.peak_time = w.time_at(k_peak);
    m.papr = m.average_power > 0.0 ? m.peak_power / m.average_power : 0.0;
    return m;
}

WaveformMetrics measure(const RealWaveform& w)
{
    WaveformMetrics m;
    m.average_power = average_power(w);
    std::size_t k_peak = 0;
    double peak = -1.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double p = w[k] * w[k];
        if (p > peak) {
            peak = p;
            k_peak = k;
        }
    }
    m.peak_power = peak;
    m.peak_time = static_cast<double>(k_peak) / w.sample_rate();
    m.papr = m.average_power > 0.0 ? m.peak_power / m.average_power : 0.0;
    return m;
}

double papr(const RealWaveform& w)
{
    const WaveformMetrics m = measure(w);
    if (!(m.average_power > 0.0)) {
        throw InvalidArgument("PAPR of a zero-power waveform is undefined");
    }
    return m.papr;
}

double papr(const SampledWaveform& w)
{
    const WaveformMetrics m = measure(w);
    if (!(m.average_power > 0.0)) {
        throw InvalidArgument("PAPR of a zero-power waveform is undefined");
    }
    return m.papr;
}

double evm(const SampledWaveform& reference, const SampledWaveform& distorted)
{
    require_same_grid(reference, distorted, "evm");
    AccurateSum err;
    AccurateSum ref;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        err.add(std::norm(reference[k] - distorted[k]));
        ref.add(std::norm(reference[k]));
    }
    if (!(ref.value() > 0.0L)) {
        throw InvalidArgument("evm: reference has zero power");
    }
    return static_cast<double>(std::sqrt(err.value() / ref.value()));
}

SampledWaveform normalize_gain(const SampledWaveform& w, const SampledWaveform& reference)
{
    require_same_grid(reference, w, "normalize_gain");
    Complex cross{0.0, 0.0};
    double ref_power = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        cross += std::conj(reference[k]) * w[k];
        ref_power += std::norm(reference[k]);
    }
    if (!(ref_power > 0.0) || std::abs(cross) == 0.0) {
        throw InvalidArgument("normalize_gain: degenerate gain estimate");
    }
    const Complex gain = cross / ref_power;
    std::vector<Complex> out(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        out[k] = w[k] / gain;
    }
    return {std::move(out), w.sample_rate()};
}

SampledWaveform inject_cfo(const SampledWaveform& w, double offset_hz)
{
    if (!(std::abs(offset_hz) <= w.sample_rate() / 2.0)) {
        throw InvalidArgument(fmt::format("CFO {:g} Hz beyond +/- half the sample rate ({:g} Hz)",
                                          offset_hz, w.sample_rate() / 2.0));
    }
    std::vector<Complex> out(w.size());
    const double step = offset_hz / w.sample_rate();
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double c = step * static_cast<double>(k);
        out[k] = w[k] * std::polar(1.0, 2.0 * std::numbers::pi * (c - std::floor(c)));
    }
    return {std::move(out), w.sample_rate()};
}

double estimate_cfo(const SampledWaveform& w, const SampledWaveform& pilot)
{
    require_same_grid(pilot, w, "estimate_cfo");
    const std::size_t n = w.size();
    if (n < 2) {
        throw InvalidArgument("estimate_cfo needs at least two samples");
    }
    std::vector<Complex> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = w[k] * std::conj(pilot[k]);
    }

    // Coarse rate from the lag-one correlation.
    Complex lag{0.0, 0.0};
    for (std::size_t k = 1; k < n; ++k) {
        lag += z[k] * std::conj(z[k - 1]);
    }
    if (std::abs(lag) == 0.0) {
        throw InvalidArgument("estimate_cfo: signal and pilot do not overlap");
    }
    const double coarse = std::arg(lag);

    // Weighted least-squares line through the unwrapped residual phase.
    long double sw = 0, st = 0, sp = 0, stt = 0, stp = 0;
    double prev = 0.0;
    double unwrap = 0.0;
    bool first = true;
    for (std::size_t k = 0; k < n; ++k) {
        const double weight = std::norm(z[k]);
        if (weight == 0.0) {
            continue;
        }
        const double residual = std::arg(z[k] * std::polar(1.0, -coarse * static_cast<double>(k)));
        if (first) {
            unwrap = residual;
            first = false;
        } else {
            unwrap += wrap_to_pi(residual - prev);
        }
        prev = residual;
        const long double t = static_cast<long double>(k);
        sw += weight;
        st += weight * t;
        sp += weight * unwrap;
        stt += weight * t * t;
        stp += weight * t * unwrap;
    }
    const long double denom = sw * stt - st * st;
    const double fine = denom > 0 ? static_cast<double>((sw * stp - st * sp) / denom) : 0.0;

    return (coarse + fine) * w.sample_rate() / (2.0 * std::numbers::pi);
}

SampledWaveform compensate_cfo(const SampledWaveform& w, const SampledWaveform& pilot)
{
    const double offset = estimate_cfo(w, pilot);
    std::vector<Complex> out(w.size());
    const double step = offset / w.sample_rate();
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double c = step * static_cast<double>(k);
        out[k] = w[k] * std::polar(1.0, -2.0 * std::numbers::pi * (c - std::floor(c)));
    }
    return {std::move(out), w.sample_rate()};
}

} // namespace wpt
