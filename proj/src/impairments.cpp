#include "wpt/impairments.hpp"

#include "wpt/error.hpp"
#include "wpt/units.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wpt {

void DacModel::validate() const
{
    if (!(full_scale > 0.0) || !std::isfinite(full_scale)) {
        throw InvalidArgument("DAC full scale must be positive");
    }
    if (bits < 1 || bits > 30) {
        throw InvalidArgument(fmt::format("DAC resolution {} bits outside [1, 30]", bits));
    }
}

double DacModel::lsb() const
{
    return 2.0 * full_scale / (std::ldexp(1.0, bits) - 1.0);
}

int DacModel::max_code() const
{
    return (1 << (bits - 1)) - 1;
}

void PaStage::validate() const
{
    if (!std::isfinite(small_signal_gain_db)) {
        throw InvalidArgument("PA gain must be finite");
    }
    if (!(saturation_power > 0.0) || !std::isfinite(saturation_power)) {
        throw InvalidArgument("PA saturation power must be positive");
    }
    if (!(smoothness > 0.0) || !std::isfinite(smoothness)) {
        throw InvalidArgument("PA smoothness must be positive");
    }
}

double PaStage::linear_gain() const
{
    return db_to_amplitude(small_signal_gain_db);
}

double PaStage::transfer(double v) const
{
    const double gv = linear_gain() * v;
    const double r = gv * gv / saturation_power;
    const double p = smoothness;
    const double v_sat = std::sqrt(saturation_power);
    if (r <= 1.0) {
        return std::min(gv * std::pow(1.0 + std::pow(r, p), -0.5 / p), v_sat);
    }
    // Same map rewritten around the ceiling so huge drives cannot overflow.
    return v_sat * std::pow(1.0 + std::pow(r, -p), -0.5 / p);
}

TransmitterModel TransmitterModel::default_model()
{
    TransmitterModel tx;
    tx.external_pa = PaStage{43.5, dbm_to_mw(31.8), 2.0};
    // Unit-power drive reaches the external PA knee at G = 51 dB.
    tx.fullscale_dbm = 31.8 - 43.5 - 51.0;
    return tx;
}

void TransmitterModel::validate() const
{
    dac.validate();
    if (!(gain_db >= kMinGainDb && gain_db <= kMaxGainDb)) {
        throw InvalidArgument(fmt::format("gain setting {:g} dB outside [{:g}, {:g}] dB", gain_db,
                                          kMinGainDb, kMaxGainDb));
    }
    internal_pa().validate();
    external_pa.validate();
    if (!std::isfinite(fullscale_dbm)) {
        throw InvalidArgument("full-scale power must be finite");
    }
    if (!(dc_at_min_gain_w >= 0.0) || !(dc_at_max_gain_w >= 0.0) || !(external_dc_w >= 0.0)) {
        throw InvalidArgument("DC input powers must be non-negative");
    }
}

TransmitterModel TransmitterModel::with_gain(double g_db) const
{
    TransmitterModel tx = *this;
    tx.gain_db = g_db;
    return tx;
}

PaStage TransmitterModel::internal_pa() const
{
    return PaStage{gain_db, dbm_to_mw(internal_psat_dbm), internal_smoothness};
}

double TransmitterModel::dc_input_w() const
{
    const double frac = (gain_db - kMinGainDb) / (kMaxGainDb - kMinGainDb);
    return dc_at_min_gain_w + frac * (dc_at_max_gain_w - dc_at_min_gain_w) + external_dc_w;
}

double TransmitterModel::knee_gain_db() const
{
    return mw_to_dbm(external_pa.saturation_power) - external_pa.small_signal_gain_db - fullscale_dbm;
}

SampledWaveform clip(const SampledWaveform& w, const DacModel& dac)
{
    dac.validate();
    const double fs = dac.full_scale;
    auto branch = [fs](double v) {
        if (v >= fs) return fs;
        if (v <= -fs) return -fs;
        return v;
    };
    std::vector<Complex> out(w.size());
    std::transform(w.samples().begin(), w.samples().end(), out.begin(), [&](const Complex& x) {
        return Complex{branch(x.real()), branch(x.imag())};
    });
    return {std::move(out), w.sample_rate()};
}

SampledWaveform quantize(const SampledWaveform& w, const DacModel& dac)
{
    dac.validate();
    const double step = dac.lsb();
    const double max_code = dac.max_code();
    auto branch = [&](double v, std::size_t k) {
        if (!(std::abs(v) <= dac.full_scale)) {
            throw InvalidArgument(fmt::format(
                "sample {} value {:g} outside DAC range +/-{:g}; clip before quantizing", k, v,
                dac.full_scale));
        }
        return std::clamp(std::round(v / step), -max_code, max_code) * step;
    };
    std::vector<Complex> out(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        out[k] = {branch(w[k].real(), k), branch(w[k].imag(), k)};
    }
    return {std::move(out), w.sample_rate()};
}

RealWaveform upconvert(const SampledWaveform& w, double carrier_hz, double passband_rate_hz,
                       std::optional<double> baseband_bandwidth_hz)
{
    if (!(carrier_hz > 0.0) || !(passband_rate_hz > 0.0)) {
        throw InvalidArgument("carrier and passband rate must be positive");
    }
    const double bandwidth = baseband_bandwidth_hz.value_or(w.sample_rate() / 2.0);
    if (passband_rate_hz < 2.0 * (carrier_hz + bandwidth)) {
        throw InvalidArgument(fmt::format(
            "passband rate {:g} Hz below Nyquist {:g} Hz for carrier {:g} Hz + bandwidth {:g} Hz",
            passband_rate_hz, 2.0 * (carrier_hz + bandwidth), carrier_hz, bandwidth));
    }
    const double ratio = passband_rate_hz / w.sample_rate();
    const double hold = std::round(ratio);
    if (hold < 1.0 || std::abs(ratio - hold) > 1e-9 * hold) {
        throw InvalidArgument(fmt::format(
            "passband rate {:g} Hz is not an integer multiple of the baseband rate {:g} Hz",
            passband_rate_hz, w.sample_rate()));
    }
    const double cycles = carrier_hz * w.duration();
    if (std::abs(cycles - std::round(cycles)) > 1e-6) {
        throw InvalidArgument(fmt::format(
            "carrier {:g} Hz does not fit an integer number of cycles in {:g} s ({:g} cycles)",
            carrier_hz, w.duration(), cycles));
    }

    const auto L = static_cast<std::size_t>(hold);
    const std::size_t n_out = w.size() * L;
    std::vector<double> out(n_out);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < n_out; ++k) {
        const double c = carrier_hz * static_cast<double>(k) / passband_rate_hz;
        const double theta = two_pi * (c - std::floor(c));
        const Complex& x = w[k / L];
        out[k] = std::numbers::sqrt2 * (std::cos(theta) * x.real() - std::sin(theta) * x.imag());
    }
    return {std::move(out), passband_rate_hz};
}

SampledWaveform amplify(const SampledWaveform& w, const PaStage& stage)
{
    stage.validate();
    std::vector<Complex> out(w.size());
    std::transform(w.samples().begin(), w.samples().end(), out.begin(), [&](const Complex& x) {
        const double v = std::abs(x);
        if (v == 0.0) {
            return Complex{0.0, 0.0};
        }
        return x * (stage.transfer(v) / v);
    });
    return {std::move(out), w.sample_rate()};
}

SampledWaveform transmit(const SampledWaveform& w, const TransmitterModel& tx)
{
    tx.validate();
    const SampledWaveform dac_out = quantize(clip(w, tx.dac), tx.dac);
    const SampledWaveform at_pa = dac_out.scaled(std::sqrt(dbm_to_mw(tx.fullscale_dbm)));
    return amplify(amplify(at_pa, tx.internal_pa()), tx.external_pa);
}

} // namespace wpt
