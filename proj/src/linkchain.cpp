#include "wpt/linkchain.hpp"

#include "wpt/error.hpp"
#include "wpt/metrics.hpp"
#include "wpt/units.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wpt {

void ChannelModel::validate() const
{
    if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
        throw InvalidArgument(fmt::format("distance {:g} m must be positive", distance_m));
    }
    if (!(reference_distance_m > 0.0)) {
        throw InvalidArgument("reference distance must be positive");
    }
    if (!std::isfinite(base_attenuation_db) || !std::isfinite(path_loss_exponent) ||
        !std::isfinite(reflector_offset_db)) {
        throw InvalidArgument("channel parameters must be finite");
    }
    if (attenuation_db() < 0.0) {
        throw InvalidArgument(fmt::format("net channel attenuation {:g} dB is negative",
                                          attenuation_db()));
    }
}

double ChannelModel::attenuation_db() const
{
    return base_attenuation_db + 10.0 * path_loss_exponent * std::log10(distance_m / reference_distance_m) -
           reflector_offset_db;
}

HarvesterModel HarvesterModel::default_model()
{
    HarvesterModel h;
    h.efficiency_curve = {{-15.0, 0.0}, {-5.0, 0.10}, {6.0, 0.20}};
    return h;
}

void HarvesterModel::validate() const
{
    if (efficiency_curve.empty()) {
        throw InvalidArgument("harvester efficiency table is empty");
    }
    for (std::size_t i = 0; i < efficiency_curve.size(); ++i) {
        const auto& [dbm, eta] = efficiency_curve[i];
        if (!std::isfinite(dbm)) {
            throw InvalidArgument(fmt::format("efficiency table row {}: input power not finite", i + 1));
        }
        if (!(eta >= 0.0 && eta <= 1.0)) {
            throw InvalidArgument(
                fmt::format("efficiency table row {}: efficiency {:g} outside [0, 1]", i + 1, eta));
        }
        if (i > 0 && !(dbm > efficiency_curve[i - 1].input_dbm)) {
            throw InvalidArgument(fmt::format(
                "efficiency table row {}: input powers must be strictly increasing", i + 1));
        }
    }
    if (!std::isfinite(detection_threshold_dbm)) {
        throw InvalidArgument("detection threshold must be finite");
    }
    if (!(load_resistance_ohm > 0.0)) {
        throw InvalidArgument("load resistance must be positive");
    }
    if (!(shape_factor > 0.0) || !std::isfinite(shape_factor)) {
        throw InvalidArgument("shape factor must be positive");
    }
}

double HarvesterModel::efficiency(double input_dbm) const
{
    const auto& c = efficiency_curve;
    if (input_dbm <= c.front().input_dbm) {
        return c.front().efficiency;
    }
    if (input_dbm >= c.back().input_dbm) {
        return c.back().efficiency;
    }
    const auto hi = std::upper_bound(c.begin(), c.end(), input_dbm,
                                     [](double v, const EfficiencyPoint& p) { return v < p.input_dbm; });
    const auto lo = hi - 1;
    const double frac = (input_dbm - lo->input_dbm) / (hi->input_dbm - lo->input_dbm);
    return lo->efficiency + frac * (hi->efficiency - lo->efficiency);
}

std::vector<EfficiencyPoint> load_efficiency_table(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError(path.string(), "cannot open efficiency table");
    }
    std::vector<EfficiencyPoint> table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        EfficiencyPoint p{};
        if (!(fields >> p.input_dbm)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            throw ConfigError("harvester", fmt::format("{}:{}: expected '<dBm> <fraction>'",
                                                       path.string(), line_no));
        }
        std::string extra;
        if (!(fields >> p.efficiency) || (fields >> extra)) {
            throw ConfigError("harvester", fmt::format("{}:{}: expected exactly two columns",
                                                       path.string(), line_no));
        }
        table.push_back(p);
    }
    HarvesterModel probe;
    probe.efficiency_curve = table;
    try {
        probe.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError("harvester", path.string() + ": " + e.what());
    }
    return table;
}

void PowerTrace::validate() const
{
    for (double p : {p_in_dc, p_out_rf, p_in_rf, p_out_dc}) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw InvalidArgument("stage powers must be finite and non-negative");
        }
    }
    if (p_out_rf > p_in_dc) {
        throw InvalidArgument("transmitted RF power exceeds DC input power");
    }
    if (p_in_rf > p_out_rf) {
        throw InvalidArgument("received RF power exceeds transmitted RF power");
    }
    if (p_out_dc > p_in_rf) {
        throw InvalidArgument("harvested DC power exceeds received RF power");
    }
}

double propagate(double p_out_rf_w, const ChannelModel& ch)
{
    ch.validate();
    if (!(p_out_rf_w >= 0.0)) {
        throw InvalidArgument("transmitted power must be non-negative");
    }
    return p_out_rf_w * db_to_ratio(-ch.attenuation_db());
}

double harvest(double p_in_rf_w, const HarvesterModel& h)
{
    h.validate();
    if (!(p_in_rf_w >= 0.0)) {
        throw InvalidArgument("received power must be non-negative");
    }
    const double dbm = w_to_dbm(p_in_rf_w);
    if (dbm < h.detection_threshold_dbm) {
        return 0.0;
    }
    return p_in_rf_w * std::min(1.0, h.efficiency(dbm) * h.shape_factor);
}

EfficiencyReport assemble_report(const PowerTrace& trace)
{
    if (!(trace.p_in_dc > 0.0)) {
        throw InvalidArgument("DC input power must be positive to form efficiencies");
    }
    trace.validate();
    EfficiencyReport r;
    r.eta_dc_rf = trace.p_out_rf / trace.p_in_dc;
    r.eta_rf_rf = trace.p_out_rf > 0.0 ? trace.p_in_rf / trace.p_out_rf : 0.0;
    r.eta_rf_dc = trace.p_in_rf > 0.0 ? trace.p_out_dc / trace.p_in_rf : 0.0;
    r.eta_dc_dc = r.eta_dc_rf * r.eta_rf_rf * r.eta_rf_dc;
    return r;
}

SampledWaveform generate(const WaveformSource& source)
{
    return std::visit(
        [](const auto& s) -> SampledWaveform {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, MultisineSource>) {
                return generate_multisine(s.spec, s.sample_rate_hz, s.n_periods);
            } else {
                return generate_symbol_stream(s.spec, s.n_symbols, s.sample_rate_hz, s.seed);
            }
        },
        source);
}

ChainResult run_chain(const SampledWaveform& baseband, const TransmitterModel& tx,
                      const ChannelModel& ch, const HarvesterModel& h)
{
    tx.validate();
    ch.validate();
    h.validate();
    const SampledWaveform radiated = transmit(baseband, tx);

    ChainResult result;
    result.trace.p_in_dc = tx.dc_input_w();
    result.trace.p_out_rf = average_power(radiated) * 1e-3;
    result.trace.p_in_rf = propagate(result.trace.p_out_rf, ch);
    result.trace.p_out_dc = harvest(result.trace.p_in_rf, h);
    result.report = assemble_report(result.trace);
    return result;
}

ChainResult run_chain(const WaveformSource& source, const TransmitterModel& tx,
                      const ChannelModel& ch, const HarvesterModel& h)
{
    return run_chain(generate(source), tx, ch, h);
}

} // namespace wpt
