#include "wpt/experiments.hpp"

#include "wpt/clip_intervals.hpp"
#include "wpt/error.hpp"
#include "wpt/impairments.hpp"
#include "wpt/metrics.hpp"
#include "wpt/units.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

namespace wpt {

namespace {

constexpr int kFig2ClipGrid = 1 << 14;

std::string num(double v)
{
    return fmt::format("{:.10g}", v);
}

} // namespace

std::vector<double> amplitude_grid(const Fig2Section& cfg, int n_tones)
{
    std::vector<double> grid;
    const int n = cfg.amplitude_points;
    const double lo = std::log10(cfg.amplitude_min);
    const double hi = std::log10(cfg.amplitude_max);
    for (int i = 0; i < n; ++i) {
        const double e = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        grid.push_back(std::pow(10.0, e));
    }
    grid.push_back(1.0 / n_tones);
    grid.push_back(1.0 / std::sqrt(static_cast<double>(n_tones)));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

Fig2Row fig2_point(const Fig2Section& cfg, int n_tones, double amplitude)
{
    const MultisineSpec spec = MultisineSpec::co_phased(n_tones, amplitude, cfg.phase_rad, cfg.fundamental_hz);
    const DacModel dac{1.0, cfg.dac_bits};
    const SampledWaveform ideal = generate_multisine(spec, cfg.sample_rate_hz, 1);
    const SampledWaveform clipped = clip(ideal, dac);
    const SampledWaveform quantized = quantize(clipped, dac);

    Fig2Row row;
    row.n_tones = n_tones;
    row.amplitude = amplitude;
    if (amplitude == 1.0 / n_tones) {
        row.marker = "1/N";
    } else if (amplitude == 1.0 / std::sqrt(static_cast<double>(n_tones))) {
        row.marker = "1/sqrtN";
    }
    row.avg_rf_power = average_power(clipped);
    row.avg_rf_power_analytic =
        piecewise_average_power(spec, find_clip_intervals(spec, Branch::I, kFig2ClipGrid),
                                find_clip_intervals(spec, Branch::Q, kFig2ClipGrid));
    row.papr = papr(clipped);
    row.evm = evm(ideal, quantized);
    return row;
}

std::vector<Fig2Row> run_fig2(const Fig2Section& cfg, int jobs)
{
    std::vector<std::pair<int, double>> points;
    for (int n : cfg.n_tones) {
        for (double a : amplitude_grid(cfg, n)) {
            points.emplace_back(n, a);
        }
    }
    return parallel_map(points.size(), jobs,
                        [&](std::size_t i) { return fig2_point(cfg, points[i].first, points[i].second); });
}

std::vector<ChainRow> run_chain_sweep(const Scenario& sc, int jobs)
{
    sc.validate();
    if (sc.sweep.variable.empty()) {
        throw ConfigError("sweep", "chain-sweep needs a sweep variable");
    }
    const auto& values = sc.sweep.values;
    return parallel_map(values.size(), jobs, [&](std::size_t i) {
        const Scenario p = sc.at(values[i]);
        return ChainRow{values[i], run_chain(p.source(), p.transmitter, p.channel, p.harvester)};
    });
}

EvmRow evm_point(const Scenario& sc)
{
    if (sc.waveform.kind != WaveformKind::Constellation) {
        throw ConfigError("waveform", "EVM sweeps need kind = constellation");
    }
    const SampledWaveform ideal = generate(sc.source());
    const SampledWaveform tx = normalize_gain(transmit(ideal, sc.transmitter), ideal);
    const SampledWaveform rx = inject_cfo(tx, sc.cfo_hz);

    EvmRow row;
    row.modulation = sc.waveform.modulation;
    row.bit_rate = sc.waveform.bit_rate;
    row.gain_db = sc.transmitter.gain_db;
    row.cfo_hz = sc.cfo_hz;
    row.evm_before = evm(ideal, rx);
    row.evm_after = evm(ideal, normalize_gain(compensate_cfo(rx, ideal), ideal));
    return row;
}

std::vector<EvmRow> run_evm_sweep(const Scenario& sc, int jobs)
{
    sc.validate();
    if (sc.waveform.kind != WaveformKind::Constellation) {
        throw ConfigError("waveform", "EVM sweeps need kind = constellation");
    }
    if (sc.sweep.variable.empty()) {
        EvmRow row = evm_point(sc);
        return {row};
    }
    const auto& values = sc.sweep.values;
    return parallel_map(values.size(), jobs, [&](std::size_t i) {
        EvmRow row = evm_point(sc.at(values[i]));
        row.sweep_value = values[i];
        return row;
    });
}

void write_fig2_csv(std::ostream& out, const std::vector<Fig2Row>& rows)
{
    out << "n_tones,amplitude,marker,avg_rf_power,avg_rf_power_analytic,papr,papr_db,evm\n";
    for (const auto& r : rows) {
        out << r.n_tones << ',' << num(r.amplitude) << ',' << r.marker << ',' << num(r.avg_rf_power) << ','
            << num(r.avg_rf_power_analytic) << ',' << num(r.papr) << ',' << num(ratio_to_db(r.papr)) << ','
            << num(r.evm) << '\n';
    }
}

void write_chain_csv(std::ostream& out, const std::string& variable, const std::vector<ChainRow>& rows)
{
    out << variable
        << ",p_in_dc_w,p_in_dc_dbm,p_out_rf_w,p_out_rf_dbm,p_in_rf_w,p_in_rf_dbm,p_out_dc_w,p_out_dc_dbm"
           ",eta_dc_rf,eta_dc_rf_db,eta_rf_rf,eta_rf_rf_db,eta_rf_dc,eta_rf_dc_db,eta_dc_dc,eta_dc_dc_db\n";
    for (const auto& r : rows) {
        const auto& t = r.result.trace;
        const auto& e = r.result.report;
        out << r.sweep_value;
        for (double p : {t.p_in_dc, t.p_out_rf, t.p_in_rf, t.p_out_dc}) {
            out << ',' << num(p) << ',' << num(w_to_dbm(p));
        }
        for (double eta : {e.eta_dc_rf, e.eta_rf_rf, e.eta_rf_dc, e.eta_dc_dc}) {
            out << ',' << num(eta) << ',' << num(ratio_to_db(eta));
        }
        out << '\n';
    }
}

void write_evm_csv(std::ostream& out, const std::string& variable, const std::vector<EvmRow>& rows)
{
    // Sweeps over a variable that already has a column need no extra one.
    const bool extra = !variable.empty() && variable != "modulation" && variable != "bit_rate" &&
                       variable != "gain_db" && variable != "cfo_hz";
    if (extra) {
        out << variable << ',';
    }
    out << "modulation,bit_rate,gain_db,cfo_injected_hz,evm_before_comp,evm_after_comp\n";
    for (const auto& r : rows) {
        if (extra) {
            out << r.sweep_value << ',';
        }
        out << to_string(r.modulation) << ',' << num(r.bit_rate) << ',' << num(r.gain_db) << ','
            << num(r.cfo_hz) << ',' << num(r.evm_before) << ',' << num(r.evm_after) << '\n';
    }
}

void write_csv_file(const std::filesystem::path& path, const std::string& command,
                    const std::function<void(std::ostream&)>& body)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(path.string(), "cannot open for writing");
    }
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    out << fmt::format("# wptsim {} generated {:%Y-%m-%dT%H:%M:%SZ}\n", command, now);
    body(out);
    out.flush();
    if (!out) {
        throw IoError(path.string(), "write failed");
    }
}

} // namespace wpt
