#include "wpt/error.hpp"
#include "wpt/experiments.hpp"
#include "wpt/iq_file.hpp"
#include "wpt/metrics.hpp"
#include "wpt/scenario.hpp"
#include "wpt/units.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Options {
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
    int jobs = 0;
    std::string iq_path;
};

wpt::Scenario load(const Options& opt)
{
    wpt::Scenario sc = opt.scenario.empty() ? wpt::Scenario{} : wpt::load_scenario(opt.scenario);
    if (opt.seed) {
        sc.seed = *opt.seed;
    }
    return sc;
}

int jobs_of(const Options& opt)
{
    if (opt.jobs > 0) {
        return opt.jobs;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void emit(const Options& opt, const wpt::Scenario& sc, const std::string& command,
          const std::function<void(std::ostream&)>& body)
{
    const std::string path = !opt.out.empty() ? opt.out : sc.output_csv;
    if (path.empty()) {
        body(std::cout);
        return;
    }
    wpt::write_csv_file(path, command, body);
    std::cerr << "wrote " << path << '\n';
}

void cmd_fig2(const Options& opt)
{
    const wpt::Scenario sc = load(opt);
    sc.validate();
    const auto rows = wpt::run_fig2(sc.fig2, jobs_of(opt));
    emit(opt, sc, "fig2", [&](std::ostream& o) { wpt::write_fig2_csv(o, rows); });
}

void cmd_chain_sweep(const Options& opt)
{
    const wpt::Scenario sc = load(opt);
    const auto rows = wpt::run_chain_sweep(sc, jobs_of(opt));
    emit(opt, sc, "chain-sweep", [&](std::ostream& o) { wpt::write_chain_csv(o, sc.sweep.variable, rows); });
}

void cmd_evm_sweep(const Options& opt)
{
    const wpt::Scenario sc = load(opt);
    const auto rows = wpt::run_evm_sweep(sc, jobs_of(opt));
    emit(opt, sc, "evm-sweep", [&](std::ostream& o) { wpt::write_evm_csv(o, sc.sweep.variable, rows); });
}

void cmd_gen(const Options& opt)
{
    const wpt::Scenario sc = load(opt);
    sc.validate();
    if (opt.out.empty()) {
        throw wpt::ConfigError("output", "gen needs --out <file.iq>");
    }
    const auto w = wpt::generate(sc.source());
    const std::string generator =
        sc.waveform.kind == wpt::WaveformKind::Multisine
            ? fmt::format("multisine N={} A={} phase={:.10g} f0={:.10g}", sc.waveform.n_tones,
                          sc.waveform.amplitude.to_string(), sc.waveform.phase_rad, sc.waveform.fundamental_hz)
            : fmt::format("{} bit_rate={:.10g} n_symbols={}", wpt::to_string(sc.waveform.modulation),
                          sc.waveform.bit_rate, sc.waveform.n_symbols);
    wpt::write_iq(opt.out, w, generator, sc.seed);
    std::cerr << "wrote " << w.size() << " samples to " << opt.out << '\n';
}

void cmd_analyze(const Options& opt)
{
    const auto w = wpt::read_iq(opt.iq_path);
    const auto m = wpt::measure(w);
    auto body = [&](std::ostream& o) {
        o << "n_samples,sample_rate_hz,avg_power,peak_power,papr,papr_db,peak_time_s\n";
        o << fmt::format("{},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g}\n", w.size(), w.sample_rate(),
                         m.average_power, m.peak_power, m.papr, wpt::ratio_to_db(m.papr), m.peak_time);
    };
    if (opt.out.empty()) {
        body(std::cout);
    } else {
        wpt::write_csv_file(opt.out, "analyze", body);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"RF wireless power transfer waveform and link simulator"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", opt.scenario, "Scenario file");
        sub->add_option("--out", opt.out, "Output path (CSV, or IQ for gen)");
        sub->add_option("--seed", opt.seed, "Override the scenario seed");
        sub->add_option("--jobs", opt.jobs, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    };

    auto* fig2 = app.add_subcommand("fig2", "Multisine amplitude study: power, PAPR and EVM versus A and N");
    add_common(fig2);
    auto* chain = app.add_subcommand("chain-sweep", "End-to-end efficiency chain over one sweep variable");
    add_common(chain);
    auto* evms = app.add_subcommand("evm-sweep", "EVM of constellation waveforms with CFO injection");
    add_common(evms);
    auto* gen = app.add_subcommand("gen", "Write the scenario waveform as an IQ file");
    add_common(gen);
    auto* analyze = app.add_subcommand("analyze", "Power metrics of an IQ file");
    analyze->add_option("iq", opt.iq_path, "IQ file")->required();
    analyze->add_option("--out", opt.out, "Output CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*fig2) {
            cmd_fig2(opt);
        } else if (*chain) {
            cmd_chain_sweep(opt);
        } else if (*evms) {
            cmd_evm_sweep(opt);
        } else if (*gen) {
            cmd_gen(opt);
        } else if (*analyze) {
            cmd_analyze(opt);
        }
    } catch (const wpt::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const wpt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const wpt::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
