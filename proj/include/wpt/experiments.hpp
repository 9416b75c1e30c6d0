#pragma once

#include "wpt/linkchain.hpp"
#include "wpt/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace wpt {

/// One (N, A) point of the multisine DAC study. Powers are in full-scale units.
struct Fig2Row {
    int n_tones = 0;
    double amplitude = 0.0;
    /// "1/N", "1/sqrtN" or empty.
    std::string marker;
    /// Sampled mean of the clipped baseband.
    double avg_rf_power = 0.0;
    /// Piecewise quadrature over the clip intervals.
    double avg_rf_power_analytic = 0.0;
    /// Passband-equivalent PAPR of the clipped baseband.
    double papr = 0.0;
    /// Clipped and quantized waveform against the ideal one.
    double evm = 0.0;
};

/// Log-spaced amplitudes plus the 1/N and 1/sqrt(N) markers, ascending.
std::vector<double> amplitude_grid(const Fig2Section& cfg, int n_tones);

Fig2Row fig2_point(const Fig2Section& cfg, int n_tones, double amplitude);
/// Rows ordered by N, then A.
std::vector<Fig2Row> run_fig2(const Fig2Section& cfg, int jobs = 1);

struct ChainRow {
    std::string sweep_value;
    ChainResult result;
};

std::vector<ChainRow> run_chain_sweep(const Scenario& sc, int jobs = 1);

struct EvmRow {
    std::string sweep_value;
    Modulation modulation = Modulation::Qpsk;
    double bit_rate = 0.0;
    double gain_db = 0.0;
    double cfo_hz = 0.0;
    double evm_before = 0.0;
    double evm_after = 0.0;
};

/// Transmit a symbol stream, rotate it by the scenario CFO, and compare against the
/// ideal stream before and after pilot-aided compensation. Gain is normalized in both.
EvmRow evm_point(const Scenario& sc);
/// Requires a constellation waveform.
std::vector<EvmRow> run_evm_sweep(const Scenario& sc, int jobs = 1);

void write_fig2_csv(std::ostream& out, const std::vector<Fig2Row>& rows);
void write_chain_csv(std::ostream& out, const std::string& variable, const std::vector<ChainRow>& rows);
void write_evm_csv(std::ostream& out, const std::string& variable, const std::vector<EvmRow>& rows);

/// Writes a '#' provenance line (command and timestamp) and then `body`.
/// Throws IoError with the path on failure.
void write_csv_file(const std::filesystem::path& path, const std::string& command,
                    const std::function<void(std::ostream&)>& body);

/// Applies `f` to every index in [0, n) on up to `jobs` threads. Results keep index
/// order; the first exception is rethrown after all workers stop.
template <typename F>
auto parallel_map(std::size_t n, int jobs, F f) -> std::vector<decltype(f(std::size_t{}))>
{
    using R = decltype(f(std::size_t{}));
    std::vector<R> out(n);
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = f(i);
        }
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    pool.clear();
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

} // namespace wpt
