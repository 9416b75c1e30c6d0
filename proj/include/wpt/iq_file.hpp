#pragma once

#include "wpt/waveform.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace wpt {

struct IqMetadata {
    double sample_rate = 0.0;
    std::size_t n_samples = 0;
    std::string generator;
    std::uint64_t seed = 0;
};

/// Sidecar path for an IQ file: "<path>.meta".
std::filesystem::path metadata_path(const std::filesystem::path& iq_path);

/// Writes interleaved little-endian float32 (I, Q) pairs to `path` and a key=value
/// sidecar (sample_rate, n_samples, generator, seed) next to it.
void write_iq(const std::filesystem::path& path, const SampledWaveform& w,
              const std::string& generator, std::uint64_t seed);

IqMetadata read_iq_metadata(const std::filesystem::path& iq_path);

/// Reads an IQ file and its sidecar. Samples come back at float32 precision.
SampledWaveform read_iq(const std::filesystem::path& path);

} // namespace wpt
