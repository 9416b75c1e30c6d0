#include "wpt/iq_file.hpp"

#include "wpt/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace wpt {

namespace {

std::array<char, 4> to_le_bytes(float v)
{
    auto bits = std::bit_cast<std::uint32_t>(v);
    std::array<char, 4> out{};
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
    }
    return out;
}

float from_le_bytes(const char* p)
{
    std::uint32_t bits = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    }
    return std::bit_cast<float>(bits);
}

std::string trim(std::string s)
{
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

} // namespace

std::filesystem::path metadata_path(const std::filesystem::path& iq_path)
{
    auto p = iq_path;
    p += ".meta";
    return p;
}

void write_iq(const std::filesystem::path& path, const SampledWaveform& w,
              const std::string& generator, std::uint64_t seed)
{
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError(path.string(), "cannot open for writing");
        }
        std::vector<char> buffer;
        buffer.reserve(w.size() * 8);
        for (const Complex& x : w.samples()) {
            const auto i = to_le_bytes(static_cast<float>(x.real()));
            const auto q = to_le_bytes(static_cast<float>(x.imag()));
            buffer.insert(buffer.end(), i.begin(), i.end());
            buffer.insert(buffer.end(), q.begin(), q.end());
        }
        out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        if (!out) {
            throw IoError(path.string(), "write failed");
        }
    }

    const auto meta = metadata_path(path);
    std::ofstream out(meta, std::ios::trunc);
    if (!out) {
        throw IoError(meta.string(), "cannot open for writing");
    }
    // Generator strings are single-line by contract.
    std::string gen = generator;
    std::replace(gen.begin(), gen.end(), '\n', ' ');
    out << fmt::format("sample_rate={:.17g}\n", w.sample_rate());
    out << fmt::format("n_samples={}\n", w.size());
    out << fmt::format("generator={}\n", gen);
    out << fmt::format("seed={}\n", seed);
    if (!out) {
        throw IoError(meta.string(), "write failed");
    }
}

IqMetadata read_iq_metadata(const std::filesystem::path& iq_path)
{
    const auto meta = metadata_path(iq_path);
    std::ifstream in(meta);
    if (!in) {
        throw IoError(meta.string(), "cannot open metadata sidecar");
    }
    IqMetadata md;
    bool have_rate = false;
    bool have_count = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw IoError(meta.string(), fmt::format("line {}: expected key=value", line_no));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "sample_rate") {
                md.sample_rate = std::stod(value);
                have_rate = true;
            } else if (key == "n_samples") {
                md.n_samples = static_cast<std::size_t>(std::stoull(value));
                have_count = true;
            } else if (key == "generator") {
                md.generator = value;
            } else if (key == "seed") {
                md.seed = std::stoull(value);
            }
        } catch (const std::logic_error&) {
            throw IoError(meta.string(), fmt::format("line {}: bad value for '{}'", line_no, key));
        }
    }
    if (!have_rate || !have_count) {
        throw IoError(meta.string(), "missing sample_rate or n_samples");
    }
    return md;
}

SampledWaveform read_iq(const std::filesystem::path& path)
{
    const IqMetadata md = read_iq_metadata(path);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(path.string(), "cannot open for reading");
    }
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != md.n_samples * 8) {
        throw IoError(path.string(), fmt::format("expected {} bytes for {} samples, found {}",
                                                 md.n_samples * 8, md.n_samples, bytes.size()));
    }
    std::vector<Complex> samples(md.n_samples);
    for (std::size_t k = 0; k < md.n_samples; ++k) {
        samples[k] = {from_le_bytes(&bytes[8 * k]), from_le_bytes(&bytes[8 * k + 4])};
    }
    try {
        return {std::move(samples), md.sample_rate};
    } catch (const InvalidArgument& e) {
        throw IoError(path.string(), e.what());
    }
}

} // namespace wpt
