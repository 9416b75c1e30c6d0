#include "wpt/scenario.hpp"

#include "wpt/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace wpt {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::optional<double> try_parse_double(std::string_view text)
{
    const std::string s = trim(text);
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (!s.empty() && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || s.empty()) {
        return std::nullopt;
    }
    return v;
}

double parse_double(const std::string& section, const std::string& key, std::string_view text)
{
    if (auto v = try_parse_double(text)) {
        return *v;
    }
    throw ConfigError(section, fmt::format("{} = '{}' is not a number", key, trim(text)));
}

long long parse_integer(const std::string& section, const std::string& key, std::string_view text)
{
    const std::string s = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        // Accept integral values written in floating notation, e.g. 1e5.
        if (auto d = try_parse_double(s); d && std::nearbyint(*d) == *d && std::abs(*d) < 9e15) {
            return static_cast<long long>(*d);
        }
        throw ConfigError(section, fmt::format("{} = '{}' is not an integer", key, s));
    }
    return v;
}

// Applies one key to a scenario. Returns false for unknown keys.
bool apply_key(Scenario& sc, const std::string& section, const std::string& key,
               const std::string& value, const std::filesystem::path& base_dir)
{
    auto num = [&] { return parse_double(section, key, value); };
    auto integer = [&] { return parse_integer(section, key, value); };

    if (section == "waveform") {
        auto& w = sc.waveform;
        if (key == "kind") {
            const std::string v = trim(value);
            if (v == "multisine") {
                w.kind = WaveformKind::Multisine;
            } else if (v == "constellation" || v == "symbols") {
                w.kind = WaveformKind::Constellation;
            } else {
                throw ConfigError(section, fmt::format("kind = '{}': expected multisine or constellation", v));
            }
        } else if (key == "n_tones") {
            w.n_tones = static_cast<int>(integer());
        } else if (key == "amplitude") {
            try {
                w.amplitude = AmplitudeRule::parse(value);
            } catch (const InvalidArgument& e) {
                throw ConfigError(section, e.what());
            }
        } else if (key == "phase_rad") {
            w.phase_rad = num();
        } else if (key == "fundamental_hz") {
            w.fundamental_hz = num();
        } else if (key == "n_periods") {
            w.n_periods = static_cast<int>(integer());
        } else if (key == "modulation") {
            try {
                w.modulation = parse_modulation(trim(value));
            } catch (const InvalidArgument& e) {
                throw ConfigError(section, e.what());
            }
        } else if (key == "bit_rate") {
            w.bit_rate = num();
        } else if (key == "n_symbols") {
            const long long n = integer();
            if (n < 1) {
                throw ConfigError(section, "n_symbols must be at least 1");
            }
            w.n_symbols = static_cast<std::size_t>(n);
        } else if (key == "sample_rate_hz") {
            w.sample_rate_hz = num();
        } else {
            return false;
        }
    } else if (section == "transmitter") {
        auto& tx = sc.transmitter;
        if (key == "dac_bits") {
            tx.dac.bits = static_cast<int>(integer());
        } else if (key == "dac_full_scale") {
            tx.dac.full_scale = num();
        } else if (key == "gain_db") {
            tx.gain_db = num();
        } else if (key == "internal_psat_dbm") {
            tx.internal_psat_dbm = num();
        } else if (key == "internal_smoothness") {
            tx.internal_smoothness = num();
        } else if (key == "external_gain_db") {
            tx.external_pa.small_signal_gain_db = num();
        } else if (key == "external_psat_dbm") {
            tx.external_pa.saturation_power = std::pow(10.0, num() / 10.0);
        } else if (key == "external_smoothness") {
            tx.external_pa.smoothness = num();
        } else if (key == "fullscale_dbm") {
            tx.fullscale_dbm = num();
        } else if (key == "dc_at_min_gain_w") {
            tx.dc_at_min_gain_w = num();
        } else if (key == "dc_at_max_gain_w") {
            tx.dc_at_max_gain_w = num();
        } else if (key == "external_dc_w") {
            tx.external_dc_w = num();
        } else {
            return false;
        }
    } else if (section == "channel") {
        auto& ch = sc.channel;
        if (key == "distance_m") {
            ch.distance_m = num();
        } else if (key == "reference_distance_m") {
            ch.reference_distance_m = num();
        } else if (key == "base_attenuation_db") {
            ch.base_attenuation_db = num();
        } else if (key == "path_loss_exponent") {
            ch.path_loss_exponent = num();
        } else if (key == "reflector_offset_db") {
            ch.reflector_offset_db = num();
        } else {
            return false;
        }
    } else if (section == "harvester") {
        auto& h = sc.harvester;
        if (key == "detection_threshold_dbm") {
            h.detection_threshold_dbm = num();
        } else if (key == "load_resistance_ohm") {
            h.load_resistance_ohm = num();
        } else if (key == "shape_factor") {
            h.shape_factor = num();
        } else if (key == "curve") {
            // "dBm:fraction, dBm:fraction, ..."
            h.efficiency_curve.clear();
            std::string_view rest = value;
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                const std::string item = trim(rest.substr(0, comma));
                rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
                if (item.empty()) {
                    continue;
                }
                const auto colon = item.find(':');
                if (colon == std::string::npos) {
                    throw ConfigError(section, fmt::format("curve entry '{}' is not dBm:fraction", item));
                }
                h.efficiency_curve.push_back({parse_double(section, key, item.substr(0, colon)),
                                              parse_double(section, key, item.substr(colon + 1))});
            }
        } else if (key == "curve_file") {
            std::filesystem::path p = trim(value);
            if (p.is_relative()) {
                p = base_dir / p;
            }
            h.efficiency_curve = load_efficiency_table(p);
        } else {
            return false;
        }
    } else if (section == "sweep") {
        if (key == "variable") {
            sc.sweep.variable = trim(value);
        } else if (key == "values") {
            try {
                sc.sweep.values = expand_values(value);
            } catch (const InvalidArgument& e) {
                throw ConfigError(section, e.what());
            }
        } else {
            return false;
        }
    } else if (section == "evm") {
        if (key == "cfo_hz") {
            sc.cfo_hz = num();
        } else {
            return false;
        }
    } else if (section == "fig2") {
        auto& f = sc.fig2;
        if (key == "n_tones") {
            f.n_tones.clear();
            for (const auto& v : expand_values(value)) {
                f.n_tones.push_back(static_cast<int>(parse_integer(section, key, v)));
            }
        } else if (key == "amplitude_min") {
            f.amplitude_min = num();
        } else if (key == "amplitude_max") {
            f.amplitude_max = num();
        } else if (key == "amplitude_points") {
            f.amplitude_points = static_cast<int>(integer());
        } else if (key == "phase_rad") {
            f.phase_rad = num();
        } else if (key == "fundamental_hz") {
            f.fundamental_hz = num();
        } else if (key == "sample_rate_hz") {
            f.sample_rate_hz = num();
        } else if (key == "dac_bits") {
            f.dac_bits = static_cast<int>(integer());
        } else {
            return false;
        }
    } else if (section == "output") {
        if (key == "csv") {
            sc.output_csv = trim(value);
        } else {
            return false;
        }
    } else if (section == "run") {
        if (key == "seed") {
            const long long s = integer();
            if (s < 0) {
                throw ConfigError(section, "seed must be non-negative");
            }
            sc.seed = static_cast<std::uint64_t>(s);
        } else {
            return false;
        }
    } else {
        throw ConfigError(section, "unknown section");
    }
    return true;
}

template <typename F>
void wrap_as_config_error(const std::string& section, F&& f)
{
    try {
        f();
    } catch (const InvalidArgument& e) {
        throw ConfigError(section, e.what());
    }
}

} // namespace

AmplitudeRule AmplitudeRule::parse(std::string_view text)
{
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s.push_back(c);
        }
    }
    if (s == "1/N") {
        return {Kind::InverseN, 0.0};
    }
    if (s == "1/sqrtN" || s == "1/sqrt(N)") {
        return {Kind::InverseSqrtN, 0.0};
    }
    if (auto v = try_parse_double(s); v && *v > 0.0 && std::isfinite(*v)) {
        return {Kind::Value, *v};
    }
    throw InvalidArgument(fmt::format("amplitude '{}' must be a positive number, 1/N or 1/sqrtN", text));
}

double AmplitudeRule::resolve(int n_tones) const
{
    switch (kind) {
    case Kind::InverseN: return 1.0 / n_tones;
    case Kind::InverseSqrtN: return 1.0 / std::sqrt(static_cast<double>(n_tones));
    case Kind::Value: break;
    }
    return value;
}

std::string AmplitudeRule::to_string() const
{
    switch (kind) {
    case Kind::InverseN: return "1/N";
    case Kind::InverseSqrtN: return "1/sqrtN";
    case Kind::Value: break;
    }
    return fmt::format("{:.12g}", value);
}

std::vector<std::string> expand_values(std::string_view text)
{
    const std::string s = trim(text);
    std::vector<std::string> out;
    if (s.find(':') != std::string::npos && s.find(',') == std::string::npos) {
        std::vector<double> parts;
        std::string_view rest = s;
        while (true) {
            const auto colon = rest.find(':');
            const auto v = try_parse_double(rest.substr(0, colon));
            if (!v) {
                throw InvalidArgument(fmt::format("bad range '{}': expected start:stop:step", s));
            }
            parts.push_back(*v);
            if (colon == std::string_view::npos) {
                break;
            }
            rest = rest.substr(colon + 1);
        }
        if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
            throw InvalidArgument(fmt::format("bad range '{}': expected start:stop:step with step > 0", s));
        }
        const double start = parts[0];
        const double stop = parts[1];
        const double step = parts[2];
        const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long long i = 0; i < count; ++i) {
            out.push_back(fmt::format("{:.12g}", start + static_cast<double>(i) * step));
        }
        return out;
    }
    std::string_view rest = s;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (!item.empty()) {
            out.push_back(std::move(item));
        }
    }
    return out;
}

const std::vector<std::string>& Scenario::sweep_variables()
{
    static const std::vector<std::string> vars{
        "gain_db",  "amplitude",  "n_tones",   "bit_rate", "modulation", "distance_m",
        "reflector_offset_db", "cfo_hz", "phase_rad", "n_symbols"};
    return vars;
}

WaveformSource Scenario::source() const
{
    const auto& w = waveform;
    if (w.kind == WaveformKind::Multisine) {
        return MultisineSource{
            MultisineSpec::co_phased(w.n_tones, w.amplitude.resolve(w.n_tones), w.phase_rad, w.fundamental_hz),
            w.sample_rate_hz, w.n_periods};
    }
    return SymbolSource{ConstellationSpec::make(w.modulation, w.bit_rate), w.n_symbols, w.sample_rate_hz, seed};
}

Scenario Scenario::at(std::string_view value) const
{
    Scenario sc = *this;
    const std::string& var = sweep.variable;
    const std::string v(value);
    auto num = [&] { return parse_double("sweep", var, v); };
    auto integer = [&] { return parse_integer("sweep", var, v); };
    if (var == "gain_db") {
        sc.transmitter.gain_db = num();
    } else if (var == "amplitude") {
        wrap_as_config_error("sweep", [&] { sc.waveform.amplitude = AmplitudeRule::parse(v); });
    } else if (var == "n_tones") {
        sc.waveform.n_tones = static_cast<int>(integer());
    } else if (var == "bit_rate") {
        sc.waveform.bit_rate = num();
    } else if (var == "modulation") {
        wrap_as_config_error("sweep", [&] { sc.waveform.modulation = parse_modulation(v); });
    } else if (var == "distance_m") {
        sc.channel.distance_m = num();
    } else if (var == "reflector_offset_db") {
        sc.channel.reflector_offset_db = num();
    } else if (var == "cfo_hz") {
        sc.cfo_hz = num();
    } else if (var == "phase_rad") {
        sc.waveform.phase_rad = num();
    } else if (var == "n_symbols") {
        const long long n = integer();
        if (n < 1) {
            throw ConfigError("sweep", "n_symbols must be at least 1");
        }
        sc.waveform.n_symbols = static_cast<std::size_t>(n);
    } else {
        throw ConfigError("sweep", fmt::format("unknown sweep variable '{}'", var));
    }
    return sc;
}

void Scenario::validate() const
{
    wrap_as_config_error("waveform", [&] {
        const auto& w = waveform;
        if (!(w.sample_rate_hz > 0.0)) {
            throw InvalidArgument("sample_rate_hz must be positive");
        }
        if (w.kind == WaveformKind::Multisine) {
            const MultisineSpec spec = MultisineSpec::co_phased(w.n_tones, w.amplitude.resolve(w.n_tones),
                                                                w.phase_rad, w.fundamental_hz);
            if (w.n_periods < 1) {
                throw InvalidArgument("n_periods must be at least 1");
            }
            if (w.sample_rate_hz < 2.0 * spec.highest_frequency()) {
                throw InvalidArgument(fmt::format("sample rate {:g} Hz violates Nyquist for tone {} at {:g} Hz",
                                                  w.sample_rate_hz, w.n_tones, spec.highest_frequency()));
            }
        } else {
            samples_per_symbol(ConstellationSpec::make(w.modulation, w.bit_rate), w.sample_rate_hz);
        }
        if (!std::isfinite(cfo_hz) || std::abs(cfo_hz) > w.sample_rate_hz / 2.0) {
            throw InvalidArgument(fmt::format("cfo {:g} Hz beyond half the sample rate", cfo_hz));
        }
    });
    wrap_as_config_error("transmitter", [&] { transmitter.validate(); });
    wrap_as_config_error("channel", [&] { channel.validate(); });
    wrap_as_config_error("harvester", [&] { harvester.validate(); });
    wrap_as_config_error("fig2", [&] {
        if (fig2.n_tones.empty()) {
            throw InvalidArgument("n_tones list is empty");
        }
        for (int n : fig2.n_tones) {
            if (n < 1) {
                throw InvalidArgument("n_tones entries must be positive");
            }
        }
        if (!(fig2.amplitude_min > 0.0) || !(fig2.amplitude_max >= fig2.amplitude_min) ||
            fig2.amplitude_points < 1) {
            throw InvalidArgument("amplitude grid needs 0 < amplitude_min <= amplitude_max and >= 1 point");
        }
        DacModel{1.0, fig2.dac_bits}.validate();
    });

    if (sweep.variable.empty()) {
        if (!sweep.values.empty()) {
            throw ConfigError("sweep", "values given without a variable");
        }
        return;
    }
    const auto& vars = sweep_variables();
    if (std::find(vars.begin(), vars.end(), sweep.variable) == vars.end()) {
        throw ConfigError("sweep", fmt::format("unknown sweep variable '{}'", sweep.variable));
    }
    if (sweep.values.empty()) {
        throw ConfigError("sweep", fmt::format("no values for sweep variable '{}'", sweep.variable));
    }
    for (const auto& v : sweep.values) {
        Scenario point = at(v);
        point.sweep = {};
        try {
            point.validate();
        } catch (const ConfigError& e) {
            throw ConfigError("sweep", fmt::format("{} = {}: {}", sweep.variable, v, e.what()));
        }
    }
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("scenario", fmt::format("line {}: {}", e.line(), e.message()));
    }

    Scenario sc;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            throw ConfigError(section, "key outside of any section");
        }
        for (const auto& [key, node] : body) {
            if (!apply_key(sc, section, key, node.get_value<std::string>(), base_dir)) {
                throw ConfigError(section, fmt::format("unknown key '{}'", key));
            }
        }
    }

    // Numeric sweeps run in ascending order so CSV rows follow the sweep value.
    if (!sc.sweep.values.empty() && sc.sweep.variable != "modulation" && sc.sweep.variable != "amplitude") {
        std::vector<std::pair<double, std::string>> keyed;
        for (const auto& v : sc.sweep.values) {
            keyed.emplace_back(parse_double("sweep", sc.sweep.variable, v), v);
        }
        std::stable_sort(keyed.begin(), keyed.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        sc.sweep.values.clear();
        for (auto& [_, v] : keyed) {
            sc.sweep.values.push_back(std::move(v));
        }
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError(path.string(), "cannot open scenario");
    }
    return parse_scenario(in, path.parent_path());
}

} // namespace wpt
