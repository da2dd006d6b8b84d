#include "jsaforge/sfgmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jsaforge/errors.hpp"
#include "jsaforge/keyvalue.hpp"
#include "jsaforge/parallel.hpp"

namespace jsaforge {

namespace {

constexpr std::string_view kMagic = "# jsaforge-map v1";
constexpr std::string_view kUnitsPrefix = "# units: ";
constexpr std::string_view kMetaPrefix = "# meta: ";

double mean_step(const std::vector<double>& axis) {
    if (axis.size() < 2) return 0.0;
    return (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
}

void check_axis(const std::vector<double>& axis, const char* name) {
    if (axis.empty()) throw DomainError(std::string(name) + " axis is empty");
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (!std::isfinite(axis[i])) throw DomainError(std::string(name) + " axis has a non-finite value");
        if (i > 0 && !(axis[i] > axis[i - 1])) {
            throw DomainError(std::string(name) + " axis is not strictly increasing at index " + std::to_string(i));
        }
    }
}

std::string single_line(std::string text) {
    std::replace(text.begin(), text.end(), '\n', ' ');
    std::replace(text.begin(), text.end(), '\r', ' ');
    return text;
}

}  // namespace

std::string_view to_string(MapUnits units) {
    return units == MapUnits::efficiency_per_watt ? "efficiency_per_watt" : "normalized";
}

MapUnits parse_map_units(std::string_view text) {
    if (text == "efficiency_per_watt") return MapUnits::efficiency_per_watt;
    if (text == "normalized") return MapUnits::normalized;
    throw ConfigError("unknown map units '" + std::string(text) + "'");
}

std::vector<double> make_axis(double start_nm, double stop_nm, double step_nm) {
    if (!(step_nm >= 1e-6) || !std::isfinite(step_nm)) throw ConfigError("axis step must be >= 1e-6 nm");
    if (!(stop_nm >= start_nm)) throw ConfigError("axis stop must be >= start");
    const double span = (stop_nm - start_nm) / step_nm;
    auto n = static_cast<std::size_t>(std::floor(span + 1e-9));
    std::vector<double> axis(n + 1);
    // Snapped to 1e-9 so that decimal steps print as typed (9.2, not 9.200000000000001).
    for (std::size_t k = 0; k <= n; ++k) axis[k] = std::round((start_nm + static_cast<double>(k) * step_nm) * 1e9) / 1e9;
    if (std::abs(axis.back() - stop_nm) <= 1e-9 * step_nm) axis.back() = stop_nm;
    return axis;
}

JointMap::JointMap(std::vector<double> signal_axis, std::vector<double> idler_axis, std::vector<double> values,
                   MapUnits units, std::string metadata)
    : signal_(std::move(signal_axis)),
      idler_(std::move(idler_axis)),
      values_(std::move(values)),
      units_(units),
      metadata_(single_line(std::move(metadata))) {
    check_axis(signal_, "signal");
    check_axis(idler_, "idler");
    if (values_.size() != signal_.size() * idler_.size()) {
        throw DomainError("map values size does not match axes");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k]) || values_[k] < 0.0) {
            throw DomainError("map value at row " + std::to_string(k / idler_.size()) + ", column " +
                              std::to_string(k % idler_.size()) + " is negative or not finite");
        }
    }
    if (units_ == MapUnits::normalized && !values_.empty()) {
        const double m = *std::max_element(values_.begin(), values_.end());
        if (std::abs(m - 1.0) > 1e-12) throw DomainError("normalized map must have maximum 1");
    }
}

double JointMap::signal_step() const noexcept { return mean_step(signal_); }
double JointMap::idler_step() const noexcept { return mean_step(idler_); }

std::pair<std::size_t, std::size_t> JointMap::argmax() const {
    const auto k = static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin());
    return {k / idler_.size(), k % idler_.size()};
}

double JointMap::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

JointMap JointMap::normalized() const {
    const double m = max_value();
    if (!(m > 0.0)) throw DomainError("cannot normalize an all-zero map");
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), [m](double x) { return x / m; });
    return JointMap(signal_, idler_, std::move(v), MapUnits::normalized, metadata_);
}

JointMap JointMap::with_metadata(std::string metadata) const {
    JointMap copy = *this;
    copy.metadata_ = single_line(std::move(metadata));
    return copy;
}

JointMap JointMap::transposed() const {
    std::vector<double> v(values_.size());
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t c = 0; c < cols(); ++c) v[c * rows() + r] = at(r, c);
    }
    return JointMap(idler_, signal_, std::move(v), units_, metadata_);
}

JointMap synthesize_sfg_map(const std::vector<double>& signal_axis, const std::vector<double>& idler_axis,
                            const WaveguideSpec& wg, const DispersionModel& model, const SynthesisOptions& options) {
    wg.validate();
    if (options.peak_efficiency_per_w && !(*options.peak_efficiency_per_w > 0.0)) {
        throw ConfigError("peak efficiency must be > 0");
    }
    auto modes = options.pump_modes;
    if (modes.empty()) modes.push_back({wg.pump_mode, 1.0});
    for (const auto& m : modes) {
        if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) throw ConfigError("pump mode weight must be >= 0");
        (void)model.mode_offset(m.mode, WaveguideSpec::pump_pol);
    }
    check_axis(signal_axis, "signal");
    check_axis(idler_axis, "idler");

    const std::size_t cols = idler_axis.size();
    std::vector<double> values(signal_axis.size() * cols, 0.0);
    parallel_rows(signal_axis.size(), options.threads, [&](std::size_t r) {
        WaveguideSpec spec = wg;
        const double ls = signal_axis[r];
        for (std::size_t c = 0; c < cols; ++c) {
            const double li = idler_axis[c];
            double sum = 0.0;
            for (const auto& m : modes) {
                spec.pump_mode = m.mode;
                try {
                    sum += m.weight * std::norm(inhomogeneous_amplitude(ls, li, spec, model));
                } catch (const DomainError& err) {
                    throw DomainError("at signal " + format_double(ls) + " nm, idler " + format_double(li) +
                                      " nm: " + err.what());
                }
            }
            values[r * cols + c] = sum;
        }
    });

    std::ostringstream meta;
    meta << "synthesized model=" << model.identifier() << " waveguide=" << wg.hash()
         << " L_mm=" << format_double(wg.length_mm) << " period_um=" << format_double(wg.poling_period_um)
         << " T_C=" << format_double(wg.temperature_c) << " pump_modes=";
    for (std::size_t k = 0; k < modes.size(); ++k) {
        meta << (k ? "," : "") << modes[k].mode << ':' << format_double(modes[k].weight);
    }

    if (options.peak_efficiency_per_w) {
        const double peak = *options.peak_efficiency_per_w;
        for (auto& v : values) v *= peak;
        meta << " peak_efficiency_per_w=" << format_double(peak);
        return JointMap(signal_axis, idler_axis, std::move(values), MapUnits::efficiency_per_watt, meta.str());
    }
    const double m = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    if (!(m > 0.0)) throw DomainError("synthesized map is identically zero");
    for (auto& v : values) v /= m;
    return JointMap(signal_axis, idler_axis, std::move(values), MapUnits::normalized, meta.str());
}

std::string format_map(const JointMap& map) {
    std::string out;
    out.reserve(map.values().size() * 12 + 256);
    out += kMagic;
    out += '\n';
    out += kUnitsPrefix;
    out += to_string(map.units());
    out += '\n';
    out += kMetaPrefix;
    out += map.metadata();
    out += '\n';
    for (const double li : map.idler_axis()) {
        out += '\t';
        out += format_double(li);
    }
    out += '\n';
    for (std::size_t r = 0; r < map.rows(); ++r) {
        out += format_double(map.signal_axis()[r]);
        for (const double v : map.row(r)) {
            out += '\t';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

JointMap parse_map(std::string_view text, const std::string& source) {
    auto lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    for (auto& l : lines) {
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    }
    if (lines.size() < 5) throw ParseError(source, lines.size() + 1, "truncated grid file (need header and at least one row)");
    if (lines[0] != kMagic) throw ParseError(source, 1, "expected '" + std::string(kMagic) + "'");
    if (lines[1].substr(0, kUnitsPrefix.size()) != kUnitsPrefix) throw ParseError(source, 2, "expected '# units: ...'");
    MapUnits units{};
    try {
        units = parse_map_units(lines[1].substr(kUnitsPrefix.size()));
    } catch (const ConfigError& err) {
        throw ParseError(source, 2, err.what());
    }
    if (lines[2].substr(0, kMetaPrefix.size()) != kMetaPrefix && lines[2] != "# meta:") {
        throw ParseError(source, 3, "expected '# meta: ...'");
    }
    const std::string metadata =
        lines[2].size() > kMetaPrefix.size() ? std::string(lines[2].substr(kMetaPrefix.size())) : std::string();

    const auto header = split(lines[3], '\t');
    if (header.size() < 2 || !header[0].empty()) {
        throw ParseError(source, 4, "axis line must start with an empty cell followed by idler wavelengths");
    }
    std::vector<double> idler;
    idler.reserve(header.size() - 1);
    for (std::size_t k = 1; k < header.size(); ++k) {
        const auto v = parse_double(header[k]);
        if (!v || !std::isfinite(*v)) throw ParseError(source, 4, "bad idler wavelength in column " + std::to_string(k));
        if (!idler.empty() && !(*v > idler.back())) {
            throw ParseError(source, 4, "idler axis not strictly increasing at column " + std::to_string(k));
        }
        idler.push_back(*v);
    }

    std::vector<double> signal;
    std::vector<double> values;
    signal.reserve(lines.size() - 4);
    values.reserve((lines.size() - 4) * idler.size());
    for (std::size_t li = 4; li < lines.size(); ++li) {
        const std::size_t line_no = li + 1;
        const auto cells = split(lines[li], '\t');
        if (cells.size() != idler.size() + 1) {
            throw ParseError(source, line_no, "ragged row: expected " + std::to_string(idler.size() + 1) +
                                                  " cells, found " + std::to_string(cells.size()));
        }
        const auto s = parse_double(cells[0]);
        if (!s || !std::isfinite(*s)) throw ParseError(source, line_no, "bad signal wavelength");
        if (!signal.empty() && !(*s > signal.back())) {
            throw ParseError(source, line_no, "signal axis not strictly increasing");
        }
        signal.push_back(*s);
        const std::size_t row = signal.size() - 1;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const auto v = parse_double(cells[c]);
            if (!v || !std::isfinite(*v)) {
                throw ParseError(source, line_no, "bad value at row " + std::to_string(row) + ", column " +
                                                      std::to_string(c - 1));
            }
            if (*v < 0.0) {
                throw ParseError(source, line_no, "negative value at row " + std::to_string(row) + ", column " +
                                                      std::to_string(c - 1));
            }
            values.push_back(*v);
        }
    }
    try {
        return JointMap(std::move(signal), std::move(idler), std::move(values), units, metadata);
    } catch (const DomainError& err) {
        throw ParseError(source, 0, err.what());
    }
}

void save_map(const JointMap& map, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write grid file: " + path.string());
    out << format_map(map);
    if (!out) throw ConfigError("failed writing grid file: " + path.string());
}

JointMap load_map(const std::filesystem::path& path) { return parse_map(read_text_file(path), path.string()); }

JointMap resample_bilinear(const JointMap& map, const std::vector<double>& signal_axis,
                           const std::vector<double>& idler_axis) {
    check_axis(signal_axis, "signal");
    check_axis(idler_axis, "idler");
    const auto locate = [](const std::vector<double>& axis, double x) -> std::pair<std::size_t, double> {
        if (axis.size() == 1 || x <= axis.front()) return {0, 0.0};
        if (x >= axis.back()) return {axis.size() - 2, 1.0};
        const auto it = std::upper_bound(axis.begin(), axis.end(), x);
        const auto k = static_cast<std::size_t>(it - axis.begin()) - 1;
        return {k, (x - axis[k]) / (axis[k + 1] - axis[k])};
    };
    std::vector<double> values(signal_axis.size() * idler_axis.size());
    for (std::size_t r = 0; r < signal_axis.size(); ++r) {
        const auto [i0, ti] = locate(map.signal_axis(), signal_axis[r]);
        const std::size_t i1 = map.rows() > 1 ? i0 + 1 : i0;
        for (std::size_t c = 0; c < idler_axis.size(); ++c) {
            const auto [j0, tj] = locate(map.idler_axis(), idler_axis[c]);
            const std::size_t j1 = map.cols() > 1 ? j0 + 1 : j0;
            const double v = (1 - ti) * (1 - tj) * map.at(i0, j0) + (1 - ti) * tj * map.at(i0, j1) +
                             ti * (1 - tj) * map.at(i1, j0) + ti * tj * map.at(i1, j1);
            values[r * idler_axis.size() + c] = v;
        }
    }
    std::string meta = map.metadata() + " resampled=bilinear";
    if (map.units() == MapUnits::normalized) {
        const double m = *std::max_element(values.begin(), values.end());
        if (!(m > 0.0)) throw DomainError("resampled map is identically zero");
        for (auto& v : values) v /= m;
    }
    return JointMap(signal_axis, idler_axis, std::move(values), map.units(), meta);
}

}  // namespace jsaforge
