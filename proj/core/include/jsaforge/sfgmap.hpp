#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jsaforge/dispersion.hpp"
#include "jsaforge/phasematch.hpp"

namespace jsaforge {

enum class MapUnits { efficiency_per_watt, normalized };

std::string_view to_string(MapUnits units);
MapUnits parse_map_units(std::string_view text);

// Inclusive [start, stop] with a fixed step; the last sample snaps to `stop`
// when it lies within 1e-9 step of it.
std::vector<double> make_axis(double start_nm, double stop_nm, double step_nm);

// Rectangular (signal x idler) grid of nonnegative values. Rows follow the
// signal axis, columns the idler axis. Axes may have different spacing.
class JointMap {
public:
    JointMap(std::vector<double> signal_axis, std::vector<double> idler_axis, std::vector<double> values,
             MapUnits units, std::string metadata = {});

    std::size_t rows() const noexcept { return signal_.size(); }
    std::size_t cols() const noexcept { return idler_.size(); }
    const std::vector<double>& signal_axis() const noexcept { return signal_; }
    const std::vector<double>& idler_axis() const noexcept { return idler_; }
    const std::vector<double>& values() const noexcept { return values_; }
    MapUnits units() const noexcept { return units_; }
    const std::string& metadata() const noexcept { return metadata_; }

    double at(std::size_t row, std::size_t col) const { return values_[row * idler_.size() + col]; }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values_).subspan(r * idler_.size(), idler_.size());
    }

    // Mean spacing of each axis (0 for a single sample).
    double signal_step() const noexcept;
    double idler_step() const noexcept;

    std::pair<std::size_t, std::size_t> argmax() const;
    double max_value() const;

    // Divides by the maximum; max becomes exactly 1. Throws DomainError for an
    // all-zero map.
    JointMap normalized() const;

    JointMap with_metadata(std::string metadata) const;
    // Signal and idler exchanged (values transposed).
    JointMap transposed() const;

private:
    std::vector<double> signal_;
    std::vector<double> idler_;
    std::vector<double> values_;
    MapUnits units_;
    std::string metadata_;
};

struct PumpModeWeight {
    std::string mode;
    double weight = 1.0;
};

struct SynthesisOptions {
    // Peak SFG efficiency in 1/W (0.02 = 2 %/W). Absent means a normalized map.
    std::optional<double> peak_efficiency_per_w;
    // Pump modes with relative efficiency weights. Empty means wg.pump_mode
    // with weight 1.
    std::vector<PumpModeWeight> pump_modes;
    unsigned threads = 1;
};

// values(i, j) = peak * sum_m w_m |a_m(lambda_s(i), lambda_i(j))|^2.
JointMap synthesize_sfg_map(const std::vector<double>& signal_axis, const std::vector<double>& idler_axis,
                            const WaveguideSpec& wg, const DispersionModel& model,
                            const SynthesisOptions& options = {});

// Grid file format, see README.
std::string format_map(const JointMap& map);
JointMap parse_map(std::string_view text, const std::string& source = "<string>");
void save_map(const JointMap& map, const std::filesystem::path& path);
JointMap load_map(const std::filesystem::path& path);

// Bilinear resampling onto new axes (clamped at the edges). Flags itself in
// the metadata.
JointMap resample_bilinear(const JointMap& map, const std::vector<double>& signal_axis,
                           const std::vector<double>& idler_axis);

}  // namespace jsaforge
