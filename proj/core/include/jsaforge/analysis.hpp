#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "jsaforge/reconstruct.hpp"
#include "jsaforge/sfgmap.hpp"

namespace jsaforge {

// Minimum samples per FWHM along a principal cut.
inline constexpr double kMinCellsPerWidth = 8.0;
// Singular values below this fraction of the largest count as zero.
inline constexpr double kSchmidtCutoff = 1e-6;

// FWHM of 1-D cuts through the JSI peak along the two +/-45 degree
// directions of the (signal, idler) wavelength plane. The sum axis is the
// line of constant sum frequency (signal up, idler down); the diagonal axis
// is signal = idler.
struct PrincipalWidths {
    double along_sum_axis_nm = 0.0;
    double along_diagonal_axis_nm = 0.0;
    double w_r = 1.0;  // larger / smaller

    double major_nm() const noexcept { return std::max(along_sum_axis_nm, along_diagonal_axis_nm); }
    double minor_nm() const noexcept { return std::min(along_sum_axis_nm, along_diagonal_axis_nm); }
    bool major_is_sum_axis() const noexcept { return along_sum_axis_nm >= along_diagonal_axis_nm; }
};

PrincipalWidths principal_widths(const JointMap& jsi);

// sqrt(1 - (w^2 - 1)^2 / (w^2 + 1)^2). Ratios below 1 are inverted with a
// warning.
double purity_from_wr(double w_r);

struct SchmidtDecomposition {
    std::vector<double> coefficients;  // descending, sum 1
    double schmidt_number = 1.0;
    double purity = 1.0;
    std::size_t rank = 0;
};

// Amplitude sqrt(JSI * ds * di) with flat phase; the purity is therefore an
// upper limit for the true (phased) state.
SchmidtDecomposition schmidt_decompose(const JointMap& jsi);

// Decomposition of an already-weighted complex amplitude matrix.
SchmidtDecomposition schmidt_decompose(const Eigen::MatrixXcd& amplitude);
SchmidtDecomposition schmidt_decompose(const Eigen::MatrixXd& amplitude);

struct ReportOptions {
    std::optional<FilterSpec> signal_filter;
    std::optional<FilterSpec> idler_filter;
    double transmission_signal = 1.0;
    double transmission_idler = 1.0;
    StepAxis pair_rate_axis = StepAxis::finest;
    double pair_rate_window_sigmas = 3.0;
    std::vector<std::string> extra_flags;
};

struct JsaResult {
    JointMap jsi;
    Marginals marginals;
    PrincipalWidths widths;
    double purity_wr = 1.0;
    SchmidtDecomposition schmidt;
    std::optional<double> pair_rate;              // pairs / s / W, lossless
    std::optional<double> pair_rate_transmitted;  // times both transmissions
    std::vector<std::string> flags;
};

// Runs the reconstruction pipeline on an SFG map: pump weighting, optional
// filters, widths, purity, Schmidt analysis, marginals and (for calibrated
// maps) the pair rate.
JsaResult report(const JointMap& sfg_map, const PumpSpec& pump, const ReportOptions& options = {});

// `key = value` lines: width_major_nm, width_minor_nm, w_r, purity_wr,
// schmidt_K, purity_svd, flags and a few descriptive extras.
std::string format_report(const JsaResult& result);

}  // namespace jsaforge
