#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "jsaforge/dispersion.hpp"

namespace jsaforge {

// Bracket searched for degenerate phase matching.
inline constexpr double kDegenerateBracketLowNm = 1400.0;
inline constexpr double kDegenerateBracketHighNm = 1700.0;
// Preferred root when several sign changes exist in the bracket.
inline constexpr double kDegeneratePreferredNm = 1542.0;
// Residual |dk| accepted from the root finder, rad/um.
inline constexpr double kRootTolerance = 1e-10;

struct Segment {
    double fraction = 1.0;  // share of the length, in (0, 1]
    double delta_n = 0.0;   // effective-index perturbation
};

// Piecewise-constant index perturbation along z. Empty means homogeneous.
class InhomogeneityProfile {
public:
    InhomogeneityProfile() = default;
    explicit InhomogeneityProfile(std::vector<Segment> segments);

    bool homogeneous() const noexcept { return segments_.empty(); }
    const std::vector<Segment>& segments() const noexcept { return segments_; }

private:
    std::vector<Segment> segments_;
};

// Type-II convention: signal is H, idler is V, pump is H.
struct WaveguideSpec {
    double length_mm = 10.0;
    double poling_period_um = 9.4;
    double temperature_c = 220.0;
    double loss_h_db_cm = 0.0;
    double loss_v_db_cm = 0.0;
    std::string pump_mode{kFundamentalMode};
    std::string signal_mode{kFundamentalMode};
    std::string idler_mode{kFundamentalMode};
    InhomogeneityProfile inhomogeneity;

    static constexpr Polarization pump_pol = Polarization::H;
    static constexpr Polarization signal_pol = Polarization::H;
    static constexpr Polarization idler_pol = Polarization::V;

    void validate() const;

    // Keys: length_mm, poling_period_um, temperature_c, loss_h_db_cm,
    // loss_v_db_cm, pump_mode, signal_mode, idler_mode, and repeated
    // `segment = <fraction> <delta_n>`.
    static WaveguideSpec load(const std::filesystem::path& path);
    std::string to_text() const;
    std::string hash() const;

    // Power transmission over the full length, 10^(-loss L / 10).
    double transmission(Polarization pol) const;
};

// 1/lambda_p = 1/lambda_s + 1/lambda_i.
double pump_wavelength(double signal_nm, double idler_nm);

// First-order QPM mismatch in rad/um.
double delta_k(double signal_nm, double idler_nm, const WaveguideSpec& wg, const DispersionModel& model);

// Poling period (um) that zeroes delta_k at the given pair.
double matching_poling_period(double signal_nm, double idler_nm, const WaveguideSpec& wg,
                              const DispersionModel& model);

// exp(i dk L/2) sinc(dk L/2); dk in rad/um, L in mm.
std::complex<double> pm_amplitude(double delta_k_rad_um, double length_mm);

// Same response for a segmented waveguide. Each segment adds
// 2 pi delta_n / lambda_p to the local mismatch; phase is continuous across
// segment boundaries.
std::complex<double> profile_amplitude(double delta_k_rad_um, double pump_nm, double length_mm,
                                       const InhomogeneityProfile& profile);

std::complex<double> inhomogeneous_amplitude(double signal_nm, double idler_nm, const WaveguideSpec& wg,
                                             const DispersionModel& model);

struct DegenerateMatch {
    double wavelength_nm = 0.0;  // signal = idler
    double pump_nm = 0.0;
    double residual = 0.0;       // delta_k at the root, rad/um
    int roots_in_bracket = 0;
};

// Root of delta_k(l, l) in [1400, 1700] nm for the given period and
// temperature (modes from `wg`). Throws NoPhaseMatchingError when there is no
// sign change. With several roots the one closest to 1542 nm wins and a
// warning is emitted.
DegenerateMatch degenerate_pm_wavelength(double poling_period_um, double temp_c, const WaveguideSpec& wg,
                                         const DispersionModel& model);

// Sets the pump-mode offset so that degenerate phase matching lands at
// `target_pump_nm` for `wg`'s period and temperature. Returns the new model
// with the offset flagged as calibrated.
DispersionModel calibrate_pump_offset(const WaveguideSpec& wg, const DispersionModel& model,
                                      double target_pump_nm);

// FWHM of a sampled curve by linear interpolation at half the global maximum.
// With `central_lobe` only the contiguous region above half maximum around the
// peak is used, so side lobes above half never widen the result.
// Throws CurveTruncatedError when a half-maximum crossing is not on the grid.
double fwhm_bandwidth(std::span<const double> x, std::span<const double> y, bool central_lobe);

}  // namespace jsaforge
