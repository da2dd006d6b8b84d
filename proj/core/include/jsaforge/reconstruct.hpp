#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "jsaforge/sfgmap.hpp"

namespace jsaforge {

// Speed of light in nm/s.
inline constexpr double kSpeedOfLightNmPerS = 2.99792458e17;
inline constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

// Pump centers accepted by PumpSpec (the multimode pump band).
inline constexpr double kPumpBandLowNm = 725.0;
inline constexpr double kPumpBandHighNm = 825.0;

// Gaussian spectral line, width given as intensity FWHM in nm.
struct GaussianLine {
    double center_nm = 0.0;
    double fwhm_nm = 0.0;

    static GaussianLine from_sigma(double center_nm, double sigma_nm) {
        return {center_nm, sigma_nm * kFwhmPerSigma};
    }
    double sigma_nm() const noexcept { return fwhm_nm / kFwhmPerSigma; }
};

// Pump power spectral density; Gaussian in frequency around c / center.
struct PumpSpec : GaussianLine {
    void validate() const;
    // Standard deviation in Hz of the density at the sum frequency.
    double sigma_hz() const;
    // Peak-normalized density at optical frequency `nu_hz`.
    double density(double nu_hz) const;
};

enum class Arm { signal, idler };

// Gaussian transmission in wavelength.
struct FilterSpec : GaussianLine {
    Arm applies_to = Arm::signal;
    void validate() const;
    double transmission(double lambda_nm) const;
};

PumpSpec make_pump(double center_nm, double fwhm_nm);
FilterSpec make_filter(Arm arm, double center_nm, double fwhm_nm);

enum class StepAxis { signal, idler, finest };
std::string_view to_string(StepAxis axis);
StepAxis parse_step_axis(std::string_view text);

// Scan step entering the pair-rate sum for `axis`.
double pair_rate_step(const JointMap& map, StepAxis axis);

// Pair rate per pump watt:
//   sum_j eta_j lambda_p^2 / (ls_j li_j) * c step / ls_j^2
// over cells whose sum frequency lies within `window_sigmas` pump sigmas of
// the pump center. Throws UncalibratedMapError for normalized maps.
double pair_rate_from_sfg(const JointMap& map, double step_nm, const PumpSpec& pump, double window_sigmas = 3.0);

// JSI(ls, li) = S_pump(c/ls + c/li) * map(ls, li), peak-normalized.
JointMap jsi_from_sfg(const JointMap& map, const PumpSpec& pump);

// Multiplies by the Gaussian transmissions of the given filters, then
// renormalizes. Missing filters are identity.
JointMap apply_filters(const JointMap& jsi, const std::optional<FilterSpec>& signal_filter,
                       const std::optional<FilterSpec>& idler_filter);

struct Spectrum {
    std::vector<double> wavelength_nm;
    std::vector<double> values;

    Spectrum normalized() const;
    double integral() const;  // trapezoid-free: sum(values) * mean step
};

// Marginal single-photon spectra. `signal`/`idler` are sum_j JSI * step of the
// other axis; `combined` adds both on the union of the two axes. The power
// transmissions are overall factors kept apart from the shapes.
struct Marginals {
    Spectrum signal;
    Spectrum idler;
    Spectrum combined;
    double transmission_signal = 1.0;
    double transmission_idler = 1.0;
};

Marginals marginals_of(const JointMap& jsi, double transmission_signal = 1.0, double transmission_idler = 1.0);

Marginals spdc_marginals(const JointMap& map, const PumpSpec& pump, const WaveguideSpec& wg);

struct MaskOptions {
    // Emission within +/- half_width_nm of 2 * pump center is marked absent.
    double half_width_nm = 3.0;
};

// Rows are combined marginals (peak-normalized) per pump center, in the
// order given. Masked cells have present[k] == false.
struct StackedSpectra {
    std::vector<double> pump_nm;
    std::vector<double> emission_nm;
    std::vector<double> values;
    std::vector<unsigned char> present;

    std::size_t rows() const noexcept { return pump_nm.size(); }
    std::size_t cols() const noexcept { return emission_nm.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    bool is_present(std::size_t r, std::size_t c) const { return present[r * cols() + c] != 0; }
};

StackedSpectra pump_sweep(const JointMap& map, const std::vector<double>& pump_centers_nm, double pump_fwhm_nm,
                          const std::optional<MaskOptions>& mask = std::nullopt, unsigned threads = 1);

// Peak wavelengths (parabolic refinement) of local maxima above
// `min_fraction` of the spectrum maximum, ascending in wavelength.
std::vector<double> find_peaks(const Spectrum& spectrum, double min_fraction = 0.5);

}  // namespace jsaforge
