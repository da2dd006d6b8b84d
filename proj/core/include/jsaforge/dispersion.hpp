#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace jsaforge {

// H couples to the ordinary index, V to the extraordinary index (z-cut,
// propagation along y).
enum class Polarization { H, V };

std::string_view to_string(Polarization pol);
Polarization parse_polarization(std::string_view text);

// Valid evaluation box for every index function.
inline constexpr double kMinWavelengthNm = 400.0;
inline constexpr double kMaxWavelengthNm = 2100.0;
inline constexpr double kMinTemperatureC = 20.0;
inline constexpr double kMaxTemperatureC = 300.0;

// Central-difference step used by group_index.
inline constexpr double kGroupIndexStepNm = 0.1;

inline constexpr std::string_view kFundamentalMode = "00";

// Temperature-dependent Sellmeier formula of the form
//   n^2 = a1 + (a2 + b1 F) / (lambda^2 - (a3 + b2 F)^2) + b3 F - a4 lambda^2
//   F   = (T - T0) (T + T0 + t_sum_offset)
// with lambda in um and T in degC.
struct SellmeierCoefficients {
    std::string source;  // file the coefficients were read from
    std::string formula;
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
    double reference_temperature_c = 24.5;
    double t_sum_offset = 546.0;

    static SellmeierCoefficients load(const std::filesystem::path& path);

    // Temperature term F; exactly zero at the reference temperature.
    double temperature_term(double temp_c) const;
    // Bulk index without range checks.
    double index(double lambda_nm, double temp_c) const;
};

struct ModeOffset {
    std::string mode;
    Polarization pol = Polarization::H;
    double delta_n = 0.0;
    bool calibrated = false;
};

class DispersionModel {
public:
    DispersionModel(SellmeierCoefficients ordinary, SellmeierCoefficients extraordinary,
                    std::vector<ModeOffset> offsets = {}, std::string source = {});

    // Model file: `sellmeier_o`, `sellmeier_e` (paths relative to the model
    // file) and repeated `mode = <label> <H|V> <delta_n> [calibrated]`.
    static DispersionModel load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    const SellmeierCoefficients& ordinary() const noexcept { return ordinary_; }
    const SellmeierCoefficients& extraordinary() const noexcept { return extraordinary_; }
    const SellmeierCoefficients& coefficients(Polarization pol) const noexcept {
        return pol == Polarization::H ? ordinary_ : extraordinary_;
    }
    const std::vector<ModeOffset>& mode_offsets() const noexcept { return offsets_; }
    double reference_temperature() const noexcept { return ordinary_.reference_temperature_c; }

    // Offset for (mode, pol). The fundamental mode defaults to 0; any other
    // unknown label throws ConfigError.
    double mode_offset(std::string_view mode, Polarization pol) const;

    // Copy with (mode, pol) set to `delta_n`, replacing an existing entry.
    DispersionModel with_mode_offset(std::string_view mode, Polarization pol, double delta_n,
                                     bool calibrated = false) const;

    // Every wave sees the extraordinary index; stand-in for a type-0 process.
    DispersionModel type0_proxy() const;

    // File names of the model and Sellmeier sources, for result metadata.
    std::string identifier() const;
    const std::string& source() const noexcept { return source_; }

private:
    SellmeierCoefficients ordinary_;
    SellmeierCoefficients extraordinary_;
    std::vector<ModeOffset> offsets_;
    std::string source_;
};

// Bulk index. Throws DomainError outside [400, 2100] nm or [20, 300] degC.
double refractive_index(Polarization pol, double lambda_nm, double temp_c, const DispersionModel& model);

double effective_index(std::string_view mode, Polarization pol, double lambda_nm, double temp_c,
                       const DispersionModel& model);

// n_g = n - lambda dn/dlambda by central difference with `step_nm`.
double group_index(Polarization pol, double lambda_nm, double temp_c, const DispersionModel& model,
                   double step_nm = kGroupIndexStepNm);
double group_index(std::string_view mode, Polarization pol, double lambda_nm, double temp_c,
                   const DispersionModel& model, double step_nm = kGroupIndexStepNm);

}  // namespace jsaforge
