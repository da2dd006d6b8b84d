#include "jsaforge/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <sstream>

#include "jsaforge/diagnostics.hpp"
#include "jsaforge/errors.hpp"
#include "jsaforge/keyvalue.hpp"

namespace jsaforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFractionTolerance = 1e-12;
constexpr double kScanStepNm = 1.0;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// Closed form of int_0^len exp(i q z) dz.
std::complex<double> segment_integral(double q, double len) {
    const double half = 0.5 * q * len;
    return std::polar(len * sinc(half), half);
}

}  // namespace

InhomogeneityProfile::InhomogeneityProfile(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) return;
    double total = 0.0;
    for (const auto& s : segments_) {
        if (!(s.fraction > 0.0 && s.fraction <= 1.0)) {
            throw ConfigError("inhomogeneity segment fraction " + format_double(s.fraction) + " outside (0, 1]");
        }
        if (!std::isfinite(s.delta_n)) throw ConfigError("inhomogeneity segment delta_n is not finite");
        total += s.fraction;
    }
    if (std::abs(total - 1.0) > kFractionTolerance) {
        throw ConfigError("inhomogeneity segment fractions sum to " + format_double(total) + ", expected 1");
    }
}

void WaveguideSpec::validate() const {
    if (!(length_mm > 0.0) || !std::isfinite(length_mm)) throw ConfigError("waveguide length must be > 0");
    if (!(poling_period_um > 0.0) || !std::isfinite(poling_period_um)) {
        throw ConfigError("poling period must be > 0");
    }
    if (!(loss_h_db_cm >= 0.0) || !(loss_v_db_cm >= 0.0)) throw ConfigError("losses must be >= 0");
    if (!std::isfinite(temperature_c)) throw ConfigError("temperature must be finite");
}

WaveguideSpec WaveguideSpec::load(const std::filesystem::path& path) {
    const auto kv = KeyValueFile::load(path);
    kv.reject_unknown({"length_mm", "poling_period_um", "temperature_c", "loss_h_db_cm", "loss_v_db_cm",
                       "pump_mode", "signal_mode", "idler_mode", "segment", "description"});
    WaveguideSpec wg;
    wg.length_mm = kv.require_double("length_mm");
    wg.poling_period_um = kv.require_double("poling_period_um");
    wg.temperature_c = kv.require_double("temperature_c");
    wg.loss_h_db_cm = kv.get_double("loss_h_db_cm").value_or(0.0);
    wg.loss_v_db_cm = kv.get_double("loss_v_db_cm").value_or(0.0);
    wg.pump_mode = kv.get_string("pump_mode").value_or(std::string(kFundamentalMode));
    wg.signal_mode = kv.get_string("signal_mode").value_or(std::string(kFundamentalMode));
    wg.idler_mode = kv.get_string("idler_mode").value_or(std::string(kFundamentalMode));

    std::vector<Segment> segments;
    for (const auto* e : kv.find_all("segment")) {
        const auto parts = split(trim(e->value), ' ');
        std::vector<double> nums;
        for (const auto p : parts) {
            if (trim(p).empty()) continue;
            const auto v = parse_double(p);
            if (!v) kv.fail(*e, "bad number '" + std::string(p) + "'");
            nums.push_back(*v);
        }
        if (nums.size() != 2) kv.fail(*e, "expected '<fraction> <delta_n>'");
        segments.push_back({nums[0], nums[1]});
    }
    try {
        wg.inhomogeneity = InhomogeneityProfile(std::move(segments));
        wg.validate();
    } catch (const ConfigError& err) {
        throw ConfigError(kv.source() + ": " + err.what());
    }
    return wg;
}

std::string WaveguideSpec::to_text() const {
    std::ostringstream out;
    out << "length_mm = " << format_double(length_mm) << "\n"
        << "poling_period_um = " << format_double(poling_period_um) << "\n"
        << "temperature_c = " << format_double(temperature_c) << "\n"
        << "loss_h_db_cm = " << format_double(loss_h_db_cm) << "\n"
        << "loss_v_db_cm = " << format_double(loss_v_db_cm) << "\n"
        << "pump_mode = " << pump_mode << "\n"
        << "signal_mode = " << signal_mode << "\n"
        << "idler_mode = " << idler_mode << "\n";
    for (const auto& s : inhomogeneity.segments()) {
        out << "segment = " << format_double(s.fraction) << ' ' << format_double(s.delta_n) << "\n";
    }
    return out.str();
}

std::string WaveguideSpec::hash() const { return hex64(fnv1a64(to_text())); }

double WaveguideSpec::transmission(Polarization pol) const {
    const double loss = pol == Polarization::H ? loss_h_db_cm : loss_v_db_cm;
    return std::pow(10.0, -loss * (length_mm * 0.1) / 10.0);
}

double pump_wavelength(double signal_nm, double idler_nm) { return 1.0 / (1.0 / signal_nm + 1.0 / idler_nm); }

double delta_k(double signal_nm, double idler_nm, const WaveguideSpec& wg, const DispersionModel& model) {
    const double pump_nm = pump_wavelength(signal_nm, idler_nm);
    const double t = wg.temperature_c;
    const double np = effective_index(wg.pump_mode, WaveguideSpec::pump_pol, pump_nm, t, model);
    const double ns = effective_index(wg.signal_mode, WaveguideSpec::signal_pol, signal_nm, t, model);
    const double ni = effective_index(wg.idler_mode, WaveguideSpec::idler_pol, idler_nm, t, model);
    // Wavelengths to um so the result is rad/um.
    return kTwoPi * (np / (pump_nm * 1e-3) - ns / (signal_nm * 1e-3) - ni / (idler_nm * 1e-3) -
                     1.0 / wg.poling_period_um);
}

double matching_poling_period(double signal_nm, double idler_nm, const WaveguideSpec& wg,
                              const DispersionModel& model) {
    WaveguideSpec no_grating = wg;
    no_grating.poling_period_um = std::numeric_limits<double>::infinity();
    const double mismatch = delta_k(signal_nm, idler_nm, no_grating, model) / kTwoPi;
    if (!(mismatch > 0.0)) throw DomainError("material mismatch is not positive; no first-order QPM period");
    return 1.0 / mismatch;
}

std::complex<double> pm_amplitude(double delta_k_rad_um, double length_mm) {
    const double half = 0.5 * delta_k_rad_um * length_mm * 1e3;
    return std::exp(std::complex<double>(0.0, half)) * sinc(half);
}

std::complex<double> profile_amplitude(double delta_k_rad_um, double pump_nm, double length_mm,
                                       const InhomogeneityProfile& profile) {
    if (profile.homogeneous()) return pm_amplitude(delta_k_rad_um, length_mm);
    const double length_um = length_mm * 1e3;
    const double k_scale = kTwoPi / (pump_nm * 1e-3);
    std::complex<double> sum{0.0, 0.0};
    double phase = 0.0;
    for (const auto& seg : profile.segments()) {
        const double len = seg.fraction * length_um;
        const double q = delta_k_rad_um + k_scale * seg.delta_n;
        sum += std::polar(1.0, phase) * segment_integral(q, len);
        phase += q * len;
    }
    return sum / length_um;
}

std::complex<double> inhomogeneous_amplitude(double signal_nm, double idler_nm, const WaveguideSpec& wg,
                                             const DispersionModel& model) {
    const double dk = delta_k(signal_nm, idler_nm, wg, model);
    return profile_amplitude(dk, pump_wavelength(signal_nm, idler_nm), wg.length_mm, wg.inhomogeneity);
}

DegenerateMatch degenerate_pm_wavelength(double poling_period_um, double temp_c, const WaveguideSpec& wg,
                                         const DispersionModel& model) {
    WaveguideSpec spec = wg;
    spec.poling_period_um = poling_period_um;
    spec.temperature_c = temp_c;
    spec.validate();
    const auto f = [&](double l) { return delta_k(l, l, spec, model); };

    std::vector<double> roots;
    double lo = kDegenerateBracketLowNm;
    double f_lo = f(lo);
    const int steps = static_cast<int>(std::lround((kDegenerateBracketHighNm - kDegenerateBracketLowNm) / kScanStepNm));
    for (int k = 1; k <= steps; ++k) {
        const double hi = kDegenerateBracketLowNm + k * kScanStepNm;
        const double f_hi = f(hi);
        if (f_lo == 0.0) {
            roots.push_back(lo);
        } else if (std::signbit(f_lo) != std::signbit(f_hi) && f_hi != 0.0) {
            double a = lo, b = hi, fa = f_lo;
            for (int it = 0; it < 200; ++it) {
                const double m = std::midpoint(a, b);
                if (m == a || m == b) break;
                const double fm = f(m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if (std::signbit(fm) == std::signbit(fa)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(std::abs(f(a)) <= std::abs(f(b)) ? a : b);
        }
        lo = hi;
        f_lo = f_hi;
    }
    if (f_lo == 0.0) roots.push_back(lo);

    if (roots.empty()) {
        throw NoPhaseMatchingError("no phase matching in band [" + format_double(kDegenerateBracketLowNm) + ", " +
                                   format_double(kDegenerateBracketHighNm) + "] nm for period " +
                                   format_double(poling_period_um) + " um at " + format_double(temp_c) + " C");
    }
    const auto best = *std::min_element(roots.begin(), roots.end(), [](double a, double b) {
        return std::abs(a - kDegeneratePreferredNm) < std::abs(b - kDegeneratePreferredNm);
    });
    if (roots.size() > 1) {
        warn("degenerate phase matching has " + std::to_string(roots.size()) + " roots in band; using " +
             format_double(best) + " nm");
    }
    DegenerateMatch match;
    match.wavelength_nm = best;
    match.pump_nm = 0.5 * best;
    match.residual = f(best);
    match.roots_in_bracket = static_cast<int>(roots.size());
    if (!(std::abs(match.residual) < kRootTolerance)) {
        throw DomainError("degenerate root did not converge: |dk| = " + format_double(std::abs(match.residual)));
    }
    return match;
}

DispersionModel calibrate_pump_offset(const WaveguideSpec& wg, const DispersionModel& model, double target_pump_nm) {
    const double l = 2.0 * target_pump_nm;
    const double current = model.mode_offset(wg.pump_mode, WaveguideSpec::pump_pol);
    // delta_k is affine in the offset. The slope is measured rather than
    // taken as 2 pi / lambda_p because the signal may share the pump's
    // (mode, polarization) entry.
    const double residual = delta_k(l, l, wg, model);
    const double probe = 1e-3;
    const auto shifted = model.with_mode_offset(wg.pump_mode, WaveguideSpec::pump_pol, current + probe, false);
    const double slope = (delta_k(l, l, wg, shifted) - residual) / probe;
    if (!(std::abs(slope) > 0.0)) throw DomainError("calibration: phase mismatch does not depend on the pump offset");
    const double offset = current - residual / slope;
    return model.with_mode_offset(wg.pump_mode, WaveguideSpec::pump_pol, offset, true);
}

double fwhm_bandwidth(std::span<const double> x, std::span<const double> y, bool central_lobe) {
    if (x.size() != y.size()) throw DomainError("fwhm_bandwidth: x and y sizes differ");
    if (x.size() < 3) throw CurveTruncatedError("curve truncated: fewer than 3 samples");
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) throw DomainError("fwhm_bandwidth: x must be strictly increasing");
    }
    const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    const double half = 0.5 * y[peak];
    if (!(half > 0.0)) throw DomainError("fwhm_bandwidth: curve maximum is not positive");

    const auto cross = [&](std::size_t below, std::size_t above) {
        return x[below] + (half - y[below]) * (x[above] - x[below]) / (y[above] - y[below]);
    };

    std::size_t left = peak;
    std::size_t right = peak;
    if (central_lobe) {
        // contiguous region above half maximum around the peak
        while (left > 0 && y[left - 1] >= half) --left;
        while (right + 1 < y.size() && y[right + 1] >= half) ++right;
    } else {
        left = static_cast<std::size_t>(std::find_if(y.begin(), y.end(), [&](double v) { return v >= half; }) - y.begin());
        right = y.size() - 1 -
                static_cast<std::size_t>(std::find_if(y.rbegin(), y.rend(), [&](double v) { return v >= half; }) - y.rbegin());
    }
    if (left == 0 || right + 1 == y.size()) {
        throw CurveTruncatedError("curve truncated: half maximum not bracketed within the grid");
    }
    return cross(right + 1, right) - cross(left - 1, left);
}

}  // namespace jsaforge
