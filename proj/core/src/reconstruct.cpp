#include "jsaforge/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jsaforge/errors.hpp"
#include "jsaforge/keyvalue.hpp"
#include "jsaforge/parallel.hpp"

namespace jsaforge {

namespace {

// Pump support beyond this many sigmas counts as absent.
constexpr double kSupportSigmas = 6.0;

double cell_width(const std::vector<double>& axis) {
    if (axis.size() < 2) return 1.0;
    return (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
}

double gaussian(double x, double center, double sigma) {
    const double u = (x - center) / sigma;
    return std::exp(-0.5 * u * u);
}

// Linear interpolation of (x, y) at q, zero outside [x.front(), x.back()].
double sample(const Spectrum& s, double q) {
    const auto& x = s.wavelength_nm;
    if (x.empty() || q < x.front() || q > x.back()) return 0.0;
    const auto it = std::lower_bound(x.begin(), x.end(), q);
    const auto k = static_cast<std::size_t>(it - x.begin());
    if (x[k] == q) return s.values[k];
    const double t = (q - x[k - 1]) / (x[k] - x[k - 1]);
    return (1.0 - t) * s.values[k - 1] + t * s.values[k];
}

Spectrum combine(const Spectrum& a, const Spectrum& b) {
    Spectrum out;
    if (a.wavelength_nm == b.wavelength_nm) {
        out.wavelength_nm = a.wavelength_nm;
        out.values.resize(a.values.size());
        for (std::size_t k = 0; k < a.values.size(); ++k) out.values[k] = a.values[k] + b.values[k];
        return out;
    }
    std::vector<double> axis = a.wavelength_nm;
    axis.insert(axis.end(), b.wavelength_nm.begin(), b.wavelength_nm.end());
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    out.wavelength_nm = axis;
    out.values.resize(axis.size());
    for (std::size_t k = 0; k < axis.size(); ++k) out.values[k] = sample(a, axis[k]) + sample(b, axis[k]);
    return out;
}

}  // namespace

void PumpSpec::validate() const {
    if (!(fwhm_nm > 0.0) || !std::isfinite(fwhm_nm)) throw ConfigError("pump fwhm must be > 0");
    if (!(center_nm >= kPumpBandLowNm && center_nm <= kPumpBandHighNm)) {
        throw ConfigError("pump center " + format_double(center_nm) + " nm outside [" + format_double(kPumpBandLowNm) +
                          ", " + format_double(kPumpBandHighNm) + "] nm");
    }
}

double PumpSpec::sigma_hz() const {
    return kSpeedOfLightNmPerS * fwhm_nm / (center_nm * center_nm) / kFwhmPerSigma;
}

double PumpSpec::density(double nu_hz) const {
    return gaussian(nu_hz, kSpeedOfLightNmPerS / center_nm, sigma_hz());
}

void FilterSpec::validate() const {
    if (!(fwhm_nm > 0.0) || !std::isfinite(fwhm_nm)) throw ConfigError("filter fwhm must be > 0");
    if (!std::isfinite(center_nm)) throw ConfigError("filter center must be finite");
}

double FilterSpec::transmission(double lambda_nm) const { return gaussian(lambda_nm, center_nm, sigma_nm()); }

PumpSpec make_pump(double center_nm, double fwhm_nm) {
    PumpSpec p;
    p.center_nm = center_nm;
    p.fwhm_nm = fwhm_nm;
    p.validate();
    return p;
}

FilterSpec make_filter(Arm arm, double center_nm, double fwhm_nm) {
    FilterSpec f;
    f.center_nm = center_nm;
    f.fwhm_nm = fwhm_nm;
    f.applies_to = arm;
    f.validate();
    return f;
}

std::string_view to_string(StepAxis axis) {
    switch (axis) {
        case StepAxis::signal: return "signal";
        case StepAxis::idler: return "idler";
        case StepAxis::finest: return "finest";
    }
    return "finest";
}

StepAxis parse_step_axis(std::string_view text) {
    if (text == "signal") return StepAxis::signal;
    if (text == "idler") return StepAxis::idler;
    if (text == "finest") return StepAxis::finest;
    throw ConfigError("unknown step axis '" + std::string(text) + "' (signal|idler|finest)");
}

double pair_rate_step(const JointMap& map, StepAxis axis) {
    const double s = map.rows() > 1 ? map.signal_step() : 0.0;
    const double i = map.cols() > 1 ? map.idler_step() : 0.0;
    switch (axis) {
        case StepAxis::signal: return s;
        case StepAxis::idler: return i;
        case StepAxis::finest:
            if (s == 0.0) return i;
            if (i == 0.0) return s;
            return std::min(s, i);
    }
    return 0.0;
}

double pair_rate_from_sfg(const JointMap& map, double step_nm, const PumpSpec& pump, double window_sigmas) {
    if (map.units() != MapUnits::efficiency_per_watt) {
        throw UncalibratedMapError("uncalibrated map: pair rate needs units efficiency_per_watt");
    }
    pump.validate();
    if (!(step_nm > 0.0)) throw ConfigError("pair rate step must be > 0");
    if (!(window_sigmas > 0.0)) throw ConfigError("pair rate window must be > 0 sigmas");
    const double lp = pump.center_nm;
    const double nu_p = kSpeedOfLightNmPerS / lp;
    const double window_hz = window_sigmas * pump.sigma_hz();
    double rate = 0.0;
    for (std::size_t r = 0; r < map.rows(); ++r) {
        const double ls = map.signal_axis()[r];
        for (std::size_t c = 0; c < map.cols(); ++c) {
            const double li = map.idler_axis()[c];
            const double nu = kSpeedOfLightNmPerS / ls + kSpeedOfLightNmPerS / li;
            if (std::abs(nu - nu_p) > window_hz) continue;
            rate += map.at(r, c) * (lp * lp) / (ls * li) * (kSpeedOfLightNmPerS * step_nm) / (ls * ls);
        }
    }
    return rate;
}

JointMap jsi_from_sfg(const JointMap& map, const PumpSpec& pump) {
    pump.validate();
    const auto& s = map.signal_axis();
    const auto& i = map.idler_axis();
    const double nu_lo = kSpeedOfLightNmPerS / s.back() + kSpeedOfLightNmPerS / i.back();
    const double nu_hi = kSpeedOfLightNmPerS / s.front() + kSpeedOfLightNmPerS / i.front();
    const double nu_p = kSpeedOfLightNmPerS / pump.center_nm;
    const double reach = kSupportSigmas * pump.sigma_hz();
    if (nu_p + reach < nu_lo || nu_p - reach > nu_hi) {
        throw DisjointSupportError("disjoint support: pump at " + format_double(pump.center_nm) +
                                   " nm does not overlap the map's sum-frequency range");
    }
    std::vector<double> values(map.values().size());
    for (std::size_t r = 0; r < map.rows(); ++r) {
        const double nu_s = kSpeedOfLightNmPerS / s[r];
        for (std::size_t c = 0; c < map.cols(); ++c) {
            const double nu = nu_s + kSpeedOfLightNmPerS / i[c];
            values[r * map.cols() + c] = pump.density(nu) * map.at(r, c);
        }
    }
    const double m = *std::max_element(values.begin(), values.end());
    if (!(m > 0.0)) throw DisjointSupportError("disjoint support: pump-weighted map is identically zero");
    for (auto& v : values) v /= m;
    std::ostringstream meta;
    meta << map.metadata() << " | jsi pump_center_nm=" << format_double(pump.center_nm)
         << " pump_fwhm_nm=" << format_double(pump.fwhm_nm) << " phase=flat(upper-limit purity)";
    return JointMap(s, i, std::move(values), MapUnits::normalized, meta.str());
}

JointMap apply_filters(const JointMap& jsi, const std::optional<FilterSpec>& signal_filter,
                       const std::optional<FilterSpec>& idler_filter) {
    if (!signal_filter && !idler_filter) return jsi;
    const auto check = [](const FilterSpec& f, const std::vector<double>& axis, const char* name) {
        f.validate();
        if ((f.applies_to == Arm::signal) != (std::string_view(name) == "signal")) {
            throw ConfigError(std::string("filter for the other arm passed as the ") + name + " filter");
        }
        if (f.center_nm < axis.front() || f.center_nm > axis.back()) {
            throw DomainError(std::string(name) + " filter center " + format_double(f.center_nm) +
                              " nm outside the map axis");
        }
    };
    std::vector<double> ts(jsi.rows(), 1.0);
    std::vector<double> ti(jsi.cols(), 1.0);
    std::ostringstream meta;
    meta << jsi.metadata() << " | filters";
    if (signal_filter) {
        check(*signal_filter, jsi.signal_axis(), "signal");
        for (std::size_t r = 0; r < ts.size(); ++r) ts[r] = signal_filter->transmission(jsi.signal_axis()[r]);
        meta << " signal=" << format_double(signal_filter->center_nm) << "/" << format_double(signal_filter->fwhm_nm);
    }
    if (idler_filter) {
        check(*idler_filter, jsi.idler_axis(), "idler");
        for (std::size_t c = 0; c < ti.size(); ++c) ti[c] = idler_filter->transmission(jsi.idler_axis()[c]);
        meta << " idler=" << format_double(idler_filter->center_nm) << "/" << format_double(idler_filter->fwhm_nm);
    }
    std::vector<double> values(jsi.values().size());
    for (std::size_t r = 0; r < jsi.rows(); ++r) {
        for (std::size_t c = 0; c < jsi.cols(); ++c) values[r * jsi.cols() + c] = jsi.at(r, c) * (ts[r] * ti[c]);
    }
    const double m = *std::max_element(values.begin(), values.end());
    if (!(m > 0.0)) throw DomainError("filtered JSI is identically zero");
    for (auto& v : values) v /= m;
    return JointMap(jsi.signal_axis(), jsi.idler_axis(), std::move(values), MapUnits::normalized, meta.str());
}

Spectrum Spectrum::normalized() const {
    Spectrum out = *this;
    const double m = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    if (!(m > 0.0)) throw DomainError("cannot normalize an all-zero spectrum");
    for (auto& v : out.values) v /= m;
    return out;
}

double Spectrum::integral() const {
    double sum = 0.0;
    for (const double v : values) sum += v;
    return sum * cell_width(wavelength_nm);
}

Marginals marginals_of(const JointMap& jsi, double transmission_signal, double transmission_idler) {
    Marginals m;
    m.transmission_signal = transmission_signal;
    m.transmission_idler = transmission_idler;
    const double ds = cell_width(jsi.signal_axis());
    const double di = cell_width(jsi.idler_axis());
    m.signal.wavelength_nm = jsi.signal_axis();
    m.signal.values.assign(jsi.rows(), 0.0);
    m.idler.wavelength_nm = jsi.idler_axis();
    m.idler.values.assign(jsi.cols(), 0.0);
    for (std::size_t r = 0; r < jsi.rows(); ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < jsi.cols(); ++c) row_sum += jsi.at(r, c);
        m.signal.values[r] = row_sum * di;
    }
    for (std::size_t c = 0; c < jsi.cols(); ++c) {
        double col_sum = 0.0;
        for (std::size_t r = 0; r < jsi.rows(); ++r) col_sum += jsi.at(r, c);
        m.idler.values[c] = col_sum * ds;
    }
    m.combined = combine(m.signal, m.idler);
    return m;
}

Marginals spdc_marginals(const JointMap& map, const PumpSpec& pump, const WaveguideSpec& wg) {
    return marginals_of(jsi_from_sfg(map, pump), wg.transmission(WaveguideSpec::signal_pol),
                        wg.transmission(WaveguideSpec::idler_pol));
}

StackedSpectra pump_sweep(const JointMap& map, const std::vector<double>& pump_centers_nm, double pump_fwhm_nm,
                          const std::optional<MaskOptions>& mask, unsigned threads) {
    if (pump_centers_nm.empty()) throw ConfigError("pump sweep needs at least one pump center");
    for (const double c : pump_centers_nm) make_pump(c, pump_fwhm_nm);
    if (mask && !(mask->half_width_nm >= 0.0)) throw ConfigError("mask half width must be >= 0");

    StackedSpectra out;
    out.pump_nm = pump_centers_nm;
    std::vector<Spectrum> rows(pump_centers_nm.size());
    parallel_rows(rows.size(), threads, [&](std::size_t r) {
        const auto m = marginals_of(jsi_from_sfg(map, make_pump(pump_centers_nm[r], pump_fwhm_nm)));
        rows[r] = m.combined.normalized();
    });
    out.emission_nm = rows.front().wavelength_nm;
    out.values.reserve(rows.size() * out.emission_nm.size());
    out.present.reserve(rows.size() * out.emission_nm.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double degenerate = 2.0 * pump_centers_nm[r];
        for (std::size_t c = 0; c < out.emission_nm.size(); ++c) {
            const bool masked = mask && std::abs(out.emission_nm[c] - degenerate) <= mask->half_width_nm;
            out.values.push_back(rows[r].values[c]);
            out.present.push_back(masked ? 0 : 1);
        }
    }
    return out;
}

std::vector<double> find_peaks(const Spectrum& spectrum, double min_fraction) {
    const auto& x = spectrum.wavelength_nm;
    const auto& y = spectrum.values;
    std::vector<double> peaks;
    if (y.size() < 3) return peaks;
    const double threshold = min_fraction * *std::max_element(y.begin(), y.end());
    for (std::size_t k = 1; k + 1 < y.size(); ++k) {
        if (!(y[k] >= threshold && y[k] >= y[k - 1] && y[k] > y[k + 1])) continue;
        // Vertex of the parabola through the three samples.
        const double x0 = x[k - 1], x1 = x[k], x2 = x[k + 1];
        const double y0 = y[k - 1], y1 = y[k], y2 = y[k + 1];
        const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
        const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
        const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
        peaks.push_back(a < 0.0 ? -b / (2.0 * a) : x1);
    }
    return peaks;
}

}  // namespace jsaforge
