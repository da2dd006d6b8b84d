#include "jsaforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "jsaforge/diagnostics.hpp"
#include "jsaforge/errors.hpp"
#include "jsaforge/keyvalue.hpp"
#include "jsaforge/phasematch.hpp"

namespace jsaforge {

namespace {

// Cells whose intensity is below this fraction of the peak are dropped
// before the SVD when a whole row or column is that small.
constexpr double kCropFraction = 1e-16;

double bilinear(const JointMap& map, double s, double i) {
    const auto& sa = map.signal_axis();
    const auto& ia = map.idler_axis();
    const auto locate = [](const std::vector<double>& axis, double x, std::size_t& k, double& t) {
        const auto it = std::upper_bound(axis.begin(), axis.end(), x);
        k = std::min<std::size_t>(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - axis.begin() - 1, 0)),
                                  axis.size() - 2);
        t = (x - axis[k]) / (axis[k + 1] - axis[k]);
    };
    std::size_t r = 0, c = 0;
    double tr = 0.0, tc = 0.0;
    locate(sa, s, r, tr);
    locate(ia, i, c, tc);
    return (1 - tr) * (1 - tc) * map.at(r, c) + (1 - tr) * tc * map.at(r, c + 1) + tr * (1 - tc) * map.at(r + 1, c) +
           tr * tc * map.at(r + 1, c + 1);
}

double cut_width(const JointMap& jsi, std::size_t r0, std::size_t c0, double dir_s, double dir_i, const char* name) {
    const auto& sa = jsi.signal_axis();
    const auto& ia = jsi.idler_axis();
    const double ds = jsi.signal_step();
    const double di = jsi.idler_step();
    const double h = 0.25 * std::min(ds, di);
    const double s0 = sa[r0];
    const double i0 = ia[c0];
    const auto inside = [&](double t) {
        const double s = s0 + t * dir_s;
        const double i = i0 + t * dir_i;
        return s >= sa.front() && s <= sa.back() && i >= ia.front() && i <= ia.back();
    };
    long lo = 0, hi = 0;
    while (inside((lo - 1) * h)) --lo;
    while (inside((hi + 1) * h)) ++hi;
    std::vector<double> t, v;
    t.reserve(static_cast<std::size_t>(hi - lo + 1));
    v.reserve(t.capacity());
    for (long k = lo; k <= hi; ++k) {
        const double tk = k * h;
        t.push_back(tk);
        v.push_back(bilinear(jsi, s0 + tk * dir_s, i0 + tk * dir_i));
    }
    const double width = fwhm_bandwidth(t, v, true);
    const double spacing = std::abs(dir_s) * ds + std::abs(dir_i) * di;
    if (width / spacing < kMinCellsPerWidth) {
        throw ResolutionError(std::string("resolution insufficient: width along the ") + name + " axis is " +
                              format_double(width) + " nm, grid steps must be <= " +
                              format_double(width / kMinCellsPerWidth / (std::abs(dir_s) + std::abs(dir_i))) +
                              " nm for " + format_double(kMinCellsPerWidth) + " cells per FWHM");
    }
    return width;
}

SchmidtDecomposition from_singular_values(const Eigen::VectorXd& s) {
    SchmidtDecomposition out;
    if (s.size() == 0 || !(s(0) > 0.0)) throw DomainError("Schmidt decomposition undefined for an all-zero amplitude");
    const double cutoff = kSchmidtCutoff * s(0);
    double total = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) < cutoff) break;
        out.coefficients.push_back(s(k) * s(k));
        total += s(k) * s(k);
    }
    double sum_sq = 0.0;
    for (auto& l : out.coefficients) {
        l /= total;
        sum_sq += l * l;
    }
    out.rank = out.coefficients.size();
    out.purity = sum_sq;
    out.schmidt_number = 1.0 / sum_sq;
    return out;
}

}  // namespace

PrincipalWidths principal_widths(const JointMap& jsi) {
    if (jsi.rows() < 3 || jsi.cols() < 3) throw ResolutionError("resolution insufficient: JSI needs at least 3x3 cells");
    const auto [r0, c0] = jsi.argmax();
    const double u = 1.0 / std::numbers::sqrt2;
    PrincipalWidths w;
    w.along_sum_axis_nm = cut_width(jsi, r0, c0, u, -u, "sum-frequency");
    w.along_diagonal_axis_nm = cut_width(jsi, r0, c0, u, u, "diagonal");
    w.w_r = w.major_nm() / w.minor_nm();
    return w;
}

double purity_from_wr(double w_r) {
    if (!(w_r > 0.0) || !std::isfinite(w_r)) throw DomainError("width ratio must be positive and finite");
    if (w_r < 1.0) {
        warn("width ratio " + format_double(w_r) + " < 1, using its inverse");
        w_r = 1.0 / w_r;
    }
    const double w2 = w_r * w_r;
    const double q = (w2 - 1.0) / (w2 + 1.0);
    return std::sqrt(1.0 - q * q);
}

SchmidtDecomposition schmidt_decompose(const Eigen::MatrixXcd& amplitude) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(amplitude);
    return from_singular_values(svd.singularValues());
}

SchmidtDecomposition schmidt_decompose(const Eigen::MatrixXd& amplitude) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(amplitude);
    return from_singular_values(svd.singularValues());
}

SchmidtDecomposition schmidt_decompose(const JointMap& jsi) {
    const double peak = jsi.max_value();
    if (!(peak > 0.0)) throw DomainError("Schmidt decomposition undefined for an all-zero map");
    const double floor = kCropFraction * peak;
    std::vector<std::size_t> keep_r, keep_c;
    for (std::size_t r = 0; r < jsi.rows(); ++r) {
        const auto row = jsi.row(r);
        if (*std::max_element(row.begin(), row.end()) > floor) keep_r.push_back(r);
    }
    for (std::size_t c = 0; c < jsi.cols(); ++c) {
        for (std::size_t r = 0; r < jsi.rows(); ++r) {
            if (jsi.at(r, c) > floor) {
                keep_c.push_back(c);
                break;
            }
        }
    }
    const double weight = (jsi.rows() > 1 ? jsi.signal_step() : 1.0) * (jsi.cols() > 1 ? jsi.idler_step() : 1.0);
    Eigen::MatrixXd a(static_cast<Eigen::Index>(keep_r.size()), static_cast<Eigen::Index>(keep_c.size()));
    for (std::size_t r = 0; r < keep_r.size(); ++r) {
        for (std::size_t c = 0; c < keep_c.size(); ++c) {
            a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                std::sqrt(jsi.at(keep_r[r], keep_c[c]) * weight);
        }
    }
    return schmidt_decompose(a);
}

JsaResult report(const JointMap& sfg_map, const PumpSpec& pump, const ReportOptions& options) {
    auto jsi = apply_filters(jsi_from_sfg(sfg_map, pump), options.signal_filter, options.idler_filter);
    JsaResult result{jsi, marginals_of(jsi, options.transmission_signal, options.transmission_idler), {}, 1.0, {}, {}, {}, {}};
    result.widths = principal_widths(jsi);
    result.purity_wr = purity_from_wr(result.widths.w_r);
    result.schmidt = schmidt_decompose(jsi);

    result.flags.push_back("phase=flat");
    result.flags.push_back("purity=upper_limit");
    result.flags.push_back(std::string("major_axis=") + (result.widths.major_is_sum_axis() ? "sum_frequency" : "diagonal"));
    if (!options.signal_filter && !options.idler_filter) {
        result.flags.push_back("filters=none");
    } else {
        result.flags.push_back(std::string("filters=") + (options.signal_filter ? "signal" : "") +
                               (options.signal_filter && options.idler_filter ? "+" : "") +
                               (options.idler_filter ? "idler" : ""));
    }
    if (sfg_map.units() == MapUnits::efficiency_per_watt) {
        const double step = pair_rate_step(sfg_map, options.pair_rate_axis);
        result.pair_rate = pair_rate_from_sfg(sfg_map, step, pump, options.pair_rate_window_sigmas);
        result.pair_rate_transmitted = *result.pair_rate * options.transmission_signal * options.transmission_idler;
        result.flags.push_back("pair_rate_step_axis=" + std::string(to_string(options.pair_rate_axis)) + "(" +
                               format_double(step) + "nm)");
    } else {
        result.flags.push_back("pair_rate=unavailable(normalized map)");
    }
    for (const auto& f : options.extra_flags) result.flags.push_back(f);
    return result;
}

std::string format_report(const JsaResult& result) {
    std::ostringstream out;
    out << "width_major_nm = " << format_double(result.widths.major_nm()) << "\n"
        << "width_minor_nm = " << format_double(result.widths.minor_nm()) << "\n"
        << "width_sum_axis_nm = " << format_double(result.widths.along_sum_axis_nm) << "\n"
        << "width_diagonal_axis_nm = " << format_double(result.widths.along_diagonal_axis_nm) << "\n"
        << "w_r = " << format_double(result.widths.w_r) << "\n"
        << "purity_wr = " << format_double(result.purity_wr) << "\n"
        << "schmidt_K = " << format_double(result.schmidt.schmidt_number) << "\n"
        << "purity_svd = " << format_double(result.schmidt.purity) << "\n"
        << "schmidt_rank = " << result.schmidt.rank << "\n";
    if (result.pair_rate) {
        out << "pair_rate_per_s_per_w = " << format_double(*result.pair_rate) << "\n"
            << "pair_rate_transmitted_per_s_per_w = " << format_double(*result.pair_rate_transmitted) << "\n";
    }
    out << "flags = ";
    for (std::size_t k = 0; k < result.flags.size(); ++k) out << (k ? "; " : "") << result.flags[k];
    out << "\n";
    return out.str();
}

}  // namespace jsaforge
