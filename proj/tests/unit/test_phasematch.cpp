#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "jsaforge/errors.hpp"
#include "jsaforge/phasematch.hpp"
#include "test_support.hpp"

using namespace jsaforge;
using jsaforge::test::model;

namespace {

constexpr double kSincHalfMax = 1.39155737825151;       // sinc^2(x) = 1/2
constexpr double kFirstSideLobe = 0.04719044922581128;  // sinc^2 at tan x = x

WaveguideSpec sample(double length_mm = 10.0) {
    WaveguideSpec wg;
    wg.length_mm = length_mm;
    return wg;
}

// Intensity at the highest local maximum outside the central lobe, relative
// to the global peak.
double side_lobe_ratio(const std::vector<double>& y) {
    const auto peak = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    std::size_t lo = peak, hi = peak;
    while (lo > 0 && y[lo - 1] <= y[lo]) --lo;
    while (hi + 1 < y.size() && y[hi + 1] <= y[hi]) ++hi;
    double side = 0.0;
    for (std::size_t k = 0; k < lo; ++k) side = std::max(side, y[k]);
    for (std::size_t k = hi + 1; k < y.size(); ++k) side = std::max(side, y[k]);
    return side / y[peak];
}

std::vector<double> intensity_sweep(const InhomogeneityProfile& p, double length_mm, double span, int n) {
    std::vector<double> y;
    for (int k = 0; k <= n; ++k) {
        const double dk = -span + 2.0 * span * k / n;
        y.push_back(std::norm(profile_amplitude(dk, 771.0, length_mm, p)));
    }
    return y;
}

// Midpoint-rule evaluation of (1/L) * integral exp(i phi(z)) dz.
std::complex<double> quadrature(double dk, double pump_nm, double length_mm, const std::vector<Segment>& segs, int steps) {
    const double l = length_mm * 1e3;
    const double h = l / steps;
    const double kappa = 2.0 * std::numbers::pi / (pump_nm * 1e-3);
    std::complex<double> sum{0.0, 0.0};
    double phase = 0.0;
    double boundary = segs[0].fraction * l;
    std::size_t s = 0;
    for (int k = 0; k < steps; ++k) {
        const double z = (k + 0.5) * h;
        while (z > boundary && s + 1 < segs.size()) boundary += segs[++s].fraction * l;
        const double q = dk + kappa * segs[s].delta_n;
        sum += std::polar(1.0, phase + 0.5 * q * h);
        phase += q * h;
    }
    return sum * h / l;
}

std::vector<double> degenerate_curve(const WaveguideSpec& wg, const DispersionModel& m, double centre, double half,
                                     double step, std::vector<double>& x) {
    std::vector<double> y;
    x.clear();
    for (double l = centre - half; l <= centre + half; l += step) {
        x.push_back(l);
        y.push_back(std::norm(pm_amplitude(delta_k(l, l, wg, m), wg.length_mm)));
    }
    return y;
}

}  // namespace

TEST_CASE("pm_amplitude values") {
    CHECK(std::norm(pm_amplitude(0.0, 10.0)) == 1.0);
    const double l_um = 10e3;
    CHECK(std::norm(pm_amplitude(2.0 * std::numbers::pi / l_um, 10.0)) < 1e-28);
    double x = 4.493409457909064;
    CHECK(std::norm(pm_amplitude(2.0 * x / l_um, 10.0)) == doctest::Approx(kFirstSideLobe).epsilon(1e-10));
    CHECK(10.0 * std::log10(kFirstSideLobe) == doctest::Approx(-13.26).epsilon(0.05 / 13.26));
    // phase convention exp(i dk L / 2)
    CHECK(std::arg(pm_amplitude(1e-4, 10.0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sinc^2 FWHM in dk*L") {
    std::vector<double> x, y;
    const double l_mm = 10.0;
    for (int k = -4000; k <= 4000; ++k) {
        const double dk = k * 1e-6;
        x.push_back(dk);
        y.push_back(std::norm(pm_amplitude(dk, l_mm)));
    }
    const double w = fwhm_bandwidth(x, y, true) * l_mm * 1e3;
    CHECK(w == doctest::Approx(2.0 * 2.0 * kSincHalfMax).epsilon(1e-3));
}

TEST_CASE("Gaussian FWHM") {
    std::vector<double> x, y;
    const double sigma = 0.37;
    for (int k = -2000; k <= 2000; ++k) {
        x.push_back(k * 1e-3);
        y.push_back(std::exp(-0.5 * (k * 1e-3 / sigma) * (k * 1e-3 / sigma)));
    }
    CHECK(fwhm_bandwidth(x, y, false) == doctest::Approx(2.3548200450309493 * sigma).epsilon(1e-3));
    CHECK(fwhm_bandwidth(x, y, true) == doctest::Approx(2.3548200450309493 * sigma).epsilon(1e-3));
}

TEST_CASE("fwhm_bandwidth errors") {
    const std::vector<double> x{0, 1, 2, 3};
    CHECK_THROWS_AS(fwhm_bandwidth(x, std::vector<double>{1, 0.9, 0.8, 0.7}, true), CurveTruncatedError);
    CHECK_THROWS_AS(fwhm_bandwidth(x, std::vector<double>{0, 0, 0, 0}, true), DomainError);
    CHECK_THROWS_AS(fwhm_bandwidth(std::vector<double>{0, 2, 1}, std::vector<double>{0, 1, 0}, true), DomainError);
    // side lobe above half: central lobe ignores it, global crossing does not
    const std::vector<double> xs{0, 1, 2, 3, 4, 5, 6, 7, 8};
    const std::vector<double> ys{0, 0.6, 0.2, 0.4, 1.0, 0.4, 0.2, 0.0, 0.0};
    CHECK(fwhm_bandwidth(xs, ys, true) == doctest::Approx(5.0 / 3.0));
    CHECK(fwhm_bandwidth(xs, ys, false) > 3.0);
}

TEST_CASE("delta_k limits and root finding") {
    SUBCASE("index-degenerate limit") {
        auto flat = model().ordinary();
        flat.a2 = 0.0;
        flat.a4 = 0.0;
        flat.b1 = 0.0;
        const DispersionModel same(flat, flat);
        auto wg = sample();
        wg.poling_period_um = std::numeric_limits<double>::infinity();
        CHECK(std::abs(delta_k(1530, 1555, wg, same)) < 1e-12);
        CHECK(std::abs(delta_k(1500, 1600, wg, same)) < 1e-12);
    }
    SUBCASE("calibrated operating point") {
        const auto m = degenerate_pm_wavelength(9.4, 220, sample(), model());
        CHECK(m.wavelength_nm == doctest::Approx(1542).epsilon(2.0 / 1542));
        CHECK(m.pump_nm == doctest::Approx(771.0).epsilon(1e-9));
        CHECK(std::abs(m.residual) < kRootTolerance);
        CHECK(std::abs(delta_k(m.wavelength_nm, m.wavelength_nm, sample(), model())) < 1e-10);
    }
    SUBCASE("single sign change in a +-5 nm window") {
        const auto m = degenerate_pm_wavelength(9.4, 220, sample(), model());
        int changes = 0;
        double prev = delta_k(m.wavelength_nm - 5.0, m.wavelength_nm, sample(), model());
        for (double ls = m.wavelength_nm - 4.99; ls <= m.wavelength_nm + 5.0; ls += 0.01) {
            const double cur = delta_k(ls, m.wavelength_nm, sample(), model());
            if (std::signbit(cur) != std::signbit(prev)) ++changes;
            prev = cur;
        }
        CHECK(changes == 1);
    }
    SUBCASE("monotone in period and temperature") {
        for (double t : {180.0, 220.0, 260.0}) {
            double last = 0.0;
            for (int k = 0; k <= 8; ++k) {
                const double w = degenerate_pm_wavelength(8.9 + 0.1 * k, t, sample(), model()).wavelength_nm;
                CHECK(w > last);
                last = w;
            }
        }
        CHECK(degenerate_pm_wavelength(9.4, 240, sample(), model()).wavelength_nm <
              degenerate_pm_wavelength(9.4, 220, sample(), model()).wavelength_nm);
    }
    SUBCASE("pump-only offset shift") {
        auto wg = sample();
        wg.pump_mode = "10";
        const auto base = degenerate_pm_wavelength(9.4, 220, wg, model());
        const auto shifted_model = model().with_mode_offset("10", Polarization::H, model().mode_offset("10", Polarization::H) + 1e-3);
        const auto shifted = degenerate_pm_wavelength(9.4, 220, wg, shifted_model);
        CHECK(std::abs(shifted.wavelength_nm - base.wavelength_nm) > 1.0);
        CHECK(std::abs(shifted.residual) < kRootTolerance);
    }
    SUBCASE("no phase matching") {
        CHECK_THROWS_AS(degenerate_pm_wavelength(5.0, 220, sample(), model()), NoPhaseMatchingError);
    }
}

TEST_CASE("calibration pins the pump") {
    const auto bulk = jsaforge::test::bulk_model();
    auto wg = sample();
    const auto cal = calibrate_pump_offset(wg, bulk, 771.0);
    CHECK(cal.mode_offsets().back().calibrated);
    CHECK(degenerate_pm_wavelength(9.4, 220, wg, cal).pump_nm == doctest::Approx(771.0).epsilon(1e-12));
    // Shipped model agrees with a fresh calibration.
    CHECK(cal.mode_offset("00", Polarization::H) == doctest::Approx(model().mode_offset("00", Polarization::H)).epsilon(1e-10));

    wg.poling_period_um = 9.6;
    wg.pump_mode = "10";
    const auto hom = calibrate_pump_offset(wg, model().with_mode_offset("10", Polarization::H, 0.0), 771.0);
    CHECK(hom.mode_offset("10", Polarization::H) == doctest::Approx(model().mode_offset("10", Polarization::H)).epsilon(1e-8));
}

TEST_CASE("degenerate SFG bandwidth scales as 1/L") {
    std::vector<double> x10, x20;
    const auto y10 = degenerate_curve(sample(10), model(), 1542, 3.0, 0.001, x10);
    const auto y20 = degenerate_curve(sample(20), model(), 1542, 3.0, 0.001, x20);
    const double w10 = fwhm_bandwidth(x10, y10, true);
    const double w20 = fwhm_bandwidth(x20, y20, true);
    CHECK(w10 / w20 == doctest::Approx(2.0).epsilon(0.01));
    CHECK(w20 == doctest::Approx(0.43).epsilon(0.5));
}

TEST_CASE("type-II SFG is narrower than the type-0 proxy") {
    const auto t0 = model().type0_proxy();
    auto wg0 = sample(20);
    wg0.poling_period_um = matching_poling_period(1542, 1542, wg0, t0);
    CHECK(wg0.poling_period_um > 15.0);
    std::vector<double> x2, x0;
    const auto y2 = degenerate_curve(sample(20), model(), 1542, 3.0, 0.001, x2);
    const auto y0 = degenerate_curve(wg0, t0, 1542, 10.0, 0.001, x0);
    CHECK(fwhm_bandwidth(x2, y2, true) < fwhm_bandwidth(x0, y0, true));
}

TEST_CASE("inhomogeneity profiles") {
    SUBCASE("homogeneous limit is exact") {
        const InhomogeneityProfile empty;
        for (double dk : {-3e-3, -1e-4, 0.0, 2e-4, 5e-3}) {
            CHECK(profile_amplitude(dk, 771, 10, empty) == pm_amplitude(dk, 10));
        }
        auto wg = sample();
        CHECK(inhomogeneous_amplitude(1540, 1544, wg, model()) == pm_amplitude(delta_k(1540, 1544, wg, model()), 10));
    }
    SUBCASE("closed form matches quadrature") {
        const std::vector<Segment> segs{{0.3, 2e-5}, {0.45, -1e-5}, {0.25, 4e-5}};
        const InhomogeneityProfile p(segs);
        for (double dk : {-2e-3, -3e-4, 0.0, 1e-4, 7e-4}) {
            const auto a = profile_amplitude(dk, 771, 10, p);
            const auto b = quadrature(dk, 771, 10, segs, 10000);
            CHECK(std::abs(a - b) < 1e-8);
        }
    }
    SUBCASE("antisymmetric two-segment profile is symmetric in dk") {
        const InhomogeneityProfile p({{0.5, 3e-5}, {0.5, -3e-5}});
        for (double dk : {1e-4, 4e-4, 1.3e-3}) {
            CHECK(std::norm(profile_amplitude(dk, 771, 10, p)) ==
                  doctest::Approx(std::norm(profile_amplitude(-dk, 771, 10, p))).epsilon(1e-10));
        }
    }
    SUBCASE("fractions are validated") {
        CHECK_THROWS_AS(InhomogeneityProfile({{0.5, 0.0}, {0.4, 0.0}}), ConfigError);
        CHECK_THROWS_AS(InhomogeneityProfile({{0.0, 0.0}, {1.0, 0.0}}), ConfigError);
    }
    SUBCASE("nonzero profiles raise the side lobes") {
        const double span = 4e-3;
        const double hom = side_lobe_ratio(intensity_sweep({}, 10, span, 8000));
        CHECK(hom == doctest::Approx(kFirstSideLobe).epsilon(1e-3));
        std::mt19937_64 rng(20261015);
        std::uniform_real_distribution<double> frac(0.05, 0.95);
        std::uniform_real_distribution<double> dn(-5e-5, 5e-5);
        for (int trial = 0; trial < 40; ++trial) {
            const double f = frac(rng);
            double a = dn(rng), b = dn(rng);
            if (a == b) b += 1e-6;
            const InhomogeneityProfile p({{f, a}, {1.0 - f, b}});
            const auto y = intensity_sweep(p, 10, span + 1e-3, 10000);
            CHECK(*std::max_element(y.begin(), y.end()) <= 1.0 + 1e-12);
            CHECK(side_lobe_ratio(y) > hom);
        }
    }
}

TEST_CASE("waveguide spec") {
    auto wg = sample();
    wg.loss_h_db_cm = 0.6;
    CHECK(wg.transmission(Polarization::H) == doctest::Approx(std::pow(10.0, -0.06)));
    CHECK(wg.transmission(Polarization::V) == 1.0);
    wg.length_mm = -1;
    CHECK_THROWS_AS(wg.validate(), ConfigError);
    CHECK(sample().hash() == sample().hash());
    CHECK(sample(10).hash() != sample(20).hash());
    CHECK(pump_wavelength(1542, 1542) == doctest::Approx(771));
}
