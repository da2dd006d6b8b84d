#include <doctest.h>

#include <chrono>
#include <cmath>
#include <fstream>

#include "jsaforge/errors.hpp"
#include "jsaforge/sfgmap.hpp"
#include "test_support.hpp"

using namespace jsaforge;
using jsaforge::test::model;

namespace {

WaveguideSpec sample() { return WaveguideSpec{}; }

JointMap small_map() {
    return JointMap({1540, 1541, 1542}, {1540, 1540.5}, {0.1, 0.2, 0.3, 1.0, 0.0, 0.5}, MapUnits::normalized, "test");
}

std::string error_of(const std::string& text) {
    try {
        parse_map(text, "grid");
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("axes") {
    const auto a = make_axis(1536, 1548, 0.01);
    CHECK(a.size() == 1201);
    CHECK(a.front() == 1536);
    CHECK(a.back() == 1548);
    CHECK(a[500] == 1541.0);
    CHECK(make_axis(8.9, 9.7, 0.1)[3] == 9.2);
    CHECK(make_axis(1542, 1542, 1).size() == 1);
    CHECK_THROWS_AS(make_axis(1542, 1541, 1), ConfigError);
    CHECK_THROWS_AS(make_axis(1540, 1541, 0), ConfigError);
}

TEST_CASE("JointMap invariants") {
    CHECK_THROWS_AS(JointMap({1, 2}, {1}, {1.0, -0.1}, MapUnits::efficiency_per_watt), DomainError);
    CHECK_THROWS_AS(JointMap({2, 1}, {1}, {1.0, 0.5}, MapUnits::normalized), DomainError);
    CHECK_THROWS_AS(JointMap({1, 2}, {1}, {0.9, 0.5}, MapUnits::normalized), DomainError);
    CHECK_THROWS_AS(JointMap({1, 2}, {1}, {1.0}, MapUnits::normalized), DomainError);
    const auto m = small_map();
    CHECK(m.argmax() == std::pair<std::size_t, std::size_t>{1, 1});
    const auto t = m.transposed();
    CHECK(t.rows() == 2);
    CHECK(t.at(1, 1) == 1.0);
    CHECK(t.at(0, 2) == m.at(2, 0));
    const JointMap eff({1, 2}, {1}, {0.02, 0.01}, MapUnits::efficiency_per_watt);
    CHECK(eff.normalized().at(1, 0) == 0.5);
    CHECK(eff.normalized().units() == MapUnits::normalized);
}

TEST_CASE("grid files round-trip") {
    const std::vector<double> s{1540.0, 1541.0, 1542.0};
    const std::vector<double> i{1540.0, 1540.0 + 1.0 / 3.0};
    const JointMap m(s, i, {0.1, 2.0 / 3.0, 1e-300, 0.02, 0.0, 1.0 / 7.0}, MapUnits::efficiency_per_watt, "a b=c");
    const auto back = parse_map(format_map(m));
    CHECK(back.signal_axis() == m.signal_axis());
    CHECK(back.idler_axis() == m.idler_axis());
    CHECK(back.values() == m.values());
    CHECK(back.units() == m.units());
    CHECK(back.metadata() == m.metadata());
    CHECK(format_map(back) == format_map(m));

    jsaforge::test::TempDir dir("grid");
    const auto syn = synthesize_sfg_map(make_axis(1538, 1546, 0.5), make_axis(1538, 1546, 0.25), sample(), model(),
                                        {.peak_efficiency_per_w = 0.02});
    save_map(syn, dir.path() / "m.grid");
    const auto loaded = load_map(dir.path() / "m.grid");
    REQUIRE(loaded.values().size() == syn.values().size());
    for (std::size_t k = 0; k < syn.values().size(); ++k) CHECK(loaded.values()[k] == syn.values()[k]);
}

TEST_CASE("malformed grid files name the line") {
    const std::string head = "# jsaforge-map v1\n# units: normalized\n# meta: x\n\t1540\t1541\n";
    CHECK(error_of(head + "1540\t1\t0.5\n1541\t0.2\t-0.1\n").find("grid:6: negative value at row 1, column 1") != std::string::npos);
    CHECK(error_of(head + "1540\t1\t0.5\n1541\t0.2\n").find("grid:6: ragged row") != std::string::npos);
    CHECK(error_of(head + "1540\t1\tx\n").find("grid:5: bad value") != std::string::npos);
    CHECK(error_of("# jsaforge-map v2\n# units: normalized\n# meta: x\n\t1\n1\t1\n").find("grid:1:") != std::string::npos);
    CHECK(error_of("# jsaforge-map v1\n# units: watts\n# meta: x\n\t1\n1\t1\n").find("grid:2:") != std::string::npos);
    CHECK(error_of(head).find("grid:5: truncated") != std::string::npos);
    CHECK(error_of(head + "1541\t1\t0.5\n1540\t0.2\t0.1\n").find("grid:6:") != std::string::npos);
}

TEST_CASE("a 36 x 1401 grid loads in under a second") {
    const auto s = make_axis(1530, 1565, 1);
    const auto i = make_axis(1530, 1565, 0.025);
    REQUIRE(s.size() == 36);
    REQUIRE(i.size() == 1401);
    const auto m = synthesize_sfg_map(s, i, sample(), model(), {.peak_efficiency_per_w = 0.02});
    jsaforge::test::TempDir dir("perf");
    save_map(m, dir.path() / "scan.grid");
    const auto t0 = std::chrono::steady_clock::now();
    const auto back = load_map(dir.path() / "scan.grid");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(back.rows() == 36);
    CHECK(secs < 1.0);
}

TEST_CASE("synthesized map") {
    const auto ax = make_axis(1530, 1555, 0.1);
    const auto m = synthesize_sfg_map(ax, ax, sample(), model());
    CHECK(m.units() == MapUnits::normalized);
    CHECK(m.max_value() == 1.0);

    SUBCASE("ridge lies on delta_k = 0") {
        // For every signal row the brightest idler sample brackets the delta_k root.
        for (std::size_t r = 0; r < m.rows(); r += 10) {
            const auto row = m.row(r);
            const auto c = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
            if (c == 0 || c + 1 == m.cols()) continue;
            const double ls = ax[r];
            const double lo = delta_k(ls, ax[c - 1], sample(), model());
            const double hi = delta_k(ls, ax[c + 1], sample(), model());
            CHECK(std::signbit(lo) != std::signbit(hi));
        }
    }
    SUBCASE("phase-matched point gives the peak efficiency") {
        const auto d = degenerate_pm_wavelength(9.4, 220, sample(), model());
        const auto one = synthesize_sfg_map({d.wavelength_nm}, {d.wavelength_nm}, sample(), model(),
                                            {.peak_efficiency_per_w = 0.02});
        CHECK(one.at(0, 0) == doctest::Approx(0.02).epsilon(1e-15));
        CHECK(parse_map(format_map(one)).values().size() == 1);
    }
    SUBCASE("deterministic across thread counts") {
        const auto t4 = synthesize_sfg_map(ax, ax, sample(), model(), {.threads = 4});
        CHECK(t4.values() == m.values());
    }
}

TEST_CASE("two pump modes") {
    WaveguideSpec wg;
    wg.poling_period_um = 9.6;
    const auto ax = make_axis(1530, 1575, 0.1);
    const SynthesisOptions both{.peak_efficiency_per_w = 0.02, .pump_modes = {{"00", 1.0}, {"10", 0.1}}};
    const SynthesisOptions fund{.peak_efficiency_per_w = 0.02, .pump_modes = {{"00", 1.0}}};
    const SynthesisOptions hom{.peak_efficiency_per_w = 0.02, .pump_modes = {{"10", 0.1}}};
    const auto m = synthesize_sfg_map(ax, ax, wg, model(), both);
    const auto a = synthesize_sfg_map(ax, ax, wg, model(), fund);
    const auto b = synthesize_sfg_map(ax, ax, wg, model(), hom);
    for (std::size_t k = 0; k < m.values().size(); ++k) {
        CHECK(m.values()[k] == doctest::Approx(a.values()[k] + b.values()[k]).epsilon(1e-14));
    }
    CHECK(b.max_value() == doctest::Approx(0.1 * a.max_value()).epsilon(1e-3));
    CHECK_THROWS_AS(synthesize_sfg_map(ax, ax, wg, model(), {.pump_modes = {{"20", 1.0}}}), ConfigError);
}

TEST_CASE("bilinear resampling") {
    const auto m = small_map();
    const auto same = resample_bilinear(m, m.signal_axis(), m.idler_axis());
    CHECK(same.values() == m.values());
    const JointMap eff(m.signal_axis(), m.idler_axis(), m.values(), MapUnits::efficiency_per_watt);
    const auto mid = resample_bilinear(eff, {1540.5}, {1540.25});
    CHECK(mid.at(0, 0) == doctest::Approx((0.1 + 0.2 + 0.3 + 1.0) / 4));
    CHECK(mid.metadata().find("resampled") != std::string::npos);
}
