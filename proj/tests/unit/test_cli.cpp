#include <doctest.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "jsaforge/phasematch.hpp"
#include "jsaforge/sfgmap.hpp"
#include "jsaforge_cli/commands.hpp"
#include "jsaforge_cli/config.hpp"
#include "test_support.hpp"

using namespace jsaforge;
using namespace jsaforge::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "jsaforge");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    Run r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

std::string sample_wg() { return "waveguide = " + (jsaforge::test::configs_dir() / "sample_10mm.wg").string() + "\n"; }

}  // namespace

TEST_CASE("pm-curve") {
    jsaforge::test::TempDir dir("cli-pm");
    const auto cfg = write(dir.path(), "a.cfg",
                           "command = pm-curve\nmodel = ti_ppln.model\n" + sample_wg() +
                               "poling_periods_um = 9.4\ntemperatures_c = 220\n");
    const auto r = run({"pm-curve", "--config", cfg.string(), "--out", (dir.path() / "out").string()});
    REQUIRE(r.code == kExitOk);
    const auto tsv = slurp(dir.path() / "out" / "pm_curve.tsv");
    const auto expect = degenerate_pm_wavelength(9.4, 220, WaveguideSpec::load(jsaforge::test::configs_dir() / "sample_10mm.wg"),
                                                 jsaforge::test::model());
    CHECK(tsv.find("9.4\t220\t" + format_double(expect.wavelength_nm) + "\t") != std::string::npos);
    CHECK(tsv.find("config_hash=") != std::string::npos);
    CHECK(tsv.find("model=ti_ppln.model[cln_o.sellmeier,cln_e.sellmeier]") != std::string::npos);
    CHECK(slurp(dir.path() / "out" / "pm_curve.svg").find("<svg") != std::string::npos);

    const auto empty = write(dir.path(), "b.cfg", "command = pm-curve\nmodel = ti_ppln.model\ntemperatures_c =\n");
    CHECK(run({"pm-curve", "--config", empty.string(), "--out", dir.path().string()}).code == kExitUsage);

    const auto none = write(dir.path(), "c.cfg", "command = pm-curve\nmodel = ti_ppln.model\npoling_periods_um = 5\ntemperatures_c = 220\n");
    CHECK(run({"pm-curve", "--config", none.string(), "--out", dir.path().string()}).code == kExitDomain);
}

TEST_CASE("usage errors") {
    jsaforge::test::TempDir dir("cli-usage");
    const auto out = (dir.path() / "o").string();
    SUBCASE("missing pump spec lists the keys") {
        const auto cfg = write(dir.path(), "r.cfg", "command = reconstruct\nmodel = ti_ppln.model\n" + sample_wg() +
                                                        "signal_nm = 1540:0.1:1544\nidler_nm = 1540:0.1:1544\n");
        const auto r = run({"reconstruct", "--config", cfg.string(), "--out", out});
        CHECK(r.code == kExitUsage);
        CHECK(r.err.find("pump_center_nm") != std::string::npos);
        CHECK(r.err.find("pump_fwhm_nm") != std::string::npos);
    }
    SUBCASE("unknown key") {
        const auto cfg = write(dir.path(), "u.cfg", "command = pm-curve\nmodel = ti_ppln.model\ntemperatures_c = 220\ntemperature = 3\n");
        const auto r = run({"pm-curve", "--config", cfg.string(), "--out", out});
        CHECK(r.code == kExitUsage);
        CHECK(r.err.find(":4:") != std::string::npos);
    }
    SUBCASE("subcommand must match the config") {
        const auto cfg = write(dir.path(), "m.cfg", "command = pm-curve\nmodel = ti_ppln.model\ntemperatures_c = 220\n");
        CHECK(run({"sfg-map", "--config", cfg.string(), "--out", out}).code == kExitUsage);
    }
    SUBCASE("malformed config names the line") {
        const auto cfg = write(dir.path(), "p.cfg", "command = pm-curve\nthis is not a pair\n");
        const auto r = run({"pm-curve", "--config", cfg.string(), "--out", out});
        CHECK(r.code == kExitUsage);
        CHECK(r.err.find("p.cfg:2") != std::string::npos);
    }
    SUBCASE("command line") {
        CHECK(run({}).code == kExitUsage);
        CHECK(run({"frobnicate"}).code == kExitUsage);
        CHECK(run({"pm-curve"}).code == kExitUsage);
        CHECK(run({"pm-curve", "--config", (dir.path() / "missing.cfg").string()}).code == kExitUsage);
        CHECK(run({"pm-curve", "--config", "x", "--threads", "0"}).code == kExitUsage);
    }
    SUBCASE("missing model") {
        const auto cfg = write(dir.path(), "n.cfg", "command = pm-curve\nmodel = nope.model\ntemperatures_c = 220\n");
        CHECK(run({"pm-curve", "--config", cfg.string(), "--out", out}).code == kExitUsage);
    }
    SUBCASE("pair rate needs a calibrated map") {
        const auto cfg = write(dir.path(), "q.cfg", "command = pair-rate\nmodel = ti_ppln.model\n" + sample_wg() +
                                                        "signal_nm = 1540:0.1:1544\nidler_nm = 1540:0.1:1544\n"
                                                        "pump_center_nm = 771\npump_fwhm_nm = 0.1\n");
        CHECK(run({"pair-rate", "--config", cfg.string(), "--out", out}).code == kExitUsage);
    }
}

TEST_CASE("sfg-map outputs are deterministic across thread counts") {
    jsaforge::test::TempDir dir("cli-det");
    const auto cfg = write(dir.path(), "s.cfg", "command = sfg-map\nmodel = ti_ppln.model\n" + sample_wg() +
                                                    "signal_nm = 1530:0.5:1555\nidler_nm = 1530:0.25:1555\n"
                                                    "peak_efficiency_per_w = 0.02\n");
    REQUIRE(run({"sfg-map", "--config", cfg.string(), "--out", (dir.path() / "a").string()}).code == kExitOk);
    REQUIRE(run({"sfg-map", "--config", cfg.string(), "--out", (dir.path() / "b").string(), "--threads", "3"}).code == kExitOk);
    REQUIRE(run({"sfg-map", "--config", cfg.string(), "--out", (dir.path() / "c").string()}).code == kExitOk);
    const auto a = slurp(dir.path() / "a" / "sfg_map.grid");
    CHECK(a == slurp(dir.path() / "b" / "sfg_map.grid"));
    CHECK(a == slurp(dir.path() / "c" / "sfg_map.grid"));
    CHECK(slurp(dir.path() / "a" / "sfg_map.svg") == slurp(dir.path() / "b" / "sfg_map.svg"));
    const auto hash = RunConfig::load(cfg).hash();
    CHECK(a.find("config_hash=" + hash) != std::string::npos);
    CHECK(load_map(dir.path() / "a" / "sfg_map.grid").units() == MapUnits::efficiency_per_watt);
}

TEST_CASE("sfg-map on a single point") {
    jsaforge::test::TempDir dir("cli-one");
    const auto cfg = write(dir.path(), "s.cfg", "command = sfg-map\nmodel = ti_ppln.model\n" + sample_wg() +
                                                    "signal_nm = 1542\nidler_nm = 1542\npeak_efficiency_per_w = 0.02\n");
    REQUIRE(run({"sfg-map", "--config", cfg.string(), "--out", dir.path().string()}).code == kExitOk);
    const auto m = load_map(dir.path() / "sfg_map.grid");
    CHECK(m.rows() == 1);
    CHECK(m.cols() == 1);
    CHECK(m.at(0, 0) == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("reconstruct from a saved map") {
    jsaforge::test::TempDir dir("cli-rec");
    const auto ax = make_axis(1536, 1548, 0.02);
    save_map(synthesize_sfg_map(ax, ax, WaveguideSpec{}, jsaforge::test::model(), {.peak_efficiency_per_w = 0.02}),
             dir.path() / "m.grid");
    const auto cfg = write(dir.path(), "r.cfg", "command = reconstruct\nmap = m.grid\n" + sample_wg() +
                                                    "pump_center_nm = 770.9\npump_fwhm_nm = 1\n");
    const auto r = run({"reconstruct", "--config", cfg.string(), "--out", (dir.path() / "o").string()});
    REQUIRE(r.code == kExitOk);
    for (const char* f : {"jsi.grid", "marginal_signal.tsv", "marginal_idler.tsv", "marginal_combined.tsv", "report.txt",
                          "jsi.svg", "marginals.svg"}) {
        CHECK(fs::exists(dir.path() / "o" / f));
    }
    const auto report = slurp(dir.path() / "o" / "report.txt");
    CHECK(report.find("map=file:m.grid") != std::string::npos);
    CHECK(report.find("pair_rate_per_s_per_w") != std::string::npos);
    CHECK(report.find("major_axis=sum_frequency") != std::string::npos);

    const auto both = write(dir.path(), "b.cfg", "command = reconstruct\nmap = m.grid\nsignal_nm = 1540\nidler_nm = 1540\n"
                                                     "pump_center_nm = 770.9\npump_fwhm_nm = 1\n");
    CHECK(run({"reconstruct", "--config", both.string(), "--out", dir.path().string()}).code == kExitUsage);
}

TEST_CASE("pump-sweep mask appears in the SVG legend") {
    jsaforge::test::TempDir dir("cli-sweep");
    const auto cfg = write(dir.path(), "p.cfg", "command = pump-sweep\nmodel = ti_ppln.model\n" + sample_wg() +
                                                    "signal_nm = 1520:0.2:1565\nidler_nm = 1520:0.2:1565\n"
                                                    "pump_centers_nm = 770:1:772\npump_fwhm_nm = 1\nmask = true\n");
    REQUIRE(run({"pump-sweep", "--config", cfg.string(), "--out", dir.path().string()}).code == kExitOk);
    CHECK(slurp(dir.path() / "pump_sweep.svg").find("legend-mask") != std::string::npos);
    const auto grid = slurp(dir.path() / "pump_sweep.grid");
    CHECK(grid.rfind("# jsaforge-sweep v1", 0) == 0);
    CHECK(grid.find("\t-") != std::string::npos);

    const auto one = write(dir.path(), "one.cfg", "command = pump-sweep\nmodel = ti_ppln.model\n" + sample_wg() +
                                                      "signal_nm = 1520:0.2:1565\nidler_nm = 1520:0.2:1565\n"
                                                      "pump_centers_nm = 771\npump_fwhm_nm = 1\n");
    REQUIRE(run({"pump-sweep", "--config", one.string(), "--out", (dir.path() / "one").string()}).code == kExitOk);
    const auto g1 = slurp(dir.path() / "one" / "pump_sweep.grid");
    CHECK(std::count(g1.begin(), g1.end(), '\n') == 4);  // magic, meta, axis, one row
    CHECK(g1.find("\t-") == std::string::npos);
}

TEST_CASE("calibrate writes a usable model") {
    jsaforge::test::TempDir dir("cli-cal");
    const auto cfg = write(dir.path(), "c.cfg", "command = calibrate\nmodel = ti_ppln.model\n" + sample_wg() +
                                                    "target_pump_nm = 771.5\noutput_model = shifted.model\n");
    REQUIRE(run({"calibrate", "--config", cfg.string(), "--out", dir.path().string()}).code == kExitOk);
    const auto m = DispersionModel::load(dir.path() / "shifted.model");
    const auto wg = WaveguideSpec::load(jsaforge::test::configs_dir() / "sample_10mm.wg");
    CHECK(degenerate_pm_wavelength(9.4, 220, wg, m).pump_nm == doctest::Approx(771.5).epsilon(1e-12));
}

TEST_CASE("shipped configs parse") {
    for (const auto& e : fs::directory_iterator(jsaforge::test::configs_dir())) {
        if (e.path().extension() != ".cfg") continue;
        CAPTURE(e.path().string());
        const auto c = RunConfig::load(e.path());
        const auto names = command_names();
        CHECK(std::find(names.begin(), names.end(), c.command()) != names.end());
    }
}
