#include "jsaforge_cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "jsaforge/analysis.hpp"
#include "jsaforge/dispersion.hpp"
#include "jsaforge/errors.hpp"
#include "jsaforge/phasematch.hpp"
#include "jsaforge/reconstruct.hpp"
#include "jsaforge/sfgmap.hpp"
#include "jsaforge_cli/svg.hpp"

namespace jsaforge::cli {

namespace {

const std::vector<std::string_view> kCommonKeys{"command", "description", "model", "waveguide"};
const std::vector<std::string_view> kMapSourceKeys{"map", "signal_nm", "idler_nm", "peak_efficiency_per_w", "pump_modes"};

void check_keys(const RunConfig& config, std::vector<std::string_view> allowed) {
    allowed.insert(allowed.end(), kCommonKeys.begin(), kCommonKeys.end());
    try {
        config.keys().reject_unknown(allowed);
    } catch (const ParseError& err) {
        throw UsageError(err.what());
    }
}

std::vector<std::string_view> with_map_source(std::vector<std::string_view> keys) {
    keys.insert(keys.end(), kMapSourceKeys.begin(), kMapSourceKeys.end());
    return keys;
}

void write_file(const std::filesystem::path& path, const std::string& content, CommandResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path.string());
    out << content;
    if (!out) throw ConfigError("failed writing output file: " + path.string());
    result.files.push_back(path);
}

void prepare_out_dir(const CommandOptions& options) {
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (!std::filesystem::is_directory(options.out_dir)) {
        throw ConfigError("output directory not usable: " + options.out_dir.string());
    }
}

// Inputs shared by most commands. Loaded eagerly so that every file is
// checked before any computation starts.
struct Inputs {
    std::optional<DispersionModel> model;
    std::optional<WaveguideSpec> waveguide;
    std::optional<JointMap> map_file;
    std::string map_file_name;
};

Inputs load_inputs(const RunConfig& config, bool need_model, bool need_waveguide, bool map_source) {
    Inputs in;
    const auto& kv = config.keys();
    const bool synthesize = map_source && !kv.contains("map");
    if (map_source && kv.contains("map") && (kv.contains("signal_nm") || kv.contains("idler_nm"))) {
        throw UsageError(kv.source() + ": give either 'map' or synthesis axes ('signal_nm', 'idler_nm'), not both");
    }
    if (synthesize) {
        config.require_keys({"model", "waveguide", "signal_nm", "idler_nm"});
    }
    if (need_model || synthesize) config.require_keys({"model"});
    if (need_waveguide || synthesize) config.require_keys({"waveguide"});
    if (kv.contains("model")) in.model = DispersionModel::load(config.resolve_model(kv.require_string("model")));
    if (kv.contains("waveguide")) in.waveguide = WaveguideSpec::load(config.resolve_input(kv.require_string("waveguide")));
    if (map_source && kv.contains("map")) {
        const auto path = config.resolve_input(kv.require_string("map"));
        in.map_file = load_map(path);
        in.map_file_name = path.filename().string();
    }
    return in;
}

std::vector<PumpModeWeight> parse_pump_modes(const RunConfig& config) {
    std::vector<PumpModeWeight> modes;
    const auto* e = config.keys().find("pump_modes");
    if (!e) return modes;
    for (const auto item : split(e->value, ',')) {
        const auto parts = split(trim(item), ':');
        if (parts.size() != 2) config.keys().fail(*e, "expected 'mode:weight, mode:weight'");
        const auto w = parse_double(parts[1]);
        if (!w) config.keys().fail(*e, "bad weight '" + std::string(parts[1]) + "'");
        modes.push_back({std::string(trim(parts[0])), *w});
    }
    return modes;
}

std::string provenance(const RunConfig& config, const Inputs& in) {
    std::ostringstream out;
    out << "config_hash=" << config.hash();
    if (in.model) out << " model=" << in.model->identifier();
    if (in.waveguide) out << " waveguide=" << in.waveguide->hash();
    if (in.map_file) out << " map=" << in.map_file_name;
    return out.str();
}

JointMap obtain_map(const RunConfig& config, const Inputs& in, const CommandOptions& options) {
    if (in.map_file) return in.map_file->with_metadata(in.map_file->metadata() + " | " + provenance(config, in));
    SynthesisOptions synth;
    synth.peak_efficiency_per_w = config.keys().get_double("peak_efficiency_per_w");
    synth.pump_modes = parse_pump_modes(config);
    synth.threads = options.threads;
    const auto map = synthesize_sfg_map(config.number_list("signal_nm"), config.number_list("idler_nm"), *in.waveguide,
                                        *in.model, synth);
    return map.with_metadata(map.metadata() + " | " + provenance(config, in));
}

PumpSpec pump_from(const RunConfig& config) {
    config.require_keys({"pump_center_nm", "pump_fwhm_nm"});
    try {
        return make_pump(config.keys().require_double("pump_center_nm"), config.keys().require_double("pump_fwhm_nm"));
    } catch (const ParseError&) {
        throw;
    } catch (const ConfigError& err) {
        throw UsageError(config.keys().source() + ": " + err.what());
    }
}

std::optional<FilterSpec> filter_from(const RunConfig& config, const std::string& arm_name, Arm arm) {
    const auto& kv = config.keys();
    const std::string center_key = "filter_" + arm_name + "_center_nm";
    const std::string fwhm_key = "filter_" + arm_name + "_fwhm_nm";
    const std::string sigma_key = "filter_" + arm_name + "_sigma_nm";
    const bool any = kv.contains(center_key) || kv.contains(fwhm_key) || kv.contains(sigma_key);
    if (!any) return std::nullopt;
    if (!kv.contains(center_key) || kv.contains(fwhm_key) == kv.contains(sigma_key)) {
        throw UsageError(kv.source() + ": " + arm_name + " filter needs '" + center_key + "' and exactly one of '" +
                         fwhm_key + "' or '" + sigma_key + "'");
    }
    const double center = kv.require_double(center_key);
    const double fwhm = kv.contains(fwhm_key) ? kv.require_double(fwhm_key)
                                              : GaussianLine::from_sigma(center, kv.require_double(sigma_key)).fwhm_nm;
    return make_filter(arm, center, fwhm);
}

std::string spectrum_tsv(const Spectrum& s, const std::string& what, const std::string& prov) {
    std::ostringstream out;
    out << "# jsaforge " << what << "\n# " << prov << "\nwavelength_nm\tnormalized_intensity\n";
    const auto n = s.normalized();
    for (std::size_t k = 0; k < n.values.size(); ++k) {
        out << format_double(n.wavelength_nm[k]) << '\t' << format_double(n.values[k]) << '\n';
    }
    return out.str();
}

HeatmapData heatmap_of(const JointMap& map) {
    return HeatmapData{map.idler_axis(), map.signal_axis(), map.values(), {}};
}

bool has_calibrated_offset(const DispersionModel& model) {
    return std::any_of(model.mode_offsets().begin(), model.mode_offsets().end(),
                       [](const ModeOffset& m) { return m.calibrated; });
}

}  // namespace

std::vector<std::string> command_names() {
    return {"pm-curve", "sfg-map", "reconstruct", "pump-sweep", "pair-rate", "calibrate"};
}

CommandResult cmd_pm_curve(const RunConfig& config, const CommandOptions& options) {
    check_keys(config, {"poling_periods_um", "temperatures_c", "process"});
    config.require_keys({"model", "temperatures_c"});
    const auto temps = config.number_list("temperatures_c");
    if (temps.empty()) throw UsageError(config.keys().source() + ": 'temperatures_c' must list at least one temperature");
    const auto periods = config.optional_number_list("poling_periods_um").value_or(make_axis(8.9, 9.7, 0.1));
    if (periods.empty()) throw UsageError(config.keys().source() + ": 'poling_periods_um' is empty");
    const auto process = config.keys().get_string("process").value_or("type2");
    if (process != "type2" && process != "type0_proxy") {
        throw UsageError(config.keys().source() + ": process must be type2 or type0_proxy");
    }
    const auto in = load_inputs(config, true, false, false);
    const WaveguideSpec wg = in.waveguide.value_or(WaveguideSpec{});
    const DispersionModel model = process == "type2" ? *in.model : in.model->type0_proxy();
    prepare_out_dir(options);

    const auto prov = provenance(config, in);
    std::ostringstream tsv;
    tsv << "# jsaforge pm-curve process=" << process << "\n# " << prov << "\n"
        << "poling_period_um\ttemperature_c\tdegenerate_nm\tpump_nm\troots\n";
    std::vector<Series> series;
    std::size_t matched = 0;
    for (const double t : temps) {
        Series s{"T = " + format_double(t) + " C", {}, {}};
        for (const double p : periods) {
            tsv << format_double(p) << '\t' << format_double(t) << '\t';
            try {
                const auto m = degenerate_pm_wavelength(p, t, wg, model);
                tsv << format_double(m.wavelength_nm) << '\t' << format_double(m.pump_nm) << '\t' << m.roots_in_bracket
                    << '\n';
                s.x.push_back(p);
                s.y.push_back(m.wavelength_nm);
                ++matched;
            } catch (const NoPhaseMatchingError&) {
                if (process == "type2") throw;
                tsv << "none\tnone\t0\n";
            }
        }
        series.push_back(std::move(s));
    }
    CommandResult result;
    write_file(options.out_dir / "pm_curve.tsv", tsv.str(), result);
    write_file(options.out_dir / "pm_curve.svg",
               render_lines(series, {"Degenerate phase matching (" + process + ")", "poling period (um)",
                                     "degenerate wavelength (nm)", prov}),
               result);
    result.summary = "pm-curve: " + std::to_string(matched) + " of " + std::to_string(periods.size() * temps.size()) +
                     " (period, temperature) points phase-matched";
    return result;
}

CommandResult cmd_sfg_map(const RunConfig& config, const CommandOptions& options) {
    check_keys(config, with_map_source({"output_name"}));
    if (config.keys().contains("map")) throw UsageError(config.keys().source() + ": sfg-map synthesizes; 'map' is not allowed");
    const auto in = load_inputs(config, true, true, true);
    prepare_out_dir(options);
    const auto map = obtain_map(config, in, options);
    const auto name = config.keys().get_string("output_name").value_or("sfg_map");
    CommandResult result;
    save_map(map, options.out_dir / (name + ".grid"));
    result.files.push_back(options.out_dir / (name + ".grid"));
    write_file(options.out_dir / (name + ".svg"),
               render_heatmap(heatmap_of(map), {"SFG joint map (" + std::string(to_string(map.units())) + ")",
                                                "idler wavelength (nm)", "signal wavelength (nm)", provenance(config, in)}),
               result);
    const auto [r, c] = map.argmax();
    result.summary = "sfg-map: " + std::to_string(map.rows()) + " x " + std::to_string(map.cols()) + " grid, peak " +
                     format_double(map.max_value()) + " at signal " + format_double(map.signal_axis()[r]) +
                     " nm, idler " + format_double(map.idler_axis()[c]) + " nm";
    return result;
}

CommandResult cmd_reconstruct(const RunConfig& config, const CommandOptions& options) {
    check_keys(config, with_map_source({"pump_center_nm", "pump_fwhm_nm", "filter_signal_center_nm",
                                        "filter_signal_fwhm_nm", "filter_signal_sigma_nm", "filter_idler_center_nm",
                                        "filter_idler_fwhm_nm", "filter_idler_sigma_nm", "pair_rate_step_axis",
                                        "pair_rate_window_sigmas"}));
    const auto pump = pump_from(config);
    const auto fs = filter_from(config, "signal", Arm::signal);
    const auto fi = filter_from(config, "idler", Arm::idler);
    const auto in = load_inputs(config, false, false, true);
    prepare_out_dir(options);
    const auto map = obtain_map(config, in, options);

    ReportOptions ro;
    ro.signal_filter = fs;
    ro.idler_filter = fi;
    if (in.waveguide) {
        ro.transmission_signal = in.waveguide->transmission(WaveguideSpec::signal_pol);
        ro.transmission_idler = in.waveguide->transmission(WaveguideSpec::idler_pol);
    }
    if (const auto axis = config.keys().get_string("pair_rate_step_axis")) ro.pair_rate_axis = parse_step_axis(*axis);
    ro.pair_rate_window_sigmas = config.keys().get_double("pair_rate_window_sigmas").value_or(3.0);
    ro.extra_flags.push_back(in.map_file ? "map=file:" + in.map_file_name : std::string("map=synthesized"));
    if (in.model) ro.extra_flags.push_back(has_calibrated_offset(*in.model) ? "calibration=pump_offset" : "calibration=none");
    ro.extra_flags.push_back("mask=none");
    ro.extra_flags.push_back("config_hash=" + config.hash());

    const auto res = report(map, pump, ro);
    const auto prov = provenance(config, in);
    CommandResult result;
    save_map(res.jsi, options.out_dir / "jsi.grid");
    result.files.push_back(options.out_dir / "jsi.grid");
    write_file(options.out_dir / "marginal_signal.tsv", spectrum_tsv(res.marginals.signal, "signal marginal", prov), result);
    write_file(options.out_dir / "marginal_idler.tsv", spectrum_tsv(res.marginals.idler, "idler marginal", prov), result);
    write_file(options.out_dir / "marginal_combined.tsv", spectrum_tsv(res.marginals.combined, "combined marginal", prov),
               result);
    const auto text = format_report(res);
    write_file(options.out_dir / "report.txt", "# jsaforge report\n# " + prov + "\n" + text, result);
    write_file(options.out_dir / "jsi.svg",
               render_heatmap(heatmap_of(res.jsi), {"Joint spectral intensity (flat phase)", "idler wavelength (nm)",
                                                    "signal wavelength (nm)", prov}),
               result);
    const auto sn = res.marginals.signal.normalized();
    const auto in_n = res.marginals.idler.normalized();
    write_file(options.out_dir / "marginals.svg",
               render_lines({{"signal (H)", sn.wavelength_nm, sn.values}, {"idler (V)", in_n.wavelength_nm, in_n.values}},
                            {"Marginal spectra", "wavelength (nm)", "normalized intensity", prov}),
               result);
    result.summary = text;
    return result;
}

CommandResult cmd_pump_sweep(const RunConfig& config, const CommandOptions& options) {
    check_keys(config, with_map_source({"pump_centers_nm", "pump_fwhm_nm", "mask", "mask_half_width_nm"}));
    config.require_keys({"pump_centers_nm", "pump_fwhm_nm"});
    const auto centers = config.number_list("pump_centers_nm");
    if (centers.empty()) throw UsageError(config.keys().source() + ": 'pump_centers_nm' is empty");
    const double fwhm = config.keys().require_double("pump_fwhm_nm");
    std::optional<MaskOptions> mask;
    if (config.keys().get_bool("mask").value_or(false)) {
        mask = MaskOptions{};
        if (const auto hw = config.keys().get_double("mask_half_width_nm")) mask->half_width_nm = *hw;
    }
    for (const double c : centers) {
        try {
            make_pump(c, fwhm);
        } catch (const ConfigError& err) {
            throw UsageError(config.keys().source() + ": " + err.what());
        }
    }
    const auto in = load_inputs(config, false, false, true);
    prepare_out_dir(options);
    const auto map = obtain_map(config, in, options);
    const auto sweep = pump_sweep(map, centers, fwhm, mask, options.threads);
    const auto prov = provenance(config, in);

    std::string grid = "# jsaforge-sweep v1\n# meta: pump_fwhm_nm=" + format_double(fwhm) +
                       (mask ? " mask_half_width_nm=" + format_double(mask->half_width_nm) : std::string(" mask=none")) +
                       " " + prov + "\n";
    for (const double e : sweep.emission_nm) grid += "\t" + format_double(e);
    grid += "\n";
    std::ostringstream peaks;
    peaks << "# jsaforge pump-sweep branches\n# " << prov << "\npump_nm\tbranch_a_nm\tbranch_b_nm\tinverse_sum_residual_per_nm\n";
    for (std::size_t r = 0; r < sweep.rows(); ++r) {
        grid += format_double(sweep.pump_nm[r]);
        Spectrum row{sweep.emission_nm, {}};
        row.values.resize(sweep.cols());
        for (std::size_t c = 0; c < sweep.cols(); ++c) {
            grid += '\t';
            grid += sweep.is_present(r, c) ? format_double(sweep.at(r, c)) : std::string("-");
            row.values[c] = sweep.is_present(r, c) ? sweep.at(r, c) : 0.0;
        }
        grid += '\n';
        const auto p = find_peaks(row);
        if (!p.empty()) {
            const double a = p.front();
            const double b = p.size() > 1 ? p.back() : p.front();
            peaks << format_double(sweep.pump_nm[r]) << '\t' << format_double(a) << '\t' << format_double(b) << '\t'
                  << format_double(1.0 / a + 1.0 / b - 1.0 / sweep.pump_nm[r]) << '\n';
        }
    }
    CommandResult result;
    write_file(options.out_dir / "pump_sweep.grid", grid, result);
    write_file(options.out_dir / "pump_sweep_branches.tsv", peaks.str(), result);
    write_file(options.out_dir / "pump_sweep.svg",
               render_heatmap(HeatmapData{sweep.emission_nm, sweep.pump_nm, sweep.values, sweep.present},
                              {"SPDC spectra vs pump wavelength", "emission wavelength (nm)", "pump wavelength (nm)", prov}),
               result);
    result.summary = "pump-sweep: " + std::to_string(sweep.rows()) + " pump wavelengths x " +
                     std::to_string(sweep.cols()) + " emission samples" + (mask ? " (degeneracy masked)" : "");
    return result;
}

CommandResult cmd_pair_rate(const RunConfig& config, const CommandOptions& options) {
    check_keys(config, with_map_source({"pump_center_nm", "pump_fwhm_nm", "step_axis", "window_sigmas"}));
    const auto pump = pump_from(config);
    const auto axis = parse_step_axis(config.keys().get_string("step_axis").value_or("finest"));
    const double window = config.keys().get_double("window_sigmas").value_or(3.0);
    const auto in = load_inputs(config, false, false, true);
    prepare_out_dir(options);
    const auto map = obtain_map(config, in, options);
    const double step = pair_rate_step(map, axis);
    const double rate = pair_rate_from_sfg(map, step, pump, window);
    std::ostringstream out;
    out << "pair_rate_per_s_per_w = " << format_double(rate) << "\n"
        << "step_nm = " << format_double(step) << "\n"
        << "step_axis = " << to_string(axis) << "\n"
        << "window_sigmas = " << format_double(window) << "\n"
        << "pump_center_nm = " << format_double(pump.center_nm) << "\n"
        << "pump_fwhm_nm = " << format_double(pump.fwhm_nm) << "\n";
    if (in.waveguide) {
        out << "pair_rate_transmitted_per_s_per_w = "
            << format_double(rate * in.waveguide->transmission(Polarization::H) * in.waveguide->transmission(Polarization::V))
            << "\n";
    }
    CommandResult result;
    write_file(options.out_dir / "pair_rate.txt", "# jsaforge pair-rate\n# " + provenance(config, in) + "\n" + out.str(),
               result);
    result.summary = out.str();
    return result;
}

CommandResult cmd_calibrate(const RunConfig& config, const CommandOptions& options) {
    check_keys(config, {"target_pump_nm", "output_model"});
    config.require_keys({"model", "waveguide"});
    const auto in = load_inputs(config, true, true, false);
    const double target = config.keys().get_double("target_pump_nm").value_or(771.0);
    const auto name = config.keys().get_string("output_model").value_or("calibrated.model");
    prepare_out_dir(options);
    const auto calibrated = calibrate_pump_offset(*in.waveguide, *in.model, target);
    const auto check = degenerate_pm_wavelength(in.waveguide->poling_period_um, in.waveguide->temperature_c,
                                                *in.waveguide, calibrated);
    CommandResult result;
    const auto src_dir = config.resolve_model(config.keys().require_string("model")).parent_path();
    for (const auto& f : {calibrated.ordinary().source, calibrated.extraordinary().source}) {
        const auto dst = options.out_dir / f;
        if (!std::filesystem::equivalent(src_dir, options.out_dir)) {
            std::filesystem::copy_file(src_dir / f, dst, std::filesystem::copy_options::overwrite_existing);
        }
        result.files.push_back(dst);
    }
    calibrated.save(options.out_dir / name);
    result.files.push_back(options.out_dir / name);
    result.summary = "calibrate: pump mode '" + in.waveguide->pump_mode + "' offset " +
                     format_double(calibrated.mode_offset(in.waveguide->pump_mode, Polarization::H)) +
                     ", degenerate pump " + format_double(check.pump_nm) + " nm";
    return result;
}

CommandResult run_command(const RunConfig& config, const CommandOptions& options) {
    const auto& c = config.command();
    if (c == "pm-curve") return cmd_pm_curve(config, options);
    if (c == "sfg-map") return cmd_sfg_map(config, options);
    if (c == "reconstruct") return cmd_reconstruct(config, options);
    if (c == "pump-sweep") return cmd_pump_sweep(config, options);
    if (c == "pair-rate") return cmd_pair_rate(config, options);
    if (c == "calibrate") return cmd_calibrate(config, options);
    throw UsageError("unknown command '" + c + "'");
}

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const ConfigError*>(&error)) return kExitUsage;
    if (dynamic_cast<const CLI::Error*>(&error)) return kExitUsage;
    return kExitDomain;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"jsaforge: SFG-based reconstruction of type-II SPDC joint spectra"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir = ".";
    unsigned threads = 1;
    const std::map<std::string, std::string> blurbs = {
        {"pm-curve", "degenerate phase-matching wavelength vs poling period"},
        {"sfg-map", "synthesize an SFG efficiency map"},
        {"reconstruct", "JSI, marginals and purity from an SFG map"},
        {"pump-sweep", "stacked SPDC spectra over pump wavelengths"},
        {"pair-rate", "pair rate from an SFG map"},
        {"calibrate", "fit the pump-mode offset to the measured degeneracy"},
    };
    for (const auto& name : command_names()) {
        auto* sub = app.add_subcommand(name, blurbs.at(name));
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const auto config = RunConfig::load(config_path);
        if (config.command() != name) {
            throw UsageError("config command '" + config.command() + "' does not match subcommand '" + name + "'");
        }
        const auto result = run_command(config, {out_dir, threads});
        std::cout << result.summary;
        if (!result.summary.empty() && result.summary.back() != '\n') std::cout << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "jsaforge " << name << ": " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace jsaforge::cli
