#include "jsaforge/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jsaforge/errors.hpp"
#include "jsaforge/keyvalue.hpp"

namespace jsaforge {

namespace {

void check_domain(double lambda_nm, double temp_c) {
    if (!(lambda_nm >= kMinWavelengthNm && lambda_nm <= kMaxWavelengthNm)) {
        throw DomainError("wavelength " + format_double(lambda_nm) + " nm outside [" +
                          format_double(kMinWavelengthNm) + ", " + format_double(kMaxWavelengthNm) + "] nm");
    }
    if (!(temp_c >= kMinTemperatureC && temp_c <= kMaxTemperatureC)) {
        throw DomainError("temperature " + format_double(temp_c) + " C outside [" +
                          format_double(kMinTemperatureC) + ", " + format_double(kMaxTemperatureC) + "] C");
    }
}

}  // namespace

std::string_view to_string(Polarization pol) { return pol == Polarization::H ? "H" : "V"; }

Polarization parse_polarization(std::string_view text) {
    if (text == "H" || text == "h" || text == "TE" || text == "o") return Polarization::H;
    if (text == "V" || text == "v" || text == "TM" || text == "e") return Polarization::V;
    throw ConfigError("unknown polarization '" + std::string(text) + "' (expected H or V)");
}

SellmeierCoefficients SellmeierCoefficients::load(const std::filesystem::path& path) {
    const auto kv = KeyValueFile::load(path);
    kv.reject_unknown({"formula", "version", "crystal", "polarization", "reference", "a1", "a2", "a3", "a4",
                       "b1", "b2", "b3", "reference_temperature_c", "t_sum_offset"});
    SellmeierCoefficients c;
    c.source = path.filename().string();
    c.formula = kv.require_string("formula");
    if (c.formula != "edwards_lawrence") {
        throw ConfigError(kv.source() + ": unsupported Sellmeier formula '" + c.formula + "'");
    }
    c.a1 = kv.require_double("a1");
    c.a2 = kv.require_double("a2");
    c.a3 = kv.require_double("a3");
    c.a4 = kv.require_double("a4");
    c.b1 = kv.require_double("b1");
    c.b2 = kv.require_double("b2");
    c.b3 = kv.require_double("b3");
    c.reference_temperature_c = kv.require_double("reference_temperature_c");
    c.t_sum_offset = kv.require_double("t_sum_offset");
    return c;
}

double SellmeierCoefficients::temperature_term(double temp_c) const {
    return (temp_c - reference_temperature_c) * (temp_c + reference_temperature_c + t_sum_offset);
}

double SellmeierCoefficients::index(double lambda_nm, double temp_c) const {
    const double f = temperature_term(temp_c);
    const double l = lambda_nm * 1e-3;
    const double l2 = l * l;
    const double pole = a3 + b2 * f;
    const double n2 = a1 + (a2 + b1 * f) / (l2 - pole * pole) + b3 * f - a4 * l2;
    return std::sqrt(n2);
}

DispersionModel::DispersionModel(SellmeierCoefficients ordinary, SellmeierCoefficients extraordinary,
                                 std::vector<ModeOffset> offsets, std::string source)
    : ordinary_(std::move(ordinary)),
      extraordinary_(std::move(extraordinary)),
      offsets_(std::move(offsets)),
      source_(std::move(source)) {
    if (ordinary_.reference_temperature_c != extraordinary_.reference_temperature_c) {
        throw ConfigError("ordinary and extraordinary Sellmeier files disagree on the reference temperature");
    }
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        if (!std::isfinite(offsets_[i].delta_n)) {
            throw ConfigError("mode offset for '" + offsets_[i].mode + "' is not finite");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (offsets_[i].mode == offsets_[j].mode && offsets_[i].pol == offsets_[j].pol) {
                throw ConfigError("duplicate mode offset for (" + offsets_[i].mode + ", " +
                                  std::string(to_string(offsets_[i].pol)) + ")");
            }
        }
    }
}

DispersionModel DispersionModel::load(const std::filesystem::path& path) {
    const auto kv = KeyValueFile::load(path);
    kv.reject_unknown({"sellmeier_o", "sellmeier_e", "mode", "description"});
    const auto dir = path.parent_path();
    auto o = SellmeierCoefficients::load(dir / kv.require_string("sellmeier_o"));
    auto e = SellmeierCoefficients::load(dir / kv.require_string("sellmeier_e"));

    std::vector<ModeOffset> offsets;
    for (const auto* entry : kv.find_all("mode")) {
        std::vector<std::string> fields;
        std::istringstream ss(entry->value);
        for (std::string tok; ss >> tok;) fields.push_back(tok);
        if (fields.size() < 3 || fields.size() > 4) {
            kv.fail(*entry, "expected '<label> <H|V> <delta_n> [calibrated]'");
        }
        ModeOffset m;
        m.mode = fields[0];
        try {
            m.pol = parse_polarization(fields[1]);
        } catch (const ConfigError& err) {
            kv.fail(*entry, err.what());
        }
        const auto dn = parse_double(fields[2]);
        if (!dn) kv.fail(*entry, "bad delta_n '" + fields[2] + "'");
        m.delta_n = *dn;
        if (fields.size() == 4) {
            if (fields[3] != "calibrated") kv.fail(*entry, "unknown flag '" + fields[3] + "'");
            m.calibrated = true;
        }
        offsets.push_back(m);
    }
    return DispersionModel(std::move(o), std::move(e), std::move(offsets), path.filename().string());
}

void DispersionModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write model file: " + path.string());
    out << "# jsaforge dispersion model\n";
    out << "sellmeier_o = " << ordinary_.source << "\n";
    out << "sellmeier_e = " << extraordinary_.source << "\n";
    for (const auto& m : offsets_) {
        out << "mode = " << m.mode << ' ' << to_string(m.pol) << ' ' << format_double(m.delta_n);
        if (m.calibrated) out << " calibrated";
        out << "\n";
    }
}

double DispersionModel::mode_offset(std::string_view mode, Polarization pol) const {
    bool label_known = false;
    for (const auto& m : offsets_) {
        if (m.mode != mode) continue;
        label_known = true;
        if (m.pol == pol) return m.delta_n;
    }
    if (mode == kFundamentalMode) return 0.0;
    if (label_known) {
        throw ConfigError("mode '" + std::string(mode) + "' has no offset for polarization " +
                          std::string(to_string(pol)));
    }
    throw ConfigError("unknown mode label '" + std::string(mode) + "'");
}

DispersionModel DispersionModel::with_mode_offset(std::string_view mode, Polarization pol, double delta_n,
                                                  bool calibrated) const {
    auto offsets = offsets_;
    const auto it = std::find_if(offsets.begin(), offsets.end(),
                                 [&](const ModeOffset& m) { return m.mode == mode && m.pol == pol; });
    if (it != offsets.end()) {
        it->delta_n = delta_n;
        it->calibrated = calibrated;
    } else {
        offsets.push_back({std::string(mode), pol, delta_n, calibrated});
    }
    return DispersionModel(ordinary_, extraordinary_, std::move(offsets), source_);
}

DispersionModel DispersionModel::type0_proxy() const {
    // Offsets stay keyed by the original polarization labels.
    return DispersionModel(extraordinary_, extraordinary_, offsets_, source_ + "+type0_proxy");
}

std::string DispersionModel::identifier() const {
    return (source_.empty() ? std::string("<inline>") : source_) + "[" + ordinary_.source + "," +
           extraordinary_.source + "]";
}

double refractive_index(Polarization pol, double lambda_nm, double temp_c, const DispersionModel& model) {
    check_domain(lambda_nm, temp_c);
    return model.coefficients(pol).index(lambda_nm, temp_c);
}

double effective_index(std::string_view mode, Polarization pol, double lambda_nm, double temp_c,
                       const DispersionModel& model) {
    return refractive_index(pol, lambda_nm, temp_c, model) + model.mode_offset(mode, pol);
}

double group_index(Polarization pol, double lambda_nm, double temp_c, const DispersionModel& model,
                   double step_nm) {
    if (!(lambda_nm - 2.0 * step_nm >= kMinWavelengthNm && lambda_nm + 2.0 * step_nm <= kMaxWavelengthNm)) {
        throw DomainError("group index at " + format_double(lambda_nm) +
                          " nm needs two finite-difference steps of margin to the domain edge");
    }
    const double n = refractive_index(pol, lambda_nm, temp_c, model);
    const double up = refractive_index(pol, lambda_nm + step_nm, temp_c, model);
    const double down = refractive_index(pol, lambda_nm - step_nm, temp_c, model);
    return n - lambda_nm * (up - down) / (2.0 * step_nm);
}

double group_index(std::string_view mode, Polarization pol, double lambda_nm, double temp_c,
                   const DispersionModel& model, double step_nm) {
    // Constant offsets shift n but not dn/dlambda.
    return group_index(pol, lambda_nm, temp_c, model, step_nm) + model.mode_offset(mode, pol);
}

}  // namespace jsaforge
