#include "jsaforge_cli/config.hpp"

#include <cstdlib>

#include "jsaforge/errors.hpp"
#include "jsaforge/sfgmap.hpp"

#ifndef JSAFORGE_DEFAULT_MODEL_DIR
#define JSAFORGE_DEFAULT_MODEL_DIR "data/models"
#endif

namespace jsaforge::cli {

std::filesystem::path default_model_dir() { return JSAFORGE_DEFAULT_MODEL_DIR; }

RunConfig RunConfig::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw UsageError("config file not found: " + path.string());
    return parse(read_text_file(path), path.parent_path(), path.string());
}

RunConfig RunConfig::parse(const std::string& text, const std::filesystem::path& base_dir, const std::string& source) {
    RunConfig cfg;
    cfg.kv_ = KeyValueFile::parse(text, source);
    cfg.hash_ = hex64(fnv1a64(text));
    cfg.base_dir_ = base_dir;
    const auto cmd = cfg.kv_.get_string("command");
    if (!cmd) throw UsageError(source + ": missing required key 'command'");
    cfg.command_ = *cmd;
    return cfg;
}

std::filesystem::path RunConfig::resolve_model(const std::string& name) const {
    std::vector<std::filesystem::path> candidates;
    const std::filesystem::path p(name);
    if (p.is_absolute()) {
        candidates.push_back(p);
    } else {
        if (const char* env = std::getenv("JSAFORGE_MODEL_DIR"); env && *env) candidates.push_back(std::filesystem::path(env) / p);
        candidates.push_back(base_dir_ / p);
        candidates.push_back(default_model_dir() / p);
    }
    for (const auto& c : candidates) {
        if (std::filesystem::is_regular_file(c)) return c;
    }
    throw ConfigError(kv_.source() + ": model file '" + name + "' not found in the model search path");
}

std::filesystem::path RunConfig::resolve_input(const std::string& name) const {
    const std::filesystem::path p(name);
    const auto full = p.is_absolute() ? p : base_dir_ / p;
    if (!std::filesystem::is_regular_file(full)) {
        throw ConfigError(kv_.source() + ": input file '" + name + "' not found");
    }
    return full;
}

std::vector<double> RunConfig::number_list(const std::string& key) const {
    const auto* e = kv_.find(key);
    if (!e) throw UsageError(kv_.source() + ": missing required key '" + key + "'");
    const auto parts = split(e->value, ':');
    if (parts.size() == 3) {
        const auto a = parse_double(parts[0]);
        const auto step = parse_double(parts[1]);
        const auto b = parse_double(parts[2]);
        if (!a || !step || !b) kv_.fail(*e, "expected 'start:step:stop'");
        try {
            return make_axis(*a, *b, *step);
        } catch (const ConfigError& err) {
            kv_.fail(*e, err.what());
        }
    }
    if (parts.size() != 1) kv_.fail(*e, "expected 'start:step:stop' or a comma-separated list");
    if (trim(e->value).empty()) return {};
    return kv_.to_doubles(*e);
}

std::optional<std::vector<double>> RunConfig::optional_number_list(const std::string& key) const {
    if (!kv_.contains(key)) return std::nullopt;
    return number_list(key);
}

void RunConfig::require_keys(const std::vector<std::string>& keys) const {
    std::string missing;
    for (const auto& k : keys) {
        if (!kv_.contains(k)) missing += (missing.empty() ? "" : ", ") + k;
    }
    if (!missing.empty()) {
        throw UsageError(kv_.source() + ": command '" + command_ + "' requires keys: " + missing);
    }
}

}  // namespace jsaforge::cli
