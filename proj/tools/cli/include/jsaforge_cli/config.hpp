#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jsaforge/errors.hpp"
#include "jsaforge/keyvalue.hpp"

namespace jsaforge::cli {

// Thrown for command-line and config mistakes (exit code 1).
class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Flat key-value run configuration. Every referenced file is resolved and
// checked for existence when first requested; commands request all of their
// inputs before computing anything.
class RunConfig {
public:
    static RunConfig load(const std::filesystem::path& path);
    static RunConfig parse(const std::string& text, const std::filesystem::path& base_dir,
                           const std::string& source = "<config>");

    const std::string& command() const noexcept { return command_; }
    const KeyValueFile& keys() const noexcept { return kv_; }
    const std::string& hash() const noexcept { return hash_; }
    const std::filesystem::path& base_dir() const noexcept { return base_dir_; }

    // Model files: $JSAFORGE_MODEL_DIR, then the config directory, then the
    // built-in data/models directory.
    std::filesystem::path resolve_model(const std::string& name) const;
    // Other inputs: relative to the config directory.
    std::filesystem::path resolve_input(const std::string& name) const;

    // `a:step:b` inclusive range or a comma-separated list.
    std::vector<double> number_list(const std::string& key) const;
    std::optional<std::vector<double>> optional_number_list(const std::string& key) const;

    // Throws UsageError naming every missing key.
    void require_keys(const std::vector<std::string>& keys) const;

private:
    std::string command_;
    KeyValueFile kv_;
    std::string hash_;
    std::filesystem::path base_dir_;
};

std::filesystem::path default_model_dir();

}  // namespace jsaforge::cli
