#pragma once

// JSON-configured front end. Each command turns a config object into the
// text of its primary output file (and optionally a JSON sidecar).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

namespace dome::cli {

enum class Format { Csv, Json };

// Flag values; unset fields fall back to the config or the command default.
struct RunSettings {
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::optional<Format> format;
};

struct Artifact {
    std::string body;
    std::optional<std::string> sidecar;
    const char* extension = "csv";
};

Artifact cmd_synth(const nlohmann::json& cfg, const RunSettings& run);
Artifact cmd_evolve(const nlohmann::json& cfg, const RunSettings& run);
Artifact cmd_sweep(const nlohmann::json& cfg, const RunSettings& run);
Artifact cmd_cascade(const nlohmann::json& cfg, const RunSettings& run);

/// Shortest round-trip decimal representation.
std::string format_number(double x);

/// Writes to a temporary sibling, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& text);

int run(int argc, char** argv);

}  // namespace dome::cli
