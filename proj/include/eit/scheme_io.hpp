#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "eit/hamiltonian.hpp"

namespace eit {

// Scheme description files (JSON). See docs/scheme_format.md. Any problem
// with the file or its contents raises ConfigError.
SchemeConfig scheme_from_json(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = {});
SchemeConfig load_scheme_file(const std::filesystem::path& path);

// Fully explicit form (no preset reference); round-trips through
// scheme_from_json when the registry uses the built-in data table.
nlohmann::json scheme_to_json(const SchemeConfig& config);

// Preset name or path to a scheme file.
SchemeConfig resolve_scheme(const std::string& name_or_path);

nlohmann::json polarization_to_json(const Polarization& p);
Polarization polarization_from_json(const nlohmann::json& j);

}  // namespace eit
