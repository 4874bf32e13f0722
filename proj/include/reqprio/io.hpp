#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "reqprio/elicitation.hpp"
#include "reqprio/model.hpp"

namespace reqprio {

/// Current version of both the .project and .session formats.
inline constexpr int kSchemaVersion = 1;

/// Parses and validates a project document. Throws ParseError on malformed
/// JSON, UnsupportedVersionError on a foreign schema_version, and
/// ValidationError listing every finding (each with a JSON-pointer location).
Project load_project(std::string_view text);
Project project_from_json(const nlohmann::json& doc);
nlohmann::ordered_json project_to_json(const Project& project);
std::string dump_project(const Project& project);

/// Session snapshots carry the project, options and the full loop state.
Session load_session(std::string_view text);
std::string dump_session(const Session& session);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

Project load_project_file(const std::filesystem::path& path);
Session load_session_file(const std::filesystem::path& path);
void save_session_file(const std::filesystem::path& path, const Session& session);

/// Integer weights/costs as JSON numbers, fractions as "p/q" strings.
nlohmann::ordered_json rational_to_json(const Rational& value);

}  // namespace reqprio
