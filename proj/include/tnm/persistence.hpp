#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tnm/scenario.hpp"

namespace tnm {

inline constexpr int kFormatVersion = 1;

// Deterministic XML document (`tnm-model`, format version 1) embedding every
// scenario. Element order follows creation order. See docs/model-format.md.
std::string save(const Project& project);

// Throws parse-error (malformed XML or schema violation, with line and
// element), format-version (unsupported version), or integrity-error
// (dangling references or broken model rules; carries every violation).
Project load(std::string_view document);

// Integrity-error unless every scenario reference resolves and scenario
// names are unique.
void check_references(const Model& model, const std::vector<ScenarioSpec>& scenarios);

Project load_file(const std::filesystem::path& path);
void save_file(const Project& project, const std::filesystem::path& path);

enum class LogFormat { Csv, Jsonl };

std::optional<LogFormat> parse_log_format(std::string_view text);

// Column / field order: time, kind, message_id, task_label, object,
// hop_index, detail. CSV starts with a header row.
void export_log(const SimLog& log, LogFormat format, std::ostream& sink);
std::string export_log(const SimLog& log, LogFormat format);

// Inverse of export_log for the record list. Throws parse-error.
std::vector<LogRecord> parse_log(std::string_view text, LogFormat format);

// Guesses the format from the first line: a CSV header or a JSON object.
LogFormat sniff_log_format(std::string_view text);

// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace tnm
