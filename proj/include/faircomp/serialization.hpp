#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "faircomp/experiments.hpp"

namespace faircomp {

// JSON documents use snake_case keys matching the struct field names.
// Parse failures throw Error(Parse) naming the offending field.

SystemConfig parse_system_config(std::string_view json_text);
std::string system_config_to_json(const SystemConfig& config);

/// Reads the optional "settings" object of a config or sweep document;
/// missing keys keep their defaults.
BcdSettings parse_settings(std::string_view json_text);
std::string settings_to_json(const BcdSettings& settings);

SweepSpec parse_sweep_spec(std::string_view json_text);

std::string trace_to_json(const BcdTrace& trace);

/// Solution, MSE breakdown, trace and the input config in one document.
std::string solve_report_json(const SystemConfig& config, const BcdResult& result, const MseBreakdown& mse);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace faircomp
