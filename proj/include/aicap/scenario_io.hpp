#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aicap/simulation.hpp"

namespace aicap::io {

/// Malformed JSON. line/column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : std::runtime_error(message), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ParsedScenario {
    sim::Scenario scenario;
    std::vector<std::string> diagnostics;  // one "default applied: ..." line per default
    std::string canonical;                 // fully resolved scenario, sorted keys
    std::uint64_t config_hash = 0;
};

ParsedScenario parse_scenario_text(std::string_view text);
ParsedScenario parse_scenario(const std::filesystem::path& path);

/// Fully resolved scenario as JSON; parse_scenario_text(to_json(s).dump()) reproduces s.
nlohmann::json to_json(const sim::Scenario& s);

/// 64-bit FNV-1a digest.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace aicap::io
