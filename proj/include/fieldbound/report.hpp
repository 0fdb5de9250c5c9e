#pragma once

#include <string>

#include "fieldbound/bounds.hpp"
#include "json.hpp"

namespace fieldbound {

inline constexpr const char* kVersion = "fieldbound-0.1.0";

nlohmann::json to_json(const MeanEstimate& e);
nlohmann::json to_json(const ProbEstimate& e);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const Theorem1Report& r);

// Shortest round-trip decimal form; identical bits give identical text.
std::string num_str(double v);
std::string csv_escape(const std::string& field);

std::string csv_header();
std::string csv_row(const BoundReport& r);

// Write via a temporary file in the same directory, then rename.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace fieldbound
