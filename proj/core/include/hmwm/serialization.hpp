#pragma once

#include <string>

#include "hmwm/scenario.hpp"

namespace hmwm {

// JSON text round-trips for every artifact the tools exchange. Doubles are
// emitted with shortest-round-trip formatting, so parse(serialize(x)) is
// bit-exact. Parsers validate shape and throw std::runtime_error with the
// offending field in the message.

std::string scenario_to_json(const ScenarioConfig& cfg, int indent = 2);
ScenarioConfig scenario_from_json(const std::string& text);

std::string bank_to_json(const WatermarkBank& bank, int indent = 2);
WatermarkBank bank_from_json(const std::string& text);

std::string certificate_to_json(const StabilityCertificate& cert, int indent = 2);
StabilityCertificate certificate_from_json(const std::string& text);

std::string metrics_to_json(const RunMetrics& metrics, int indent = 2);
RunMetrics metrics_from_json(const std::string& text);

std::string stats_to_json(const SteadyStats& stats, int indent = 2);
SteadyStats stats_from_json(const std::string& text);

// Whole-file convenience wrappers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace hmwm
