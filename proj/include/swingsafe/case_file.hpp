#pragma once

#include "swingsafe/config.hpp"
#include "swingsafe/network.hpp"

#include <filesystem>
#include <string>

namespace swingsafe {

inline constexpr int kCaseFileVersion = 1;

struct CaseData {
    std::string name;
    PowerNetwork network;
    ScenarioConfig scenario;
};

/// Reads a JSON case file (schema documented in docs/case-format.md).
/// Throws SchemaError, UnbalancedInjection, DisconnectedGraph, InvalidNetwork.
CaseData load_case(const std::filesystem::path& path);
CaseData parse_case(const std::string& text);

} // namespace swingsafe
