#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace labelvec {

std::uint64_t fnv1a64(std::string_view bytes);

/// 16 hex digits of FNV-1a over the compact dump of `config` with object
/// keys sorted at every level.
std::string config_fingerprint(const nlohmann::json& config);
std::string config_fingerprint(const nlohmann::ordered_json& config);

}  // namespace labelvec
