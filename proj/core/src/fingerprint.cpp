#include "labelvec/fingerprint.hpp"

#include <cstdio>

namespace labelvec {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_fingerprint(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

std::string config_fingerprint(const nlohmann::ordered_json& config) {
  return config_fingerprint(nlohmann::json::parse(config.dump()));
}

}  // namespace labelvec
