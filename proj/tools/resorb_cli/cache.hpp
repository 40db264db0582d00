#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace resorb::cli {

/// 64-bit FNV-1a; used only as a cache key, not for integrity.
std::uint64_t fnv1a64(const std::string& data);

/// Directory of JSON records keyed by a hash of their canonical inputs. Writes go to a
/// unique temporary file that is then renamed into place, so readers never see a
/// partial record. A stored record is only returned when its stored key text matches.
class ResultCache {
public:
    explicit ResultCache(std::filesystem::path dir);

    [[nodiscard]] bool enabled() const { return !dir_.empty(); }
    [[nodiscard]] std::optional<nlohmann::json> load(const std::string& key) const;
    void store(const std::string& key, const nlohmann::json& value) const;
    [[nodiscard]] std::filesystem::path path_for(const std::string& key) const;

private:
    std::filesystem::path dir_;
};

}  // namespace resorb::cli
