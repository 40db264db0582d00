#include "resorb_cli/cache.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "resorb/errors.hpp"

namespace resorb::cli {

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

ResultCache::ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (enabled()) std::filesystem::create_directories(dir_);
}

std::filesystem::path ResultCache::path_for(const std::string& key) const {
    char name[32];
    std::snprintf(name, sizeof name, "%016llx.json", static_cast<unsigned long long>(fnv1a64(key)));
    return dir_ / name;
}

std::optional<nlohmann::json> ResultCache::load(const std::string& key) const {
    if (!enabled()) return std::nullopt;
    std::ifstream in(path_for(key));
    if (!in) return std::nullopt;
    try {
        nlohmann::json j = nlohmann::json::parse(in);
        if (!j.contains("key") || j["key"] != key || !j.contains("value")) return std::nullopt;
        return j["value"];
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;  // unreadable entries are recomputed
    }
}

void ResultCache::store(const std::string& key, const nlohmann::json& value) const {
    if (!enabled()) return;
    static std::atomic<unsigned> counter{0};
    const auto target = path_for(key);
    std::ostringstream tmpname;
    tmpname << target.filename().string() << ".tmp." << ::getpid() << "." << std::this_thread::get_id() << "."
            << counter++;
    const auto tmp = dir_ / tmpname.str();
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write cache file " + tmp.string());
        out << nlohmann::json{{"key", key}, {"value", value}}.dump();
        if (!out) throw Error("cannot write cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace resorb::cli
