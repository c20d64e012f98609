#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace ofdmdet::jsonu {

// Strict-schema guard: every key present in `j` must be listed in `known`.
// Catches typos and stale fields instead of silently ignoring them.
inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> known,
                                const std::string& context) {
    if (!j.is_object()) throw std::runtime_error(context + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool found = false;
        for (std::string_view k : known)
            if (item.key() == k) {
                found = true;
                break;
            }
        if (!found) throw std::runtime_error(context + ": unknown key \"" + item.key() + "\"");
    }
}

template <typename T>
T require(const nlohmann::json& j, const char* key, const std::string& context) {
    if (!j.contains(key)) throw std::runtime_error(context + ": missing key \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(context + ": bad value for \"" + std::string(key) + "\": " + e.what());
    }
}

template <typename T>
T optional_or(const nlohmann::json& j, const char* key, T fallback, const std::string& context) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(context + ": bad value for \"" + std::string(key) + "\": " + e.what());
    }
}

} // namespace ofdmdet::jsonu
