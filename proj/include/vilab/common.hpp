#pragma once

#include <stdexcept>
#include <string>

namespace vilab {

inline constexpr const char* kVersion = "0.1.0";

// Exit-code conventions used by the CLI: config errors -> 2, data errors -> 3,
// numerical failures -> 4.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// FNV-1a, used to fingerprint run configurations in provenance headers.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace vilab
