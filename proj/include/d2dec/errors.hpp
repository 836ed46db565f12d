// Error types shared across the library. The CLI maps these onto exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace d2dec {

// Invalid experiment configuration (unknown key, bad value, inconsistent block).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when the pathloss gap m_T is zero: both hypotheses produce the same
// test-statistic distribution, the mode selection collapses, and everything
// downstream of it is undefined.
class DegenerateModeSelection : public std::domain_error {
public:
    explicit DegenerateModeSelection(const std::string& what) : std::domain_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace d2dec
