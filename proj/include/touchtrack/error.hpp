#pragma once

#include <stdexcept>
#include <string>

namespace touchtrack {

// Raised when an input violates an operation's contract (empty cloud,
// missing channel, degenerate basis, ...). Front ends map it to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const char* message) {
    if (!condition) {
        throw Error(message);
    }
}

}  // namespace touchtrack
