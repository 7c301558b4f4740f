#pragma once

#include <stdexcept>
#include <string>

namespace fwpd {

// Bad user input: malformed files, out-of-range parameters, incompatible shapes.
// The CLI maps this family to exit code 1.
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Structurally unreadable input (ragged rows, unparseable numerics, ...).
class format_error : public validation_error {
public:
    explicit format_error(const std::string& what) : validation_error(what) {}
};

} // namespace fwpd
