#pragma once

#include <stdexcept>
#include <string>

namespace gradsec {

// All recoverable failures (bad shapes, bad configs, bad files) surface as
// gradsec::Error with a message naming the offending field or layer.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

}  // namespace gradsec
