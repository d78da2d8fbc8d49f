// Copyright the depwarp authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <stdexcept>
#include <string>

namespace depwarp {

// Error taxonomy mirrors the CLI exit codes: I/O failures exit 2,
// validation failures exit 3, evaluation failures exit 4.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace depwarp
