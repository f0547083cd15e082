// Copyright (c) 2026 The ceq Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ceq {

/// Failure categories. The CLI maps these onto process exit codes:
/// data/format problems exit 3, numeric failures exit 4.
enum class ErrorKind {
    format,       ///< malformed file (bad magic, bad version line, truncation)
    consistency,  ///< internally inconsistent input (image/label count mismatch)
    parse,        ///< unparseable cell or field
    shape,        ///< dimension mismatch between otherwise valid inputs
    domain,       ///< value outside an operation's domain (empty class, zero charge)
    singularity,  ///< coincident charges inside the force kernel guard radius
    divergence,   ///< non-finite value produced by iterative optimization
    io,           ///< file system failure
    config,       ///< unusable configuration value
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message)
        : std::runtime_error("[" + module + "] " + message),
          kind_(kind),
          module_(std::move(module)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

}  // namespace ceq
