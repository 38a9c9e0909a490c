// casefile - offline artifact analysis workbench
// Error type shared by every module

#pragma once

#include <stdexcept>
#include <string>

namespace casefile {

enum class Errc {
    invalid_argument,
    out_of_bounds,
    bad_format,
    unsupported,
    not_found,
    duplicate,
    password_required,
    wrong_password,
    checksum_mismatch,
    io,
};

const char* errc_name(Errc code) noexcept;

/// Every parse or operation failure surfaces as this exception. The code is
/// coarse on purpose so front ends can map it to exit codes and hints.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace casefile
