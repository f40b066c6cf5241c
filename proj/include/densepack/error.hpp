// SPDX-FileCopyrightText: 2026 densepack contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef DENSEPACK_ERROR_HPP
#define DENSEPACK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dp {

enum class ErrorCode {
    invalid_argument,
    empty_cloud,
    empty_mesh,
    non_positive_depth,
    index_out_of_range,
    invalid_box,
    empty_surface,
    non_watertight_mesh,
    out_of_bounds,
    shape_mismatch,
    count_mismatch,
    missing_key,
    endianness_mismatch,
    no_valid_pixels,
    pool_too_small,
    invalid_spec,
    io_failure,
    internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) raise(code, message);
}

}  // namespace dp

#endif
