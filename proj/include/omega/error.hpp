#pragma once

#include <stdexcept>
#include <string>

namespace omega {

// Error codes for everything the library can reject. `parse` covers malformed
// input files and maps to CLI exit code 2; every other code is a constraint
// violation and maps to exit code 3.
enum class errc {
    parse,
    zero_dim_grid,
    empty_sequence,
    invalid_sequence,
    non_positive_step,
    step_out_of_range,
    gamma_out_of_bounds,
    non_finite_input,
    zero_text_entropy,
    bad_bins,
    config_mismatch,
    length_mismatch,
    not_text_only,
    too_many_gaps,
    bad_config,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void throw_error(errc code, const std::string& what) {
    throw Error(code, what);
}

} // namespace omega
