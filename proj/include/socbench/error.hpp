#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace socbench {

/// Every failure surfaced by the library carries one of these codes. The C
/// API maps them 1:1 onto `socb_status` values, the HTTP facade onto status
/// codes.
enum class ErrorCode {
    invalid_argument,
    malformed_header,
    truncated_packet,
    malformed_record,
    read_only_capture,
    overlapping_map,
    empty_capture,
    non_positive_speed,
    mixed_link_type,
    malformed_capture,
    role_address_absent,
    not_found,
    no_trace_for_phase,
    trace_in_use,
    unknown_trace,
    conflicting_roles,
    schema_violation,
    sink_unavailable,
    past_schedule,
    capture_permission_denied,
    already_finished,
    empty_file,
    unmatched_incident,
    unknown_condition,
    empty_sample,
    arity_mismatch,
    io_error,
    bind_failure,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace socbench
