#include "socbench/error.hpp"

namespace socbench {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "InvalidArgument";
        case ErrorCode::malformed_header: return "MalformedHeader";
        case ErrorCode::truncated_packet: return "TruncatedPacket";
        case ErrorCode::malformed_record: return "MalformedRecord";
        case ErrorCode::read_only_capture: return "ReadOnlyCapture";
        case ErrorCode::overlapping_map: return "OverlappingMap";
        case ErrorCode::empty_capture: return "EmptyCapture";
        case ErrorCode::non_positive_speed: return "NonPositiveSpeed";
        case ErrorCode::mixed_link_type: return "MixedLinkType";
        case ErrorCode::malformed_capture: return "MalformedCapture";
        case ErrorCode::role_address_absent: return "RoleAddressAbsent";
        case ErrorCode::not_found: return "NotFound";
        case ErrorCode::no_trace_for_phase: return "NoTraceForPhase";
        case ErrorCode::trace_in_use: return "TraceInUse";
        case ErrorCode::unknown_trace: return "UnknownTrace";
        case ErrorCode::conflicting_roles: return "ConflictingRoles";
        case ErrorCode::schema_violation: return "SchemaViolation";
        case ErrorCode::sink_unavailable: return "SinkUnavailable";
        case ErrorCode::past_schedule: return "PastSchedule";
        case ErrorCode::capture_permission_denied: return "CapturePermissionDenied";
        case ErrorCode::already_finished: return "AlreadyFinished";
        case ErrorCode::empty_file: return "EmptyFile";
        case ErrorCode::unmatched_incident: return "UnmatchedIncident";
        case ErrorCode::unknown_condition: return "UnknownCondition";
        case ErrorCode::empty_sample: return "EmptySample";
        case ErrorCode::arity_mismatch: return "ArityMismatch";
        case ErrorCode::io_error: return "IoError";
        case ErrorCode::bind_failure: return "BindFailure";
    }
    return "Unknown";
}

}  // namespace socbench
