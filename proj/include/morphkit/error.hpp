#pragma once

#include <stdexcept>
#include <string>

namespace morphkit {

// Every failure the library can raise, one code per contract violation.
enum class errc {
    too_few_points,
    duplicate_points,
    collinear_input,
    degenerate_triangle,
    degenerate_source,
    non_finite,
    unsupported_format,
    corrupt_file,
    io_failure,
    count_mismatch,
    parse_error,
    out_of_bounds,
    length_mismatch,
    mesh_mismatch,
    scheme_mismatch,
    dimension_mismatch,
    space_mismatch,
    backend_failure,
    duplicate_image_id,
    unknown_image_id,
    zero_vector,
    empty_set,
    unknown_id,
    empty_scores,
    inconsistent_labels,
};

inline const char* errc_name(errc c)
{
    switch (c) {
    case errc::too_few_points:      return "TooFewPoints";
    case errc::duplicate_points:    return "DuplicatePoints";
    case errc::collinear_input:     return "CollinearInput";
    case errc::degenerate_triangle: return "DegenerateTriangle";
    case errc::degenerate_source:   return "DegenerateSource";
    case errc::non_finite:          return "NonFinite";
    case errc::unsupported_format:  return "UnsupportedFormat";
    case errc::corrupt_file:        return "CorruptFile";
    case errc::io_failure:          return "IoFailure";
    case errc::count_mismatch:      return "CountMismatch";
    case errc::parse_error:         return "ParseError";
    case errc::out_of_bounds:       return "OutOfBounds";
    case errc::length_mismatch:     return "LengthMismatch";
    case errc::mesh_mismatch:       return "MeshMismatch";
    case errc::scheme_mismatch:     return "SchemeMismatch";
    case errc::dimension_mismatch:  return "DimensionMismatch";
    case errc::space_mismatch:      return "SpaceMismatch";
    case errc::backend_failure:     return "BackendFailure";
    case errc::duplicate_image_id:  return "DuplicateImageId";
    case errc::unknown_image_id:    return "UnknownImageId";
    case errc::zero_vector:         return "ZeroVector";
    case errc::empty_set:           return "EmptySet";
    case errc::unknown_id:          return "UnknownId";
    case errc::empty_scores:        return "EmptyScores";
    case errc::inconsistent_labels: return "InconsistentLabels";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code)
    {
    }

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message)
{
    throw Error(code, message);
}

} // namespace morphkit
