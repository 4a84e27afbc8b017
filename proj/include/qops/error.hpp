/**
 * @file error.hpp
 * @brief Error codes and the exception type shared by the whole library.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace qops {

/// Machine-readable failure categories. Every throwing code path in the
/// library uses one of these so callers can branch without string matching.
enum class Errc {
    zero_quaternion,        ///< operation undefined for the zero quaternion
    undefined_log,          ///< principal logarithm/power does not exist
    index_out_of_range,     ///< catalog or selector index outside its range
    zero_direction,         ///< a direction with zero length was supplied
    dimension_mismatch,     ///< two rasters/grids disagree in shape
    bad_channel_selection,  ///< channel selector empty, duplicated, or out of range
    zero_encoding,          ///< all computed encoding values vanished
    degenerate_stains,      ///< stain estimation found fewer than two directions
    image_too_small,        ///< raster below the minimum size for the operation
    alpha_unsupported,      ///< input image carries an alpha channel
    unsupported_format,     ///< raster format outside 8-bit gray/RGB
    io_failure,             ///< file could not be read or written
    invalid_argument,       ///< parameter outside its documented domain
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::zero_quaternion:       return "ZeroQuaternion";
        case Errc::undefined_log:         return "UndefinedLog";
        case Errc::index_out_of_range:    return "IndexOutOfRange";
        case Errc::zero_direction:        return "ZeroDirection";
        case Errc::dimension_mismatch:    return "DimensionMismatch";
        case Errc::bad_channel_selection: return "BadChannelSelection";
        case Errc::zero_encoding:         return "ZeroEncoding";
        case Errc::degenerate_stains:     return "DegenerateStains";
        case Errc::image_too_small:       return "ImageTooSmall";
        case Errc::alpha_unsupported:     return "AlphaUnsupported";
        case Errc::unsupported_format:    return "UnsupportedFormat";
        case Errc::io_failure:            return "IoFailure";
        case Errc::invalid_argument:      return "InvalidArgument";
    }
    return "UnknownError";
}

/// Exception carrying an Errc alongside the human-readable message.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace qops
