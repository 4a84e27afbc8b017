/**
 * @file cli.hpp
 * @brief Command-line surface: direction grammar and subcommand dispatch.
 *
 * Kept in the library (rather than the binary) so the grammar and the
 * dispatcher are unit-testable.
 */

#pragma once

#include <optional>
#include <string>

#include "qops/image.hpp"

namespace qops {

/// Parses a direction from one of the accepted forms:
///   muN          catalog entry, N in 1..13
///   x,y,z        numeric triple
///   #RRGGBB      hex color, channels / 255
///   sample:X,Y[:X2,Y2]
///                pixel sampled from `source`; with a second point, the two
///                pixel colors are averaged. Needs a source image.
/// When normalize is true the result is scaled to unit length (zero vectors
/// are an error); otherwise the raw triple is kept.
Direction parse_direction(const std::string& text, const Raster* source, bool normalize);

/// Canonical text form: "muN" for exact catalog entries, otherwise a
/// numeric triple with enough digits that parse(format(d)) == d bitwise.
std::string format_direction(const Direction& d);

/// Runs one invocation. Returns the process exit code: 0 success, 1 usage
/// error, 2 processing error. Diagnostics go to stderr; data only to files.
int dispatch(int argc, const char* const* argv);

}  // namespace qops
