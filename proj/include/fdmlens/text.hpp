#ifndef FDMLENS_TEXT_HPP
#define FDMLENS_TEXT_HPP

#include <optional>
#include <string>
#include <string_view>

namespace fdmlens {

/// Shortest decimal string that round-trips the double exactly
/// (std::to_chars, locale-independent). Used for CSV output.
std::string format_shortest(double v);

/// 17-significant-digit general format (std::to_chars), the serialization
/// width required for JSON payloads. Locale-independent.
std::string format_sig17(double v);

/// Fixed-point with the given number of decimals, for SVG pixel coordinates
/// and tick labels.
std::string format_fixed(double v, int decimals);

/// Strict full-string parse via std::from_chars ('.' decimal separator,
/// optional surrounding ASCII whitespace). nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

} // namespace fdmlens

#endif
