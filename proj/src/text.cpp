#include "fdmlens/text.hpp"

#include <cassert>
#include <cctype>
#include <charconv>

namespace fdmlens {

namespace {

std::string to_chars_str(double v, std::chars_format fmt, int precision) {
    char buf[64];
    std::to_chars_result res = precision < 0
        ? std::to_chars(buf, buf + sizeof buf, v, fmt)
        : std::to_chars(buf, buf + sizeof buf, v, fmt, precision);
    assert(res.ec == std::errc());
    return std::string(buf, res.ptr);
}

} // namespace

std::string format_shortest(double v) {
    char buf[64];
    std::to_chars_result res = std::to_chars(buf, buf + sizeof buf, v);
    assert(res.ec == std::errc());
    return std::string(buf, res.ptr);
}

std::string format_sig17(double v) {
    return to_chars_str(v, std::chars_format::general, 17);
}

std::string format_fixed(double v, int decimals) {
    return to_chars_str(v, std::chars_format::fixed, decimals);
}

std::optional<double> parse_double(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    if (begin == end) return std::nullopt;
    double value = 0.0;
    const char* first = text.data() + begin;
    const char* last = text.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

} // namespace fdmlens
