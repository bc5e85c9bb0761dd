#include "dtnsim/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <span>
#include <utility>

#include "dtnsim/error.hpp"

namespace dtnsim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view text, const char* expected) {
  throw Error(ErrorCode::kInvalidParameter,
              "cannot parse '" + std::string(text) + "' as " + expected);
}

// Splits "12.5km" into (12.5, "km"). The numeric prefix must be non-empty.
std::pair<double, std::string_view> split_number(std::string_view text, const char* expected) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr == text.data()) bad_value(text, expected);
  auto suffix = trim(std::string_view(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr)));
  if (!std::isfinite(value)) bad_value(text, expected);
  return {value, suffix};
}

struct UnitScale {
  std::string_view suffix;
  double scale;
};

double parse_with_units(std::string_view text, std::span<const UnitScale> units, const char* expected) {
  auto [value, suffix] = split_number(text, expected);
  for (const auto& u : units) {
    if (suffix == u.suffix) return value * u.scale;
  }
  bad_value(text, expected);
}

constexpr std::array<UnitScale, 2> kLengthUnits{{{"km", 1.0}, {"m", 0.001}}};
constexpr std::array<UnitScale, 6> kDurationUnits{{{"s", 1.0},
                                                   {"min", kSecondsPerMinute},
                                                   {"h", kSecondsPerHour},
                                                   {"hr", kSecondsPerHour},
                                                   {"d", kSecondsPerDay},
                                                   {"ms", 0.001}}};
constexpr std::array<UnitScale, 4> kSpeedUnits{{{"km/h", 1.0}, {"kmh", 1.0}, {"kph", 1.0}, {"m/s", 3.6}}};

double parse_quantity(std::string_view text, Quantity q) {
  switch (q) {
    case Quantity::kLength: return parse_length(text);
    case Quantity::kDuration: return parse_duration(text);
    case Quantity::kSpeed: return parse_speed(text);
    case Quantity::kNumber: return parse_number(text);
  }
  return 0.0;
}

// Returns the unit suffix of `text`, or empty if it carries none.
std::string_view suffix_of(std::string_view text) {
  text = trim(text);
  std::size_t i = 0;
  while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
                             text[i] == '-' || text[i] == '+' || text[i] == 'e' || text[i] == 'E')) {
    // 'e' is ambiguous with an exponent only if followed by a digit or sign.
    if ((text[i] == 'e' || text[i] == 'E') &&
        !(i + 1 < text.size() && (std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
                                  text[i + 1] == '-' || text[i + 1] == '+'))) {
      break;
    }
    ++i;
  }
  return trim(text.substr(i));
}

}  // namespace

double parse_length(std::string_view text) {
  return parse_with_units(text, kLengthUnits, "a length (e.g. 15km)");
}

double parse_duration(std::string_view text) {
  return parse_with_units(text, kDurationUnits, "a duration (e.g. 30min, 2h)");
}

double parse_speed(std::string_view text) {
  return parse_with_units(text, kSpeedUnits, "a speed (e.g. 20km/h)");
}

double parse_number(std::string_view text) {
  auto [value, suffix] = split_number(text, "a number");
  if (!suffix.empty()) bad_value(text, "a number");
  return value;
}

long long parse_integer(std::string_view text) {
  auto t = trim(text);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) bad_value(text, "an integer");
  return value;
}

bool parse_bool(std::string_view text) {
  auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad_value(text, "a boolean");
}

RealRange parse_range(std::string_view text, Quantity quantity) {
  auto t = trim(text);
  auto dots = t.find("..");
  if (dots == std::string_view::npos) {
    double v = parse_quantity(t, quantity);
    return {v, v};
  }
  std::string left(trim(t.substr(0, dots)));
  std::string_view right = trim(t.substr(dots + 2));
  if (quantity != Quantity::kNumber && suffix_of(left).empty()) left += std::string(suffix_of(right));
  RealRange r{parse_quantity(left, quantity), parse_quantity(right, quantity)};
  if (r.lo > r.hi) bad_value(text, "a non-empty range (lo..hi)");
  return r;
}

IntRange parse_int_range(std::string_view text) {
  auto t = trim(text);
  auto dots = t.find("..");
  if (dots == std::string_view::npos) {
    auto v = parse_integer(t);
    return {v, v};
  }
  IntRange r{parse_integer(t.substr(0, dots)), parse_integer(t.substr(dots + 2))};
  if (r.lo > r.hi) bad_value(text, "a non-empty range (lo..hi)");
  return r;
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

std::string format_fixed(double value, int digits) {
  std::array<char, 64> buf{};
  int n = std::snprintf(buf.data(), buf.size(), "%.*f", digits, value);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

std::string format_duration(double seconds) {
  if (std::fmod(seconds, kSecondsPerHour) == 0.0) return format_number(seconds / kSecondsPerHour) + "h";
  if (std::fmod(seconds, kSecondsPerMinute) == 0.0) return format_number(seconds / kSecondsPerMinute) + "min";
  return format_number(seconds) + "s";
}

std::string format_length(double km) { return format_number(km) + "km"; }

std::string format_speed(double kmh) { return format_number(kmh) + "km/h"; }

}  // namespace dtnsim
