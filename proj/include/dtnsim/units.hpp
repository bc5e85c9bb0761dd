#pragma once

#include <string>
#include <string_view>

namespace dtnsim {

// Internal units: lengths in km, times in seconds, speeds in km/h.
inline constexpr double kSecondsPerMinute = 60.0;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerDay = 86400.0;

constexpr double hours(double h) { return h * kSecondsPerHour; }
constexpr double minutes(double m) { return m * kSecondsPerMinute; }
constexpr double to_hours(double seconds) { return seconds / kSecondsPerHour; }
constexpr double to_minutes(double seconds) { return seconds / kSecondsPerMinute; }

/// Accepts `km` and `m` suffixes, e.g. "15km", "750m". Returns km.
double parse_length(std::string_view text);

/// Accepts `s`, `min`, `h` and `d` suffixes, e.g. "30min", "2h". Returns seconds.
double parse_duration(std::string_view text);

/// Accepts `km/h`, `kmh`, `kph` and `m/s` suffixes. Returns km/h.
double parse_speed(std::string_view text);

/// Plain decimal number with no suffix; the whole string must be consumed.
double parse_number(std::string_view text);

long long parse_integer(std::string_view text);

bool parse_bool(std::string_view text);

struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const RealRange&) const = default;
};

struct IntRange {
  long long lo = 0;
  long long hi = 0;
  bool operator==(const IntRange&) const = default;
};

enum class Quantity { kLength, kDuration, kSpeed, kNumber };

/// "A..B" or a single value "A" (read as A..A). A bare left side borrows the
/// unit of the right side, so "17.47..21.47km/h" is accepted.
RealRange parse_range(std::string_view text, Quantity quantity);
IntRange parse_int_range(std::string_view text);

/// Canonical spelling used when writing configs back out ("2h", "30min").
std::string format_duration(double seconds);
std::string format_length(double km);
std::string format_speed(double kmh);

/// Shortest round-trip decimal representation of a double.
std::string format_number(double value);

/// Fixed-point with `digits` decimals, "C" locale.
std::string format_fixed(double value, int digits);

}  // namespace dtnsim
