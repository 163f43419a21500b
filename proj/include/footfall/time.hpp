#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "footfall/errors.hpp"

namespace footfall {

// Seconds since the Unix epoch, UTC. One-second resolution is all the
// probe logs carry, so a plain integer beats dragging chrono through
// every interface.
using TimePoint = std::int64_t;
using Duration = std::int64_t;  // seconds

inline constexpr Duration kStepSeconds = 300;
inline constexpr Duration kSecondsPerDay = 86400;

// Floor division that stays correct for pre-epoch instants.
constexpr TimePoint floor_to(TimePoint t, Duration step) {
    TimePoint q = t / step;
    if (t % step != 0 && t < 0) --q;
    return q * step;
}

constexpr bool is_aligned(TimePoint t, Duration step) { return floor_to(t, step) == t; }

namespace detail {

// Days-from-civil / civil-from-days, the classic proleptic-Gregorian
// conversion (valid far beyond any study window we care about).
constexpr std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
    int year;
    unsigned month;
    unsigned day;
};

constexpr Civil civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), m, d};
}

}  // namespace detail

// Parses RFC 3339 timestamps: "2017-03-01T12:34:56Z" or with a numeric
// offset "+01:00" / "-0500". Fractional seconds are accepted and truncated.
inline TimePoint parse_rfc3339(std::string_view s) {
    auto fail = [&] { throw InvalidParameter("bad RFC3339 timestamp: " + std::string(s)); };
    auto digits = [&](std::size_t pos, std::size_t n) -> long {
        if (pos + n > s.size()) fail();
        long v = 0;
        for (std::size_t i = 0; i < n; ++i) {
            char c = s[pos + i];
            if (c < '0' || c > '9') fail();
            v = v * 10 + (c - '0');
        }
        return v;
    };
    if (s.size() < 20) fail();
    long y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2);
    long h = digits(11, 2), mi = digits(14, 2), sec = digits(17, 2);
    if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
        s[13] != ':' || s[16] != ':')
        fail();
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60) fail();
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    }
    if (pos >= s.size()) fail();
    std::int64_t offset = 0;
    char z = s[pos];
    if (z == 'Z' || z == 'z') {
        ++pos;
    } else if (z == '+' || z == '-') {
        long oh = digits(pos + 1, 2);
        std::size_t mpos = pos + 3;
        if (mpos < s.size() && s[mpos] == ':') ++mpos;
        long om = digits(mpos, 2);
        offset = (oh * 3600 + om * 60) * (z == '+' ? 1 : -1);
        pos = mpos + 2;
    } else {
        fail();
    }
    if (pos != s.size()) fail();
    std::int64_t days = detail::days_from_civil(static_cast<int>(y), static_cast<unsigned>(mo),
                                                static_cast<unsigned>(d));
    return days * kSecondsPerDay + h * 3600 + mi * 60 + sec - offset;
}

inline std::string format_rfc3339(TimePoint t) {
    std::int64_t days = t / kSecondsPerDay;
    std::int64_t rem = t % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        --days;
    }
    auto c = detail::civil_from_days(days);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", c.year, c.month, c.day,
                  static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

// Fixed UTC offset standing in for a sensor's civil timezone. Day
// boundaries are taken in this offset; DST is out of scope.
struct UtcOffset {
    int minutes = 0;
};

// Accepts "UTC", "Z", or "+HH:MM" / "-HH:MM".
inline UtcOffset parse_utc_offset(std::string_view s) {
    if (s == "UTC" || s == "utc" || s == "Z" || s == "z" || s.empty()) return {0};
    if ((s[0] == '+' || s[0] == '-') && (s.size() == 6) && s[3] == ':') {
        int h = (s[1] - '0') * 10 + (s[2] - '0');
        int m = (s[4] - '0') * 10 + (s[5] - '0');
        if (s[1] >= '0' && s[1] <= '9' && s[2] >= '0' && s[2] <= '9' && s[4] >= '0' &&
            s[4] <= '9' && s[5] >= '0' && s[5] <= '9' && h <= 23 && m <= 59) {
            int v = h * 60 + m;
            return {s[0] == '+' ? v : -v};
        }
    }
    throw ConfigError("bad timezone (want UTC or +HH:MM): " + std::string(s));
}

inline std::string format_utc_offset(UtcOffset off) {
    if (off.minutes == 0) return "UTC";
    int v = off.minutes < 0 ? -off.minutes : off.minutes;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%c%02d:%02d", off.minutes < 0 ? '-' : '+', v / 60, v % 60);
    return buf;
}

struct CivilDate {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    friend bool operator==(const CivilDate&, const CivilDate&) = default;
    friend auto operator<=>(const CivilDate& a, const CivilDate& b) {
        if (auto c = a.year <=> b.year; c != 0) return c;
        if (auto c = a.month <=> b.month; c != 0) return c;
        return a.day <=> b.day;
    }
};

inline CivilDate civil_date_at(TimePoint t, UtcOffset off) {
    std::int64_t local = t + static_cast<std::int64_t>(off.minutes) * 60;
    std::int64_t days = local >= 0 ? local / kSecondsPerDay
                                   : (local - (kSecondsPerDay - 1)) / kSecondsPerDay;
    auto c = detail::civil_from_days(days);
    return {c.year, c.month, c.day};
}

inline TimePoint day_start(CivilDate d, UtcOffset off) {
    return detail::days_from_civil(d.year, d.month, d.day) * kSecondsPerDay -
           static_cast<std::int64_t>(off.minutes) * 60;
}

inline std::string to_string(CivilDate d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", d.year, d.month, d.day);
    return buf;
}

inline CivilDate parse_civil_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw InvalidParameter("bad date (want YYYY-MM-DD): " + std::string(s));
    auto num = [&](std::size_t pos, std::size_t n) {
        int v = 0;
        for (std::size_t i = 0; i < n; ++i) {
            char c = s[pos + i];
            if (c < '0' || c > '9')
                throw InvalidParameter("bad date (want YYYY-MM-DD): " + std::string(s));
            v = v * 10 + (c - '0');
        }
        return v;
    };
    return {num(0, 4), static_cast<unsigned>(num(5, 2)), static_cast<unsigned>(num(8, 2))};
}

}  // namespace footfall
