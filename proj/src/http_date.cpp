#include "spider/http_date.hpp"

#include "spider/errors.hpp"

#include <array>
#include <cstdio>

namespace spider::http {
namespace {

constexpr std::array<std::string_view, 7> kWeekdays{
    "Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
constexpr std::array<std::string_view, 12> kMonths{
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

// Proleptic Gregorian day number relative to 1970-01-01, valid across the
// whole int64 second range we care about.
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    unsigned yoe = static_cast<unsigned>(y - era * 400);
    unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
    std::int64_t year;
    int month;
    int day;
};

Civil civil_from_days(std::int64_t z) {
    z += 719468;
    std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    unsigned doe = static_cast<unsigned>(z - era * 146097);
    unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    unsigned mp = (5 * doy + 2) / 153;
    unsigned d = doy - (153 * mp + 2) / 5 + 1;
    unsigned m = mp + (mp < 10 ? 3 : -9);
    return {y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
}

int weekday_from_days(std::int64_t z) {
    // 1970-01-01 was a Thursday (index 4 with Sunday = 0).
    return static_cast<int>(z >= -4 ? (z + 4) % 7 : (z + 5) % 7 + 6);
}

int digit(std::string_view text, std::size_t at) {
    char c = text[at];
    if (c < '0' || c > '9')
        throw ParseError("expected a digit in date", at);
    return c - '0';
}

int two_digits(std::string_view text, std::size_t at) {
    return digit(text, at) * 10 + digit(text, at + 1);
}

void expect(std::string_view text, std::size_t at, char c) {
    if (text[at] != c)
        throw ParseError(std::string("expected '") + c + "' in date", at);
}

bool leap(std::int64_t y) {
    return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

int days_in_month(std::int64_t y, int m) {
    constexpr std::array<int, 12> lengths{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && leap(y)) return 29;
    return lengths[static_cast<std::size_t>(m - 1)];
}

} // namespace

HttpDate parse_http_date(std::string_view text) {
    // Layout: "Wdy, DD Mon YYYY HH:MM:SS GMT", always 29 characters.
    if (text.size() != 29)
        throw ParseError("date must be exactly 29 characters", 0);

    std::string_view wday = text.substr(0, 3);
    bool known_wday = false;
    for (auto name : kWeekdays) known_wday = known_wday || name == wday;
    if (!known_wday)
        throw ParseError("unrecognized weekday abbreviation", 0);
    expect(text, 3, ',');
    expect(text, 4, ' ');

    int day = two_digits(text, 5);
    expect(text, 7, ' ');

    std::string_view mon = text.substr(8, 3);
    int month = 0;
    for (std::size_t i = 0; i < kMonths.size(); ++i) {
        if (kMonths[i] == mon) month = static_cast<int>(i) + 1;
    }
    if (month == 0)
        throw ParseError("unrecognized month abbreviation", 8);
    expect(text, 11, ' ');

    std::int64_t year = 0;
    for (std::size_t i = 12; i < 16; ++i) year = year * 10 + digit(text, i);
    expect(text, 16, ' ');

    int hour = two_digits(text, 17);
    expect(text, 19, ':');
    int minute = two_digits(text, 20);
    expect(text, 22, ':');
    int second = two_digits(text, 23);
    expect(text, 25, ' ');
    if (text.substr(26, 3) != "GMT")
        throw ParseError("date must end with \"GMT\"", 26);

    if (day < 1 || day > days_in_month(year, month))
        throw ParseError("day of month out of range", 5);
    if (hour > 23) throw ParseError("hour out of range", 17);
    if (minute > 59) throw ParseError("minute out of range", 20);
    if (second > 59) throw ParseError("second out of range", 23);

    std::int64_t days = days_from_civil(year, month, day);
    return HttpDate{days * 86400 + hour * 3600 + minute * 60 + second};
}

std::string format_http_date(HttpDate date) {
    std::int64_t s = date.epoch_seconds;
    std::int64_t days = s / 86400;
    std::int64_t rem = s % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    Civil c = civil_from_days(days);
    if (c.year < 0 || c.year > 9999)
        throw CodecError("year does not fit the four-digit date format");
    int wd = weekday_from_days(days);

    char buf[32];
    std::snprintf(buf, sizeof buf, "%s, %02d %s %04d %02d:%02d:%02d GMT",
                  kWeekdays[static_cast<std::size_t>(wd)].data(), c.day,
                  kMonths[static_cast<std::size_t>(c.month - 1)].data(),
                  static_cast<int>(c.year), static_cast<int>(rem / 3600),
                  static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
    return std::string(buf);
}

} // namespace spider::http
