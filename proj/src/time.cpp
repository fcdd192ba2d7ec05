#include "leakcred/time.hpp"

#include <array>
#include <cctype>
#include <cstdio>

namespace leakcred {

namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

std::optional<Timestamp> checked(int y, int mo, int d, int h, int mi, int sec) {
    using namespace std::chrono;
    if (mo < 1 || mo > 12 || d < 1 || h > 23 || mi > 59 || sec > 60) return std::nullopt;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    // Leap second folds onto the following instant.
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

int month_from_name(std::string_view name) {
    static constexpr std::array<std::string_view, 12> kMonths = {
        "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    for (std::size_t i = 0; i < kMonths.size(); ++i) {
        if (name == kMonths[i]) return static_cast<int>(i) + 1;
    }
    return 0;
}

bool read_clock(std::string_view s, std::size_t pos, int& h, int& mi, int& sec) {
    return read_digits(s, pos, 2, h) && pos + 2 < s.size() && s[pos + 2] == ':' &&
           read_digits(s, pos + 3, 2, mi) && pos + 5 < s.size() && s[pos + 5] == ':' &&
           read_digits(s, pos + 6, 2, sec);
}

}  // namespace

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour, int minute,
                         int second) {
    using namespace std::chrono;
    return sys_days{year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                   std::chrono::day{day}}} +
           hours{hour} + minutes{minute} + seconds{second};
}

std::optional<Timestamp> parse_rfc3339(std::string_view s) {
    int y, mo, d, h, mi, sec;
    if (!read_digits(s, 0, 4, y) || s.size() < 20 || s[4] != '-' || !read_digits(s, 5, 2, mo) ||
        s[7] != '-' || !read_digits(s, 8, 2, d))
        return std::nullopt;
    if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
    if (!read_clock(s, 11, h, mi, sec)) return std::nullopt;
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) return std::nullopt;
    }
    if (pos >= s.size()) return std::nullopt;
    int offset_minutes = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        int oh, om;
        if (!read_digits(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !read_digits(s, pos + 4, 2, om) || oh > 23 || om > 59)
            return std::nullopt;
        offset_minutes = (s[pos] == '+' ? 1 : -1) * (oh * 60 + om);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) return std::nullopt;
    auto t = checked(y, mo, d, h, mi, sec);
    if (!t) return std::nullopt;
    return *t - std::chrono::minutes{offset_minutes};
}

std::string format_rfc3339(Timestamp t) {
    using namespace std::chrono;
    auto days = floor<std::chrono::days>(t);
    year_month_day ymd{days};
    hh_mm_ss<seconds> tod{t - days};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
    return buf;
}

std::optional<Timestamp> parse_http_date(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    auto comma = s.find(',');
    int y, d, h, mi, sec;
    if (comma == 3) {
        // IMF-fixdate: "Sun, 06 Nov 1994 08:49:37 GMT"
        if (s.size() != 29 || !read_digits(s, 5, 2, d) || s[7] != ' ') return std::nullopt;
        int mo = month_from_name(s.substr(8, 3));
        if (mo == 0 || s[11] != ' ' || !read_digits(s, 12, 4, y) || s[16] != ' ' ||
            !read_clock(s, 17, h, mi, sec) || s.substr(25) != " GMT")
            return std::nullopt;
        return checked(y, mo, d, h, mi, sec);
    }
    if (comma != std::string_view::npos) {
        // RFC 850: "Sunday, 06-Nov-94 08:49:37 GMT"
        auto rest = s.substr(comma + 1);
        if (rest.size() != 23 || rest[0] != ' ' || !read_digits(rest, 1, 2, d) || rest[3] != '-')
            return std::nullopt;
        int mo = month_from_name(rest.substr(4, 3));
        if (mo == 0 || rest[7] != '-' || !read_digits(rest, 8, 2, y) || rest[10] != ' ' ||
            !read_clock(rest, 11, h, mi, sec) || rest.substr(19) != " GMT")
            return std::nullopt;
        y += y < 70 ? 2000 : 1900;
        return checked(y, mo, d, h, mi, sec);
    }
    // asctime: "Sun Nov  6 08:49:37 1994"
    if (s.size() != 24 || s[3] != ' ' || s[7] != ' ') return std::nullopt;
    int mo = month_from_name(s.substr(4, 3));
    if (mo == 0) return std::nullopt;
    if (s[8] == ' ') {
        if (!read_digits(s, 9, 1, d)) return std::nullopt;
    } else if (!read_digits(s, 8, 2, d)) {
        return std::nullopt;
    }
    if (s[10] != ' ' || !read_clock(s, 11, h, mi, sec) || s[19] != ' ' ||
        !read_digits(s, 20, 4, y))
        return std::nullopt;
    return checked(y, mo, d, h, mi, sec);
}

std::optional<Timestamp> parse_compact14(std::string_view s) {
    int y, mo, d, h, mi, sec;
    if (s.size() != 14 || !read_digits(s, 0, 4, y) || !read_digits(s, 4, 2, mo) ||
        !read_digits(s, 6, 2, d) || !read_digits(s, 8, 2, h) || !read_digits(s, 10, 2, mi) ||
        !read_digits(s, 12, 2, sec))
        return std::nullopt;
    return checked(y, mo, d, h, mi, sec);
}

}  // namespace leakcred
