#include "regrid/time.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace regrid {
namespace {

using namespace std::chrono;

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool digits(int count, int& out) {
        if (s_.size() - pos_ < static_cast<std::size_t>(count)) return false;
        int value = 0;
        auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + pos_ + count, value);
        if (ec != std::errc{} || ptr != s_.data() + pos_ + count) return false;
        pos_ += count;
        out = value;
        return true;
    }

    bool literal(char c) {
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool done() const { return pos_ == s_.size(); }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<TimePoint> assemble(int y, int mo, int d, int h, int mi, int sec) {
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

// Optional ":SS" then optional zone designator (Z, +HH:MM, -HHMM).
bool parse_tail(Cursor& c, int& sec, int& offset_minutes) {
    sec = 0;
    offset_minutes = 0;
    if (c.literal(':') && !c.digits(2, sec)) return false;
    if (c.done()) return true;
    if (c.literal('Z')) return c.done();
    const char sign = c.peek();
    if (sign != '+' && sign != '-') return false;
    c.literal(sign);
    int oh = 0, om = 0;
    if (!c.digits(2, oh)) return false;
    c.literal(':');
    if (!c.digits(2, om)) return false;
    offset_minutes = (sign == '+' ? 1 : -1) * (oh * 60 + om);
    return c.done();
}

std::optional<TimePoint> parse_iso(std::string_view s) {
    Cursor c(s);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, off = 0;
    if (!(c.digits(4, y) && c.literal('-') && c.digits(2, mo) && c.literal('-') && c.digits(2, d))) return std::nullopt;
    if (c.done()) return assemble(y, mo, d, 0, 0, 0);
    if (!(c.literal('T') || c.literal(' '))) return std::nullopt;
    if (!(c.digits(2, h) && c.literal(':') && c.digits(2, mi))) return std::nullopt;
    if (!parse_tail(c, sec, off)) return std::nullopt;
    auto t = assemble(y, mo, d, h, mi, sec);
    if (!t) return std::nullopt;
    return *t - minutes{off};
}

std::optional<TimePoint> parse_mdy(std::string_view s) {
    Cursor c(s);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, off = 0;
    if (!(c.digits(2, mo) && c.literal('-') && c.digits(2, d) && c.literal('-') && c.digits(4, y))) return std::nullopt;
    if (c.done()) return assemble(y, mo, d, 0, 0, 0);
    if (!c.literal(' ')) return std::nullopt;
    if (!(c.digits(2, h) && c.literal(':') && c.digits(2, mi))) return std::nullopt;
    if (!parse_tail(c, sec, off) || off != 0) return std::nullopt;
    return assemble(y, mo, d, h, mi, sec);
}

} // namespace

std::optional<TimePoint> parse_timestamp(std::string_view text, TimestampFormat format) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    return format == TimestampFormat::Iso8601 ? parse_iso(text) : parse_mdy(text);
}

std::string format_iso8601(TimePoint t) {
    const auto day_point = floor<days>(t);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{t - day_point};
    return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hms.hours().count(),
                       hms.minutes().count(), hms.seconds().count());
}

} // namespace regrid
