#include "optbench/dates.hpp"

#include "optbench/errors.hpp"

#include <cstdio>

namespace optbench {

Date make_date(int y, unsigned m, unsigned d) {
    // Howard Hinnant's days_from_civil.
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<Date>(era) * 146097 + static_cast<Date>(doe) - 719468;
}

Date parse_date(const std::string& text) {
    int y = 0;
    unsigned m = 0, d = 0;
    if (text.size() < 10 || std::sscanf(text.c_str(), "%4d-%2u-%2u", &y, &m, &d) != 3 ||
        text[4] != '-' || text[7] != '-' || m < 1 || m > 12 || d < 1 || d > 31) {
        throw DataError("malformed date '" + text + "' (expected YYYY-MM-DD)");
    }
    return make_date(y, m, d);
}

std::string format_date(Date z) {
    // civil_from_days, inverse of the above.
    z += 719468;
    const Date era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const Date y = static_cast<Date>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u",
                  static_cast<long long>(y + (m <= 2)), m, d);
    return buf;
}

} // namespace optbench
