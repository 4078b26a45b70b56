#include "parknet/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace parknet {

namespace {

// days since 1970-01-01 for a civil date (Gregorian, proleptic)
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yr + (m <= 2));
}

bool parse_int_field(std::string_view s, int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

int days_in_month(int y, int m) {
    static const int dm[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) return 29;
    return dm[m - 1];
}

} // namespace

std::int64_t parse_minute_timestamp(std::string_view text) {
    // YYYY-MM-DD[{T| }HH:MM[:SS]]
    auto fail = [&] {
        throw ParseError("bad timestamp '" + std::string(text) + "'");
    };
    if (text.size() < 10) fail();
    int y, mo, d, hh = 0, mm = 0;
    if (text[4] != '-' || text[7] != '-') fail();
    if (!parse_int_field(text.substr(0, 4), y) || !parse_int_field(text.substr(5, 2), mo) ||
        !parse_int_field(text.substr(8, 2), d))
        fail();
    if (text.size() > 10) {
        if ((text[10] != 'T' && text[10] != ' ') || text.size() < 16 || text[13] != ':')
            fail();
        if (!parse_int_field(text.substr(11, 2), hh) || !parse_int_field(text.substr(14, 2), mm))
            fail();
        if (text.size() > 16) {
            int ss;
            if (text[16] != ':' || text.size() != 19 || !parse_int_field(text.substr(17, 2), ss) ||
                ss < 0 || ss > 59)
                fail();
        }
    }
    if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo) || hh < 0 || hh > 23 ||
        mm < 0 || mm > 59)
        fail();
    return days_from_civil(y, mo, d) * 1440 + hh * 60 + mm;
}

std::string format_minute_timestamp(std::int64_t minute) {
    std::int64_t days = minute / 1440;
    int rem = static_cast<int>(minute % 1440);
    if (rem < 0) {
        rem += 1440;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d", y, m, d, rem / 60, rem % 60);
    return buf;
}

int weekday_of_minute(std::int64_t minute) {
    std::int64_t days = minute / 1440;
    if (minute % 1440 < 0) --days;
    const std::int64_t wd = (days + 4) % 7; // 1970-01-01 was a Thursday
    return static_cast<int>(wd < 0 ? wd + 7 : wd);
}

bool HoursMask::contains(std::int64_t hour_start_minute) const {
    std::int64_t hour = hour_start_minute / 60 % 24;
    if (hour < 0) hour += 24;
    return days[static_cast<std::size_t>(weekday_of_minute(hour_start_minute))] &&
           hour >= start_hour && hour < end_hour;
}

HoursMask HoursMask::paid_hours() {
    HoursMask m;
    m.start_hour = 8;
    m.end_hour = 20;
    m.days = {false, true, true, true, true, true, true}; // Mon-Sat
    return m;
}

std::vector<OccupancyRecord> compute_loads(const std::vector<TransactionRecord>& transactions,
                                           const std::map<std::string, int>& supply,
                                           const HoursMask& mask) {
    for (const auto& [id, spaces] : supply)
        if (spaces < 1)
            throw std::invalid_argument("compute_loads: zero supply at block '" + id + "'");

    // +1/-1 occupancy deltas on the minute grid, intervals rounded outward
    std::map<std::string, std::vector<std::pair<std::int64_t, int>>> deltas;
    std::int64_t lo = 0, hi = 0;
    bool any = false;
    for (const auto& tr : transactions) {
        if (!supply.count(tr.block_id))
            throw std::invalid_argument("compute_loads: unknown block '" + tr.block_id + "'");
        if (!(tr.paid_minutes > 0.0))
            throw std::invalid_argument("compute_loads: nonpositive paid duration at '" +
                                        tr.block_id + "'");
        const std::int64_t start = tr.start_minute;
        const std::int64_t end =
            start + static_cast<std::int64_t>(std::ceil(tr.paid_minutes));
        auto& dv = deltas[tr.block_id];
        dv.emplace_back(start, +1);
        dv.emplace_back(end, -1);
        if (!any) {
            lo = start;
            hi = end;
            any = true;
        } else {
            lo = std::min(lo, start);
            hi = std::max(hi, end);
        }
    }

    std::vector<OccupancyRecord> out;
    if (!any) return out;

    const std::int64_t hour_lo = lo / 60 - (lo % 60 < 0 ? 1 : 0);
    const std::int64_t hour_hi = (hi + 59) / 60;

    for (const auto& [block, spaces] : supply) {
        auto it = deltas.find(block);
        static const std::vector<std::pair<std::int64_t, int>> none;
        std::vector<std::pair<std::int64_t, int>> ev = it == deltas.end() ? none : it->second;
        std::sort(ev.begin(), ev.end());

        std::size_t cursor = 0;
        long active = 0;
        for (std::int64_t h = hour_lo; h < hour_hi; ++h) {
            const std::int64_t h_start = h * 60;
            long minute_sum = 0;
            for (int m = 0; m < 60; ++m) {
                const std::int64_t t = h_start + m;
                while (cursor < ev.size() && ev[cursor].first <= t)
                    active += ev[cursor++].second;
                minute_sum += active;
            }
            if (!mask.contains(h_start)) continue;
            OccupancyRecord rec;
            rec.block_id = block;
            rec.hour_start_minute = h_start;
            rec.load = static_cast<double>(minute_sum) / (60.0 * spaces);
            rec.clamped_load = std::min(rec.load, kLoadClamp);
            out.push_back(std::move(rec));
        }
    }
    return out;
}

ExponentialFit fit_exponential_interarrivals(const std::vector<TransactionRecord>& transactions,
                                             const std::string& block_id) {
    std::vector<std::int64_t> starts;
    for (const auto& tr : transactions)
        if (tr.block_id == block_id) starts.push_back(tr.start_minute);
    if (starts.size() < 2)
        throw std::invalid_argument("fit_exponential_interarrivals: need at least 2 "
                                    "transactions at block '" + block_id + "'");
    std::sort(starts.begin(), starts.end());

    std::vector<double> gaps(starts.size() - 1);
    for (std::size_t i = 1; i < starts.size(); ++i)
        gaps[i - 1] = static_cast<double>(starts[i] - starts[i - 1]);
    const double mean_gap = std::accumulate(gaps.begin(), gaps.end(), 0.0) /
                            static_cast<double>(gaps.size());
    if (mean_gap <= 0.0)
        throw std::invalid_argument("fit_exponential_interarrivals: all transactions at '" +
                                    block_id + "' share one minute, rate undefined");

    ExponentialFit fit;
    fit.rate = 1.0 / mean_gap;
    fit.sample_count = gaps.size();

    std::sort(gaps.begin(), gaps.end());
    const double n = static_cast<double>(gaps.size());
    double d = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double f = 1.0 - std::exp(-fit.rate * gaps[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f,
                      f - static_cast<double>(i) / n});
    }
    fit.ks_statistic = d;
    return fit;
}

std::map<std::string, BlockParameters> block_parameters(
    const std::vector<TransactionRecord>& transactions,
    const std::map<std::string, int>& supply) {
    std::map<std::string, std::vector<double>> durations;
    for (const auto& tr : transactions) {
        if (!supply.count(tr.block_id))
            throw std::invalid_argument("block_parameters: no supply entry for block '" +
                                        tr.block_id + "'");
        durations[tr.block_id].push_back(tr.paid_minutes);
    }

    std::map<std::string, BlockParameters> out;
    for (auto& [block, samples] : durations) {
        BlockParameters bp;
        bp.block_id = block;
        bp.supply = supply.at(block);
        bp.mean_paid_minutes = std::accumulate(samples.begin(), samples.end(), 0.0) /
                               static_cast<double>(samples.size());
        std::vector<double> sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        bp.median_paid_minutes =
            n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        bp.service_rate = 1.0 / bp.median_paid_minutes;
        bp.service_samples = std::move(samples);
        out[block] = std::move(bp);
    }
    return out;
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view f = comma == std::string_view::npos
                                 ? line.substr(start)
                                 : line.substr(start, comma - start);
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r'))
            f.remove_suffix(1);
        fields.push_back(f);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

bool parse_double_field(std::string_view s, double& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

} // namespace

TransactionParse read_transactions(std::istream& in, bool lenient) {
    TransactionParse result;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;

    auto bad = [&](const std::string& why) {
        if (lenient) {
            result.skipped.push_back("line " + std::to_string(line_no) + ": " + why);
            return;
        }
        throw ParseError("transactions line " + std::to_string(line_no) + ": " + why);
    };

    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_csv(line);
        if (fields.size() == 1 && fields[0].empty()) continue; // blank line

        double paid = 0.0;
        std::int64_t start = 0;
        bool parses = fields.size() == 3 && !fields[0].empty() &&
                      parse_double_field(fields[2], paid);
        if (parses) {
            try {
                start = parse_minute_timestamp(fields[1]);
            } catch (const ParseError&) {
                parses = false;
            }
        }
        // only a first line whose fields do not even parse counts as a header
        if (!parses && first_content) {
            first_content = false;
            continue;
        }
        first_content = false;
        if (!parses) {
            bad("malformed record '" + line + "'");
            continue;
        }
        if (!(paid > 0.0)) {
            bad("nonpositive paid_minutes in '" + line + "'");
            continue;
        }
        result.records.push_back(TransactionRecord{std::string(fields[0]), start, paid});
    }
    return result;
}

std::map<std::string, int> read_supply(std::istream& in, bool lenient) {
    std::map<std::string, int> out;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;

    auto bad = [&](const std::string& why) {
        if (!lenient)
            throw ParseError("supply line " + std::to_string(line_no) + ": " + why);
    };

    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_csv(line);
        if (fields.size() == 1 && fields[0].empty()) continue;

        int spaces = 0;
        const bool parses = fields.size() == 2 && !fields[0].empty() &&
                            parse_int_field(fields[1], spaces);
        if (!parses && first_content) {
            first_content = false; // header row
            continue;
        }
        first_content = false;
        if (!parses) {
            bad("malformed supply row '" + line + "'");
            continue;
        }
        if (spaces < 1) {
            bad("supply must be >= 1 in '" + line + "'");
            continue;
        }
        const std::string id(fields[0]);
        if (out.count(id)) {
            bad("duplicate block '" + id + "'");
            continue;
        }
        out[id] = spaces;
    }
    return out;
}

} // namespace parknet
