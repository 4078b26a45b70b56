#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace parknet {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One paid-parking transaction. Timestamps are minutes since
// 1970-01-01T00:00 in one (naive) local timezone; minute resolution
// is all the load computation uses.
struct TransactionRecord {
    std::string block_id;
    std::int64_t start_minute = 0;
    double paid_minutes = 0.0;
};

// "2016-03-01T08:30", "2016-03-01 08:30:00" and date-only forms; seconds
// are accepted and truncated toward the minute.
std::int64_t parse_minute_timestamp(std::string_view text);
std::string format_minute_timestamp(std::int64_t minute);
int weekday_of_minute(std::int64_t minute); // 0 = Sunday .. 6 = Saturday

// Which hourly buckets the load aggregation keeps. Not hard-coded anywhere:
// paid_hours() is the 8AM-8PM Mon-Sat convention, all() keeps everything.
struct HoursMask {
    int start_hour = 0; // inclusive
    int end_hour = 24;  // exclusive
    std::array<bool, 7> days{true, true, true, true, true, true, true}; // Sun..Sat

    bool contains(std::int64_t hour_start_minute) const;
    static HoursMask all() { return HoursMask{}; }
    static HoursMask paid_hours();
};

struct OccupancyRecord {
    std::string block_id;
    std::int64_t hour_start_minute = 0;
    double load = 0.0;         // paid spaces / supply, can exceed 1
    double clamped_load = 0.0; // min(load, 0.99)
};

inline constexpr double kLoadClamp = 0.99;

// Minute-resolution load counting: a transaction occupies one space for the
// minutes [start, start + ceil(paid)), hourly load is the mean of the 60
// per-minute loads. Records are emitted for every (block, masked hour) in
// the span covered by the transactions, zeros included.
std::vector<OccupancyRecord> compute_loads(const std::vector<TransactionRecord>& transactions,
                                           const std::map<std::string, int>& supply,
                                           const HoursMask& mask = HoursMask::all());

struct ExponentialFit {
    double rate = 0.0; // per minute, maximum likelihood: 1 / mean gap
    std::size_t sample_count = 0;
    double ks_statistic = 0.0; // diagnostic only, no accept/reject built in
};

// Fits the gaps between consecutive transaction start times at one block.
ExponentialFit fit_exponential_interarrivals(const std::vector<TransactionRecord>& transactions,
                                             const std::string& block_id);

struct BlockParameters {
    std::string block_id;
    int supply = 0;
    double mean_paid_minutes = 0.0;
    double median_paid_minutes = 0.0;
    double service_rate = 0.0; // 1 / median, per minute
    std::vector<double> service_samples;
};

// Aggregates per-block service statistics. Blocks in the supply map with no
// transactions are simply absent from the result (missing, not defaulted).
std::map<std::string, BlockParameters> block_parameters(
    const std::vector<TransactionRecord>& transactions,
    const std::map<std::string, int>& supply);

// --- file ingestion ------------------------------------------------------
// Lines are `block_id,start_iso8601,paid_minutes`; a header is auto-detected.
// In lenient mode malformed lines are skipped and reported with their line
// number; otherwise the first bad line throws ParseError.

struct TransactionParse {
    std::vector<TransactionRecord> records;
    std::vector<std::string> skipped; // "line N: why" (lenient mode only)
};

TransactionParse read_transactions(std::istream& in, bool lenient = false);

// `block_id,spaces`, header auto-detected.
std::map<std::string, int> read_supply(std::istream& in, bool lenient = false);

} // namespace parknet
