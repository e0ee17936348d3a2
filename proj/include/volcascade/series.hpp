#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace volcascade {

/// One intraday sample: minute offset within the session and the log price.
struct Sample {
    int minute = 0;
    double log_price = 0.0;
};

using Session = std::vector<Sample>;

/// Price history of a single issue, split into trading sessions.
/// Timestamps are strictly increasing within a session; sessions are
/// ordered and non-overlapping; every session has at least two samples.
struct IssueSeries {
    std::string issue_id;
    std::vector<Session> sessions;
};

/// Cumulated cross-sectional return path Z(k dt). Overnight changes are
/// excised; session_breaks holds the indices in `values` where a new
/// session starts (index of its first return).
struct SeriesPath {
    std::vector<double> values;
    double dt_minutes = 1.0;
    std::vector<std::size_t> session_breaks;

    std::size_t length() const { return values.size(); }
};

void save_series_path(const SeriesPath& path, const std::string& csv_path,
                      const std::string& json_path);
SeriesPath load_series_path(const std::string& csv_path, const std::string& json_path);

}  // namespace volcascade
