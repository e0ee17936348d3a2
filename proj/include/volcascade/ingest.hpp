#pragma once

#include "volcascade/series.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace volcascade {

/// Column mapping for the input CSV. A header row is required; names are
/// matched case-insensitively.
struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::string issue_column = "issue";
    std::string price_column = "price";
};

/// Load intraday prices. Timestamps are ISO "YYYY-MM-DD HH:MM[:SS]";
/// each calendar date forms one session. Prices must be positive and are
/// stored as logarithms. Missing minutes are forward-filled up to
/// `max_gap_minutes` consecutive gaps; sessions with longer gaps, fewer
/// than two samples, or a length different from the file's modal session
/// length are dropped (a notice goes to `warnings`).
std::vector<IssueSeries> load_csv(const std::string& path, const CsvSchema& schema,
                                  std::vector<std::string>* warnings = nullptr,
                                  int max_gap_minutes = 5);

/// Per-issue standardization statistics plus the intraday volatility
/// profile used for deseasonalization. All sigmas are strictly positive.
struct Deseasonalizer {
    struct IssueStats {
        std::string issue_id;
        double mu = 0.0;     // mean of the deseasonalized returns
        double sigma = 1.0;  // their standard deviation
        std::vector<double> profile;  // per-return-slot sd of raw returns
    };
    std::vector<IssueStats> issues;
    int dt_minutes = 1;
    int slots_per_session = 0;
};

/// Per-issue deseasonalized returns aligned on (session, slot).
struct IssueReturns {
    std::string issue_id;
    std::vector<std::vector<double>> sessions;  // [session][slot]
};

/// Compute lag-dt intraday returns, divide each by the sd of its time of
/// day, and collect per-issue standardization stats. Overnight changes are
/// excluded. Profile slots with fewer than `min_bucket_obs` observations
/// fall back to the session-wide sd.
std::pair<std::vector<IssueReturns>, Deseasonalizer> deseasonalize(
    const std::vector<IssueSeries>& series, int dt_minutes, int min_bucket_obs = 5);

/// Cross-sectional average of standardized returns, cumulated into Z(t).
/// All issues must be aligned on the same (session, slot) grid.
SeriesPath average_path(const std::vector<IssueReturns>& returns,
                        const Deseasonalizer& stats);

}  // namespace volcascade
