#include "volcascade/ingest.hpp"

#include "volcascade/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace volcascade {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string token;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(token);
            token.clear();
        } else if (ch != '\r') {
            token.push_back(ch);
        }
    }
    fields.push_back(token);
    return fields;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

struct ParsedStamp {
    std::string date;  // session key
    int minute = 0;    // minute of day
};

ParsedStamp parse_timestamp(const std::string& raw, std::size_t line_no) {
    // Accepts "YYYY-MM-DD HH:MM" or "YYYY-MM-DDTHH:MM", optional ":SS".
    if (raw.size() < 16 || (raw[10] != ' ' && raw[10] != 'T'))
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": bad timestamp '" + raw + "'");
    ParsedStamp p;
    p.date = raw.substr(0, 10);
    try {
        const int hh = std::stoi(raw.substr(11, 2));
        const int mm = std::stoi(raw.substr(14, 2));
        if (hh < 0 || hh > 23 || mm < 0 || mm > 59) throw std::invalid_argument("range");
        p.minute = hh * 60 + mm;
    } catch (const std::exception&) {
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": bad timestamp '" + raw + "'");
    }
    return p;
}

}  // namespace

std::vector<IssueSeries> load_csv(const std::string& path, const CsvSchema& schema,
                                  std::vector<std::string>* warnings, int max_gap_minutes) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty input file");
    const auto header = split_csv_line(line);
    int ts_col = -1, issue_col = -1, price_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string h = lower(header[i]);
        if (h == lower(schema.timestamp_column)) ts_col = static_cast<int>(i);
        if (h == lower(schema.issue_column)) issue_col = static_cast<int>(i);
        if (h == lower(schema.price_column)) price_col = static_cast<int>(i);
    }
    if (ts_col < 0 || issue_col < 0 || price_col < 0)
        throw std::runtime_error(path + ": header is missing one of the columns '" +
                                 schema.timestamp_column + "', '" + schema.issue_column +
                                 "', '" + schema.price_column + "'");

    // issue -> date -> minute -> log price (map keeps sessions and minutes ordered)
    std::map<std::string, std::map<std::string, std::map<int, double>>> table;
    std::size_t line_no = 1;
    bool any_row = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        any_row = true;
        const auto fields = split_csv_line(line);
        const int needed = std::max({ts_col, issue_col, price_col});
        if (static_cast<int>(fields.size()) <= needed)
            throw std::runtime_error(path + ": malformed row at line " +
                                     std::to_string(line_no));
        double price = 0.0;
        try {
            price = std::stod(fields[static_cast<std::size_t>(price_col)]);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": malformed price at line " +
                                     std::to_string(line_no));
        }
        if (!(price > 0.0))
            throw std::runtime_error(path + ": non-positive price at line " +
                                     std::to_string(line_no));
        const auto stamp =
            parse_timestamp(fields[static_cast<std::size_t>(ts_col)], line_no);
        table[fields[static_cast<std::size_t>(issue_col)]][stamp.date][stamp.minute] =
            std::log(price);
    }
    if (!any_row) throw std::runtime_error(path + ": empty input file");

    std::vector<IssueSeries> out;
    for (auto& [issue, dates] : table) {
        IssueSeries series;
        series.issue_id = issue;
        for (auto& [date, by_minute] : dates) {
            Session session;
            session.reserve(by_minute.size());
            int prev_minute = -1;
            double prev_price = 0.0;
            bool drop = false;
            for (const auto& [minute, logp] : by_minute) {
                if (prev_minute >= 0) {
                    const int gap = minute - prev_minute - 1;
                    if (gap > max_gap_minutes) {
                        drop = true;
                        break;
                    }
                    for (int g = 1; g <= gap; ++g)
                        session.push_back({prev_minute + g, prev_price});
                }
                session.push_back({minute, logp});
                prev_minute = minute;
                prev_price = logp;
            }
            if (drop || session.size() < 2) {
                if (warnings)
                    warnings->push_back("dropped session " + date + " of issue " + issue +
                                        (drop ? " (gap too long)" : " (too short)"));
                continue;
            }
            series.sessions.push_back(std::move(session));
        }
        if (!series.sessions.empty()) out.push_back(std::move(series));
    }

    // Enforce a uniform session length so the intraday profile is well defined.
    std::map<std::size_t, std::size_t> length_votes;
    for (const auto& s : out)
        for (const auto& sess : s.sessions) ++length_votes[sess.size()];
    if (!length_votes.empty()) {
        std::size_t modal = 0, best = 0;
        for (const auto& [len, votes] : length_votes)
            if (votes > best) best = votes, modal = len;
        for (auto& s : out) {
            auto it = std::remove_if(s.sessions.begin(), s.sessions.end(),
                                     [&](const Session& sess) {
                                         if (sess.size() == modal) return false;
                                         if (warnings)
                                             warnings->push_back(
                                                 "dropped off-length session of issue " +
                                                 s.issue_id);
                                         return true;
                                     });
            s.sessions.erase(it, s.sessions.end());
        }
        out.erase(std::remove_if(out.begin(), out.end(),
                                 [](const IssueSeries& s) { return s.sessions.empty(); }),
                  out.end());
    }
    return out;
}

std::pair<std::vector<IssueReturns>, Deseasonalizer> deseasonalize(
    const std::vector<IssueSeries>& series, int dt_minutes, int min_bucket_obs) {
    if (series.empty()) throw std::invalid_argument("deseasonalize: no issues");
    if (dt_minutes < 1) throw std::invalid_argument("deseasonalize: dt must be >= 1");

    Deseasonalizer stats;
    stats.dt_minutes = dt_minutes;
    std::vector<IssueReturns> out;

    for (const auto& issue : series) {
        if (issue.sessions.empty())
            throw std::invalid_argument("deseasonalize: issue " + issue.issue_id +
                                        " has no sessions");
        const std::size_t span = issue.sessions.front().size() - 1;
        if (span % static_cast<std::size_t>(dt_minutes) != 0)
            throw std::invalid_argument("deseasonalize: dt does not divide session length of " +
                                        issue.issue_id);
        const std::size_t slots = span / static_cast<std::size_t>(dt_minutes);

        // Raw lag-dt returns per (session, slot); no cross-session return.
        std::vector<std::vector<double>> raw(issue.sessions.size(),
                                             std::vector<double>(slots, 0.0));
        for (std::size_t si = 0; si < issue.sessions.size(); ++si) {
            const auto& sess = issue.sessions[si];
            if (sess.size() != span + 1)
                throw std::invalid_argument("deseasonalize: ragged sessions for " +
                                            issue.issue_id);
            for (std::size_t k = 0; k < slots; ++k) {
                const std::size_t hi = (k + 1) * static_cast<std::size_t>(dt_minutes);
                const std::size_t lo = k * static_cast<std::size_t>(dt_minutes);
                raw[si][k] = sess[hi].log_price - sess[lo].log_price;
            }
        }

        // Per-slot sd across sessions (the intraday profile).
        std::vector<double> all;
        for (const auto& r : raw) all.insert(all.end(), r.begin(), r.end());
        const double session_wide_sd = all.size() > 1 ? stdev(all) : 0.0;

        std::vector<double> profile(slots, 0.0);
        for (std::size_t k = 0; k < slots; ++k) {
            std::vector<double> bucket;
            bucket.reserve(raw.size());
            for (const auto& r : raw) bucket.push_back(r[k]);
            double sd;
            if (bucket.size() < static_cast<std::size_t>(min_bucket_obs)) {
                sd = session_wide_sd;
            } else {
                sd = stdev(bucket);
            }
            if (!(sd > 0.0))
                throw std::runtime_error("deseasonalize: zero variance in intraday bucket " +
                                         std::to_string(k) + " of issue " + issue.issue_id);
            profile[k] = sd;
        }

        IssueReturns ret;
        ret.issue_id = issue.issue_id;
        ret.sessions.assign(raw.size(), std::vector<double>(slots, 0.0));
        std::vector<double> flat;
        flat.reserve(raw.size() * slots);
        for (std::size_t si = 0; si < raw.size(); ++si)
            for (std::size_t k = 0; k < slots; ++k) {
                ret.sessions[si][k] = raw[si][k] / profile[k];
                flat.push_back(ret.sessions[si][k]);
            }

        Deseasonalizer::IssueStats is;
        is.issue_id = issue.issue_id;
        is.mu = mean(flat);
        is.sigma = flat.size() > 1 ? stdev(flat) : 1.0;
        if (!(is.sigma > 0.0))
            throw std::runtime_error("deseasonalize: zero return variance for issue " +
                                     issue.issue_id);
        is.profile = std::move(profile);
        stats.issues.push_back(std::move(is));
        stats.slots_per_session = static_cast<int>(slots);
        out.push_back(std::move(ret));
    }
    return {std::move(out), std::move(stats)};
}

SeriesPath average_path(const std::vector<IssueReturns>& returns,
                        const Deseasonalizer& stats) {
    if (returns.empty()) throw std::invalid_argument("average_path: no issues");
    if (returns.size() != stats.issues.size())
        throw std::invalid_argument("average_path: stats do not match returns");

    const std::size_t n_sessions = returns.front().sessions.size();
    const std::size_t slots = returns.front().sessions.empty()
                                  ? 0
                                  : returns.front().sessions.front().size();
    std::vector<std::string> misaligned;
    for (const auto& r : returns) {
        bool ok = r.sessions.size() == n_sessions;
        for (const auto& s : r.sessions) ok = ok && s.size() == slots;
        if (!ok) misaligned.push_back(r.issue_id);
    }
    if (!misaligned.empty()) {
        std::string msg = "average_path: issues not aligned on a common grid:";
        for (const auto& id : misaligned) msg += " " + id;
        throw std::invalid_argument(msg);
    }

    SeriesPath path;
    path.dt_minutes = stats.dt_minutes;
    path.values.reserve(n_sessions * slots);
    const double n_f = static_cast<double>(returns.size());
    double z = 0.0;
    for (std::size_t si = 0; si < n_sessions; ++si) {
        if (si > 0) path.session_breaks.push_back(path.values.size());
        for (std::size_t k = 0; k < slots; ++k) {
            double dz = 0.0;
            for (std::size_t i = 0; i < returns.size(); ++i)
                dz += (returns[i].sessions[si][k] - stats.issues[i].mu) /
                      stats.issues[i].sigma;
            dz /= n_f;
            z += dz;
            path.values.push_back(z);
        }
    }
    return path;
}

}  // namespace volcascade
