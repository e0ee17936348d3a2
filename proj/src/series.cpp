#include "volcascade/series.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace volcascade {

void save_series_path(const SeriesPath& path, const std::string& csv_path,
                      const std::string& json_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open " + csv_path + " for writing");
    csv << "index,Z\n";
    csv.precision(17);
    for (std::size_t i = 0; i < path.values.size(); ++i)
        csv << i << ',' << path.values[i] << '\n';

    nlohmann::json j;
    j["dt"] = path.dt_minutes;
    j["L"] = path.values.size();
    j["session_breaks"] = path.session_breaks;
    std::ofstream js(json_path);
    if (!js) throw std::runtime_error("cannot open " + json_path + " for writing");
    js << j.dump(2) << '\n';
}

SeriesPath load_series_path(const std::string& csv_path, const std::string& json_path) {
    std::ifstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open " + csv_path);
    SeriesPath path;
    std::string line;
    std::getline(csv, line);  // header
    std::size_t line_no = 1;
    while (std::getline(csv, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error(csv_path + ": malformed row at line " +
                                     std::to_string(line_no));
        path.values.push_back(std::stod(line.substr(comma + 1)));
    }

    std::ifstream js(json_path);
    if (!js) throw std::runtime_error("cannot open " + json_path);
    nlohmann::json j;
    js >> j;
    path.dt_minutes = j.at("dt").get<double>();
    path.session_breaks = j.at("session_breaks").get<std::vector<std::size_t>>();
    if (j.at("L").get<std::size_t>() != path.values.size())
        throw std::runtime_error("series sidecar L does not match CSV row count");
    return path;
}

}  // namespace volcascade
