#include "pem/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pem/errors.hpp"

namespace pem {

std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string csv_to_string(const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) {
            throw std::invalid_argument("csv: row width does not match header");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_number(row[i]);
        }
        out << '\n';
    }
    return out.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("csv: cannot open '" + path + "' for writing");
    }
    out << csv_to_string(header, rows);
}

void write_trajectory_csv(const std::string& path, const Eigen::VectorXd& outputs,
                          const Eigen::VectorXd& noise) {
    const bool have_noise = noise.size() > 0;
    if (have_noise && noise.size() != outputs.size()) {
        throw std::invalid_argument("trajectory csv: Y and W lengths differ");
    }
    std::vector<std::string> header = have_noise ? std::vector<std::string>{"t", "Y", "W"}
                                                 : std::vector<std::string>{"t", "Y"};
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(outputs.size()));
    for (Eigen::Index t = 0; t < outputs.size(); ++t) {
        std::vector<double> row{static_cast<double>(t), outputs[t]};
        if (have_noise) {
            row.push_back(noise[t]);
        }
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

TrajectoryCsv read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("csv: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("csv: '" + path + "' is empty");
    }
    const bool have_noise = line == "t,Y,W";
    if (!have_noise && line != "t,Y") {
        throw ConfigError("csv: '" + path + "' must start with header 't,Y' or 't,Y,W'");
    }
    std::vector<double> outputs;
    std::vector<double> noise;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(row, cell, ',')) {
            try {
                cells.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("csv: non-numeric cell '" + cell + "' in '" + path + "'");
            }
        }
        if (cells.size() != (have_noise ? 3u : 2u)) {
            throw ConfigError("csv: malformed row in '" + path + "'");
        }
        outputs.push_back(cells[1]);
        if (have_noise) {
            noise.push_back(cells[2]);
        }
    }
    TrajectoryCsv result;
    result.outputs = Eigen::Map<const Eigen::VectorXd>(outputs.data(),
                                                       static_cast<Eigen::Index>(outputs.size()));
    if (have_noise) {
        result.noise = Eigen::Map<const Eigen::VectorXd>(noise.data(),
                                                         static_cast<Eigen::Index>(noise.size()));
    }
    return result;
}

}  // namespace pem
