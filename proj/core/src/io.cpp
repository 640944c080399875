#include "havoq/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace havoq::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        throw std::runtime_error("io: cannot open '" + path + "' for writing");
    }
    return f;
}

ordered_json matrix_row_major(const Eigen::MatrixXd& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& rows) {
    if (static_cast<Eigen::Index>(header.size()) != rows.cols()) {
        throw std::invalid_argument("write_csv: header/column mismatch");
    }
    std::ofstream f = open_out(path);
    for (size_t i = 0; i < header.size(); ++i) {
        f << (i ? "," : "") << header[i];
    }
    f << "\n";
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            f << (j ? "," : "") << format_g17(rows(i, j));
        }
        f << "\n";
    }
}

void write_series_csv(const std::string& path, const MultichannelSeries& series) {
    std::vector<std::string> header{"t"};
    header.insert(header.end(), series.names.begin(), series.names.end());
    Eigen::MatrixXd rows(series.samples(), series.channels() + 1);
    for (int k = 0; k < series.samples(); ++k) {
        rows(k, 0) = series.time_at(k);
    }
    rows.rightCols(series.channels()) = series.values;
    write_csv(path, header, rows);
}

void write_series_json(const std::string& path, const MultichannelSeries& series) {
    ordered_json arr = ordered_json::array();
    for (int k = 0; k < series.samples(); ++k) {
        ordered_json rec;
        rec["t"] = series.time_at(k);
        for (int c = 0; c < series.channels(); ++c) {
            rec[series.names[c]] = series.values(k, c);
        }
        arr.push_back(rec);
    }
    open_out(path) << arr.dump(2) << "\n";
}

MultichannelSeries read_series_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("io: cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(f, line)) {
        throw std::runtime_error("io: empty CSV '" + path + "'");
    }
    std::vector<std::string> names;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            names.push_back(tok);
        }
    }
    if (names.size() < 2 || names[0] != "t") {
        throw std::runtime_error("io: CSV must start with a 't' column");
    }
    std::vector<std::vector<double>> data;
    while (std::getline(f, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            row.push_back(std::stod(tok));
        }
        if (row.size() != names.size()) {
            throw std::runtime_error("io: ragged CSV row in '" + path + "'");
        }
        data.push_back(row);
    }
    if (data.size() < 2) {
        throw std::runtime_error("io: need at least two samples in '" + path + "'");
    }

    MultichannelSeries s;
    s.t0 = data[0][0];
    s.dt = data[1][0] - data[0][0];
    s.names.assign(names.begin() + 1, names.end());
    s.values.resize(static_cast<Eigen::Index>(data.size()),
                    static_cast<Eigen::Index>(names.size()) - 1);
    for (size_t i = 0; i < data.size(); ++i) {
        for (size_t j = 1; j < names.size(); ++j) {
            s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 1)) = data[i][j];
        }
    }
    s.validate();
    return s;
}

std::string model_to_json(const HavokModel& model, const RankSweep* sweep) {
    ordered_json j;
    j["r"] = model.r;
    j["tau"] = model.tau;
    j["dt"] = model.dt;
    j["linear_modes"] = model.linear_modes;
    j["forcing_modes"] = model.forcing_modes;
    j["zero_variance_modes"] = model.zero_variance_modes;
    j["r2"] = std::vector<double>(model.r2.data(), model.r2.data() + model.r2.size());
    j["A"] = matrix_row_major(model.a);
    j["B"] = matrix_row_major(model.b);
    j["singular_values"] =
        std::vector<double>(model.sigma_c.data(), model.sigma_c.data() + model.sigma_c.size());
    if (sweep) {
        ordered_json table = ordered_json::array();
        for (const auto& rec : sweep->table) {
            ordered_json row;
            row["r"] = rec.r;
            row["n_linear"] = rec.n_linear;
            row["n_forcing"] = rec.n_forcing;
            if (std::isinf(rec.cond_b)) {
                row["cond_B"] = "no_forcing";
            } else {
                row["cond_B"] = rec.cond_b;
            }
            table.push_back(row);
        }
        j["rank_sweep"] = table;
        j["r_opt"] = sweep->r_opt;
    }
    return j.dump(2);
}

void write_model_json(const std::string& path, const HavokModel& model,
                      const RankSweep* sweep) {
    open_out(path) << model_to_json(model, sweep) << "\n";
}

std::string report_to_json(const ParameterReport& report) {
    ordered_json j;
    j["system"] = report.system;
    j["retrieved"] = report.retrieved;
    j["truth"] = report.truth;
    j["percent_errors"] = report.percent_errors;
    ordered_json eig = ordered_json::array();
    for (const auto& l : report.eigenvalues) {
        eig.push_back(ordered_json::array({l.real(), l.imag()}));
    }
    j["eigenvalues"] = eig;
    j["provenance"] = report.provenance;
    j["flags"] = report.flags;
    return j.dump(2);
}

void write_report_json(const std::string& path, const ParameterReport& report) {
    open_out(path) << report_to_json(report) << "\n";
}

void write_text(const std::string& path, const std::string& text) {
    open_out(path) << text;
}

} // namespace havoq::io
