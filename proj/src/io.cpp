#include "quls/io.hpp"

#include "quls/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace quls {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

SeriesFile parse_series(std::istream& in, const std::string& source) {
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) {
            header = split(line);
            break;
        }
    }
    if (header.empty()) throw InputError(source + ": missing header row");

    int value_col = -1;
    int date_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "value") value_col = static_cast<int>(c);
        if (header[c] == "date") date_col = static_cast<int>(c);
    }
    if (value_col < 0) throw InputError(source + ": no 'value' column in header");

    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (cells.size() != header.size()) {
            throw InputError(source + ": row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                             " fields, header has " + std::to_string(header.size()));
        }
        rows.push_back(std::move(cells));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) throw InputError(source + ": series is empty");

    std::vector<std::size_t> covariate_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (static_cast<int>(c) == value_col || static_cast<int>(c) == date_col) continue;
        bool any = false;
        for (const auto& r : rows) any = any || !r[c].empty();
        if (any) covariate_cols.push_back(c);
    }

    SeriesFile out;
    out.has_dates = date_col >= 0;
    BoundedSeries& s = out.series;
    const auto n = static_cast<Eigen::Index>(rows.size());
    s.x.resize(n, static_cast<Eigen::Index>(covariate_cols.size()));
    for (std::size_t c : covariate_cols) out.covariate_names.push_back(header[c]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string where = source + ": row " + std::to_string(line_numbers[i]);
        double v = 0.0;
        if (!parse_double(r[static_cast<std::size_t>(value_col)], v)) {
            throw InputError(where + ": value '" + r[static_cast<std::size_t>(value_col)] + "' is not numeric");
        }
        if (!(v > 0.0 && v < 1.0)) throw InputError(where + ": value " + r[static_cast<std::size_t>(value_col)] + " is outside (0, 1)");
        s.y.push_back(v);
        for (std::size_t j = 0; j < covariate_cols.size(); ++j) {
            double x = 0.0;
            const std::string& cell = r[covariate_cols[j]];
            if (!parse_double(cell, x)) {
                throw InputError(where + ": covariate '" + header[covariate_cols[j]] + "' value '" + cell +
                                 "' is not numeric");
            }
            s.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x;
        }
        s.labels.push_back(date_col >= 0 ? r[static_cast<std::size_t>(date_col)] : std::to_string(i + 1));
    }
    return out;
}

SeriesFile load_series(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return parse_series(in, path.string());
}

void write_series_csv(std::ostream& out, const BoundedSeries& series,
                      const std::vector<std::string>& covariate_names) {
    out << "date,value";
    for (const auto& name : covariate_names) out << ',' << name;
    out << '\n';
    for (std::size_t t = 0; t < series.size(); ++t) {
        out << (t < series.labels.size() ? series.labels[t] : std::to_string(t + 1)) << ','
            << format_fixed(series.y[t], 6);
        for (Eigen::Index j = 0; j < series.x.cols(); ++j) {
            out << ',' << format_fixed(series.x(static_cast<Eigen::Index>(t), j), 6);
        }
        out << '\n';
    }
}

std::string format_fixed(double value, int decimals) {
    if (std::isnan(value)) return "NA";
    if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(decimals);
    os << value;
    std::string s = os.str();
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string estimate_table(const FitResult& fit) {
    const auto names = ParamVector::names(fit.spec);
    const Eigen::VectorXd est = fit.params.pack();
    std::ostringstream os;
    os << "parameter,estimate,std_error,z_value,p_value\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
        os << names[i] << ',' << format_fixed(est(static_cast<Eigen::Index>(i)), 4) << ','
           << format_fixed(fit.std_errors[i], 4) << ',' << format_fixed(fit.z_values[i], 4) << ','
           << format_fixed(fit.p_values[i], 4) << '\n';
    }
    return os.str();
}

std::string fit_result_json(const FitResult& fit) {
    using nlohmann::json;
    json doc;
    doc["schema"] = "quls.fit/1";
    doc["model"] = {{"p", fit.spec.p},
                    {"q", fit.spec.q},
                    {"k", fit.spec.k},
                    {"tau", fit.spec.tau},
                    {"link", to_string(fit.spec.link)},
                    {"kernel", fit.spec.kernel.name()}};
    const auto names = ParamVector::names(fit.spec);
    const Eigen::VectorXd est = fit.params.pack();
    json params = json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        params.push_back({{"name", names[i]},
                          {"estimate", est(static_cast<Eigen::Index>(i))},
                          {"std_error", number_or_null(fit.std_errors[i])},
                          {"z_value", number_or_null(fit.z_values[i])},
                          {"p_value", number_or_null(fit.p_values[i])}});
    }
    doc["parameters"] = params;
    doc["std_errors_available"] = fit.std_errors_available;
    doc["loglik"] = fit.loglik;
    doc["n_eff"] = fit.n_eff;
    doc["criteria"] = {{"aic", fit.aic}, {"bic", fit.bic}, {"caic", fit.caic}, {"hqic", fit.hqic}};
    doc["converged"] = fit.converged;
    doc["iterations"] = fit.iterations;
    doc["stop_reason"] = to_string(fit.stop_reason);
    doc["grad_sup_norm"] = fit.grad_sup_norm;
    doc["selected_nu"] = fit.selected_nu ? json(*fit.selected_nu) : json(nullptr);
    json roots = json::array();
    for (const auto& z : fit.ar_roots) roots.push_back({{"re", z.real()}, {"im", z.imag()}, {"modulus", std::abs(z)}});
    doc["ar_roots"] = roots;
    json profile = json::array();
    for (const auto& [nu, ll] : fit.nu_profile) profile.push_back({{"nu", nu}, {"loglik", ll}});
    doc["nu_profile"] = profile;
    doc["residual_state"] = {{"eta", fit.residual_state.eta},
                             {"q_tau", fit.residual_state.q_tau},
                             {"r", fit.residual_state.r}};
    return doc.dump(2) + "\n";
}

}  // namespace quls
