#pragma once

#include "quls/estimate.hpp"
#include "quls/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace quls {

/// A series read from delimited text: `date?, value, covariate...` with a header row.
struct SeriesFile {
    BoundedSeries series;
    std::vector<std::string> covariate_names;
    bool has_dates = false;
};

/// Columns that are empty in every row are dropped. Throws InputError naming the row on bad cells.
SeriesFile parse_series(std::istream& in, const std::string& source = "input");
SeriesFile load_series(const std::filesystem::path& path);

void write_series_csv(std::ostream& out, const BoundedSeries& series,
                      const std::vector<std::string>& covariate_names);

/// Fixed-point rendering with `decimals` digits; -0 prints as 0.
std::string format_fixed(double value, int decimals);

/// parameter,estimate,std_error,z_value,p_value with 4 decimals.
std::string estimate_table(const FitResult& fit);

/// Structured document described in the README (schema "quls.fit/1").
std::string fit_result_json(const FitResult& fit);

}  // namespace quls
