#include "quls/diagnostics.hpp"
#include "quls/error.hpp"
#include "quls/estimate.hpp"
#include "quls/forecast.hpp"
#include "quls/io.hpp"
#include "quls/simulate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace quls;

namespace {

struct Options {
    std::string data;
    std::string out = "out";
    std::string model = "arma:2,0";
    std::string kernel = "normal";
    std::string nu_grid;
    double nu = 5.0;
    double tau = 0.5;
    std::string link = "logit";
    int harmonics = 0;
    std::vector<std::string> covariates;
    int holdout = 0;
    int horizon = 0;
    std::uint64_t seed = 1;
    int reps = 1000;
    int burn_in = 50;
    std::vector<int> n{400};
    std::string scenario = "S1";
    std::string estimator = "cml";
    int workers = 0;
    int max_iter = 500;
    double grad_tol = 1e-6;
    std::string tau_grid = "0.01:0.99:0.01";
    bool svg = false;
};

// Buffers every artifact and writes them only once the command has succeeded.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
    void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

    void commit() {
        fs::create_directories(dir_);
        std::vector<fs::path> done;
        try {
            for (const auto& [name, content] : files_) {
                const fs::path final_path = dir_ / name;
                const fs::path tmp = dir_ / (name + ".tmp");
                {
                    std::ofstream os(tmp, std::ios::binary);
                    os << content;
                    if (!os) throw InputError("cannot write '" + tmp.string() + "'");
                }
                fs::rename(tmp, final_path);
                done.push_back(final_path);
            }
        } catch (...) {
            for (const auto& [name, content] : files_) fs::remove(dir_ / (name + ".tmp"));
            for (const auto& p : done) fs::remove(p);
            throw;
        }
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::pair<int, int> parse_orders(const std::string& text) {
    static const std::regex re(R"(^arma:(\d+),(\d+)$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw InputError("--model expects arma:P,Q, got '" + text + "'");
    return {std::stoi(m[1]), std::stoi(m[2])};
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError(what + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw InputError(what + " is empty");
    return out;
}

std::vector<double> parse_tau_grid(const std::string& text) {
    std::vector<double> grid;
    static const std::regex range(R"(^([^:]+):([^:]+):([^:]+)$)");
    std::smatch m;
    if (std::regex_match(text, m, range)) {
        const auto v = parse_list(std::string(m[1]) + "," + std::string(m[2]) + "," + std::string(m[3]), "--tau-grid");
        if (!(v[2] > 0.0)) throw InputError("--tau-grid step must be positive");
        const long count = std::lround(std::floor((v[1] - v[0]) / v[2] + 1e-9));
        for (long i = 0; i <= count; ++i) grid.push_back(std::round((v[0] + static_cast<double>(i) * v[2]) * 1e10) / 1e10);
    } else {
        grid = parse_list(text, "--tau-grid");
    }
    for (double t : grid) {
        if (!(t > 0.0 && t < 1.0)) throw InputError("--tau-grid values must lie in (0, 1)");
    }
    return grid;
}

SymmetricKernel parse_kernel(const Options& o) {
    if (o.kernel == "normal") return SymmetricKernel::normal();
    if (o.kernel == "t") return SymmetricKernel::student_t(o.nu_grid.empty() ? o.nu : parse_list(o.nu_grid, "--nu-grid").front());
    throw InputError("--kernel expects normal or t, got '" + o.kernel + "'");
}

FitConfig fit_config(const Options& o) {
    FitConfig fc;
    fc.max_iter = o.max_iter;
    fc.grad_tol = o.grad_tol;
    fc.workers = o.workers;
    if (!o.nu_grid.empty()) fc.nu_grid = parse_list(o.nu_grid, "--nu-grid");
    fc.validate();
    return fc;
}

struct Dataset {
    BoundedSeries series;
    std::vector<std::string> covariate_names;
};

// Harmonic pair first (when requested), then the selected file covariates.
Dataset load_dataset(const Options& o) {
    if (o.data.empty()) throw InputError("--data is required for this command");
    const SeriesFile file = load_series(o.data);
    const auto n = static_cast<Eigen::Index>(file.series.size());
    std::vector<Eigen::Index> cols;
    std::vector<std::string> names;
    if (o.covariates.empty()) {
        for (std::size_t j = 0; j < file.covariate_names.size(); ++j) cols.push_back(static_cast<Eigen::Index>(j));
        names = file.covariate_names;
    } else {
        for (const auto& want : o.covariates) {
            const auto it = std::find(file.covariate_names.begin(), file.covariate_names.end(), want);
            if (it == file.covariate_names.end()) throw InputError("covariate column '" + want + "' not found or empty");
            cols.push_back(it - file.covariate_names.begin());
            names.push_back(want);
        }
    }
    Dataset d;
    d.series.y = file.series.y;
    d.series.labels = file.series.labels;
    const int hk = o.harmonics > 0 ? 2 : 0;
    d.series.x.resize(n, hk + static_cast<Eigen::Index>(cols.size()));
    if (hk) {
        d.series.x.leftCols(2) = harmonic_covariates(static_cast<int>(n), o.harmonics);
        d.covariate_names = {"cos", "sin"};
    }
    for (std::size_t j = 0; j < cols.size(); ++j) d.series.x.col(hk + static_cast<Eigen::Index>(j)) = file.series.x.col(cols[j]);
    d.covariate_names.insert(d.covariate_names.end(), names.begin(), names.end());
    return d;
}

BoundedSeries slice(const BoundedSeries& s, std::size_t begin, std::size_t end) {
    BoundedSeries out;
    out.y.assign(s.y.begin() + static_cast<std::ptrdiff_t>(begin), s.y.begin() + static_cast<std::ptrdiff_t>(end));
    out.labels.assign(s.labels.begin() + static_cast<std::ptrdiff_t>(begin), s.labels.begin() + static_cast<std::ptrdiff_t>(end));
    out.x = s.x.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin));
    return out;
}

ModelSpec model_spec(const Options& o, int k) {
    ModelSpec spec;
    std::tie(spec.p, spec.q) = parse_orders(o.model);
    spec.k = k;
    spec.tau = o.tau;
    spec.link = parse_link(o.link);
    spec.kernel = parse_kernel(o);
    spec.validate();
    return spec;
}

FitResult run_fit(const ModelSpec& spec, const BoundedSeries& data, const FitConfig& fc) {
    return fit_auto(spec, data, fc);
}

std::string fit_summary(const FitResult& r) {
    std::ostringstream os;
    os << "indicator,value\n"
       << "loglik," << format_fixed(r.loglik, 6) << '\n'
       << "aic," << format_fixed(r.aic, 6) << '\n'
       << "bic," << format_fixed(r.bic, 6) << '\n'
       << "caic," << format_fixed(r.caic, 6) << '\n'
       << "hqic," << format_fixed(r.hqic, 6) << '\n'
       << "n_eff," << r.n_eff << '\n'
       << "converged," << (r.converged ? "true" : "false") << '\n'
       << "iterations," << r.iterations << '\n'
       << "selected_nu," << (r.selected_nu ? format_fixed(*r.selected_nu, 6) : "NA") << '\n';
    return os.str();
}

int cmd_fit(const Options& o) {
    const Dataset d = load_dataset(o);
    if (o.holdout < 0 || static_cast<std::size_t>(o.holdout) >= d.series.size()) throw InputError("--holdout out of range");
    const BoundedSeries train = slice(d.series, 0, d.series.size() - static_cast<std::size_t>(o.holdout));
    const ModelSpec spec = model_spec(o, train.covariate_count());
    const FitResult r = run_fit(spec, train, fit_config(o));
    OutputSet out(o.out);
    out.add("estimates.csv", estimate_table(r));
    out.add("criteria.csv", fit_summary(r));
    out.add("fit.json", fit_result_json(r));
    out.commit();
    std::cout << estimate_table(r) << "loglik," << format_fixed(r.loglik, 6) << '\n';
    if (!r.converged) std::cerr << "warning: optimizer stopped without convergence (" << to_string(r.stop_reason) << ")\n";
    return 0;
}

Eigen::MatrixXd future_covariates(const Options& o, const Dataset& d, std::size_t train_n, int h) {
    const int k = d.series.covariate_count();
    Eigen::MatrixXd fx(h, k);
    const std::size_t available = d.series.size() - train_n;
    if (static_cast<std::size_t>(h) <= available) return d.series.x.middleRows(static_cast<Eigen::Index>(train_n), h);
    const int hk = o.harmonics > 0 ? 2 : 0;
    if (k > hk) throw InputError("forecasting past the data needs future values of the non-periodic covariates");
    if (hk) fx = future_harmonics(static_cast<int>(train_n), h, o.harmonics);
    return fx;
}

int cmd_forecast(const Options& o) {
    const Dataset d = load_dataset(o);
    const int holdout = o.holdout;
    const int h = o.horizon > 0 ? o.horizon : holdout;
    if (h < 1) throw InputError("forecast needs --holdout H or --horizon H");
    if (holdout < 0 || static_cast<std::size_t>(holdout) >= d.series.size()) throw InputError("--holdout out of range");
    const std::size_t train_n = d.series.size() - static_cast<std::size_t>(holdout);
    const BoundedSeries train = slice(d.series, 0, train_n);
    const ModelSpec spec = model_spec(o, train.covariate_count());
    const FitResult r = run_fit(spec, train, fit_config(o));
    const ForecastResult f = forecast(r.spec, r.params, train, h, future_covariates(o, d, train_n, h));

    std::ostringstream table, errors;
    table << "h,date,y_hat,actual\n";
    errors << "h,mse,mape\n";
    std::vector<double> actual, predicted;
    for (int j = 0; j < h; ++j) {
        const std::size_t idx = train_n + static_cast<std::size_t>(j);
        const bool has_actual = idx < d.series.size();
        table << j + 1 << ',' << (has_actual ? d.series.labels[idx] : "") << ',' << format_fixed(f.y_hat[static_cast<std::size_t>(j)], 6)
              << ',' << (has_actual ? format_fixed(d.series.y[idx], 6) : "NA") << '\n';
        if (has_actual) {
            actual.push_back(d.series.y[idx]);
            predicted.push_back(f.y_hat[static_cast<std::size_t>(j)]);
            const ForecastErrors e = forecast_errors(actual, predicted);
            errors << j + 1 << ',' << format_fixed(e.mse, 6) << ',' << format_fixed(e.mape, 6) << '\n';
        }
    }
    OutputSet out(o.out);
    out.add("forecast.csv", table.str());
    if (!actual.empty()) out.add("forecast_errors.csv", errors.str());
    out.add("fit.json", fit_result_json(r));
    out.commit();
    std::cout << table.str();
    if (!actual.empty()) std::cout << errors.str();
    return 0;
}

int cmd_diagnose(const Options& o) {
    const Dataset d = load_dataset(o);
    const ModelSpec spec = model_spec(o, d.series.covariate_count());
    const FitResult r = run_fit(spec, d.series, fit_config(o));
    const ResidualSet res = residuals(r.spec, r.params, d.series);
    std::ostringstream rs;
    rs << "t,date,fitted_cdf,gcs,rq\n";
    const auto m = static_cast<std::size_t>(r.spec.m());
    for (std::size_t i = 0; i < res.gcs.size(); ++i) {
        rs << m + i + 1 << ',' << d.series.labels[m + i] << ',' << format_fixed(res.fitted_cdf[i], 6) << ','
           << format_fixed(res.gcs[i], 6) << ',' << format_fixed(res.rq[i], 6) << '\n';
    }
    const auto qq_text = [](const std::vector<std::pair<double, double>>& pairs) {
        std::ostringstream os;
        os << "theoretical,empirical\n";
        for (const auto& [a, b] : pairs) os << format_fixed(a, 6) << ',' << format_fixed(b, 6) << '\n';
        return os.str();
    };
    const auto qq_gcs = qq_data(res.gcs, QqReference::Exp1);
    const auto qq_rq = qq_data(res.rq, QqReference::StdNormal);
    const KsResult ks = ks_test_normal(res.rq);
    double gcs_mean = 0.0;
    for (double v : res.gcs) gcs_mean += v / static_cast<double>(res.gcs.size());
    double rq_mean = 0.0, rq_var = 0.0;
    for (double v : res.rq) rq_mean += v / static_cast<double>(res.rq.size());
    for (double v : res.rq) rq_var += (v - rq_mean) * (v - rq_mean) / static_cast<double>(res.rq.size() - 1);
    std::ostringstream summary;
    summary << "indicator,value\n"
            << "gcs_mean," << format_fixed(gcs_mean, 6) << '\n'
            << "rq_mean," << format_fixed(rq_mean, 6) << '\n'
            << "rq_variance," << format_fixed(rq_var, 6) << '\n'
            << "ks_statistic," << format_fixed(ks.statistic, 6) << '\n'
            << "ks_p_value," << format_fixed(ks.p_value, 6) << '\n';
    OutputSet out(o.out);
    out.add("residuals.csv", rs.str());
    out.add("qq_gcs.csv", qq_text(qq_gcs));
    out.add("qq_rq.csv", qq_text(qq_rq));
    out.add("diagnostics.csv", summary.str());
    if (o.svg) {
        out.add("qq_gcs.svg", qq_svg(qq_gcs, "GCS residuals vs Exp(1)"));
        out.add("qq_rq.svg", qq_svg(qq_rq, "Quantile residuals vs N(0,1)"));
    }
    out.commit();
    std::cout << summary.str();
    return 0;
}

ScenarioConfig scenario_config(const Options& o, int n) {
    const Scenario sc = parse_scenario(o.scenario);
    if (sc == Scenario::Custom) throw InputError("scenario must be one of S1, S2, S3, S4");
    ScenarioConfig cfg = ScenarioConfig::preset(sc, o.tau, n, o.seed);
    cfg.burn_in = o.burn_in;
    cfg.spec.link = parse_link(o.link);
    if (o.kernel == "t") cfg.spec.kernel = SymmetricKernel::student_t(o.nu);
    else if (o.kernel != "normal") throw InputError("--kernel expects normal or t, got '" + o.kernel + "'");
    cfg.validate();
    return cfg;
}

int cmd_simulate(const Options& o) {
    if (o.n.size() != 1) throw InputError("simulate takes a single --n");
    const ScenarioConfig cfg = scenario_config(o, o.n.front());
    const SimulatedPath path = generate_path(cfg);
    BoundedSeries s = path.data;
    for (std::size_t t = 0; t < s.size(); ++t) s.labels.push_back(std::to_string(t + 1));
    std::ostringstream series, latent;
    write_series_csv(series, s, {"cos", "sin"});
    latent << "t,eta,q_tau\n";
    for (std::size_t t = 0; t < s.size(); ++t) {
        latent << t + 1 << ',' << format_fixed(path.eta[t], 6) << ',' << format_fixed(path.q_tau[t], 6) << '\n';
    }
    OutputSet out(o.out);
    out.add("series.csv", series.str());
    out.add("latent.csv", latent.str());
    out.commit();
    std::cout << "wrote " << s.size() << " observations of " << to_string(cfg.name) << '\n';
    return 0;
}

int cmd_mc(const Options& o) {
    FitConfig fc = fit_config(o);
    std::ostringstream longf;
    longf << "scenario,tau,n,parameter,true_value,mean,rb,arb,rmse,replications_used,failures\n";
    std::vector<std::vector<ParameterSummary>> per_n;
    std::vector<std::string> names;
    for (int n : o.n) {
        const ScenarioConfig cfg = scenario_config(o, n);
        McSummary s;
        if (o.estimator == "truth") {
            const Estimator truth = [](const BoundedSeries&, const ScenarioConfig& c) { return std::optional(c.true_params); };
            s = run_monte_carlo(cfg, o.reps, truth, o.workers);
        } else if (o.estimator == "cml") {
            s = run_monte_carlo(cfg, o.reps, fc, o.workers);
        } else {
            throw InputError("--estimator expects cml or truth");
        }
        for (const auto& p : s.parameters) {
            longf << to_string(cfg.name) << ',' << format_fixed(o.tau, 2) << ',' << n << ',' << p.name << ','
                  << format_fixed(p.true_value, 6) << ',' << format_fixed(p.mean, 6) << ',' << format_fixed(p.rb, 6)
                  << ',' << format_fixed(p.arb, 6) << ',' << format_fixed(p.rmse, 6) << ',' << s.replications_used
                  << ',' << s.failures << '\n';
        }
        names = ParamVector::names(cfg.spec);
        per_n.push_back(s.parameters);
    }
    const auto wide = [&](double ParameterSummary::*field) {
        std::ostringstream os;
        os << "scenario,n";
        for (const auto& nm : names) os << ',' << nm;
        os << '\n';
        for (std::size_t i = 0; i < o.n.size(); ++i) {
            os << o.scenario << ',' << o.n[i];
            for (const auto& p : per_n[i]) os << ',' << format_fixed(p.*field, 6);
            os << '\n';
        }
        return os.str();
    };
    OutputSet out(o.out);
    out.add("mc_summary.csv", longf.str());
    out.add("mc_rb.csv", wide(&ParameterSummary::rb));
    out.add("mc_arb.csv", wide(&ParameterSummary::arb));
    out.add("mc_rmse.csv", wide(&ParameterSummary::rmse));
    out.commit();
    std::cout << longf.str();
    return 0;
}

int cmd_tau_sweep(const Options& o) {
    const Dataset d = load_dataset(o);
    const std::vector<double> grid = parse_tau_grid(o.tau_grid);
    FitConfig fc = fit_config(o);
    fc.workers = 1;
    fc.compute_std_errors = false;
    const ModelSpec base = model_spec(o, d.series.covariate_count());
    std::vector<std::optional<FitResult>> fits(grid.size());
    std::vector<std::string> errors(grid.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            ModelSpec spec = base;
            spec.tau = grid[i];
            try {
                fits[i] = run_fit(spec, d.series, fc);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    unsigned nthreads = o.workers > 0 ? static_cast<unsigned>(o.workers) : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(grid.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::ostringstream per_tau;
    per_tau << "tau,loglik,aic,bic,caic,hqic,converged,selected_nu\n";
    double sums[5] = {0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!fits[i]) throw NumericError("fit failed at tau=" + format_fixed(grid[i], 4) + ": " + errors[i]);
        const FitResult& r = *fits[i];
        per_tau << format_fixed(grid[i], 2) << ',' << format_fixed(r.loglik, 6) << ',' << format_fixed(r.aic, 6) << ','
                << format_fixed(r.bic, 6) << ',' << format_fixed(r.caic, 6) << ',' << format_fixed(r.hqic, 6) << ','
                << (r.converged ? "true" : "false") << ',' << (r.selected_nu ? format_fixed(*r.selected_nu, 6) : "NA")
                << '\n';
        const double v[5] = {r.loglik, r.aic, r.bic, r.caic, r.hqic};
        for (int j = 0; j < 5; ++j) sums[j] += v[j];
    }
    const char* labels[5] = {"log-likelihood", "AIC", "BIC", "CAIC", "HQIC"};
    std::ostringstream avg;
    avg << "indicator,average\n";
    for (int j = 0; j < 5; ++j) avg << labels[j] << ',' << format_fixed(sums[j] / static_cast<double>(grid.size()), 6) << '\n';
    OutputSet out(o.out);
    out.add("tau_sweep.csv", per_tau.str());
    out.add("tau_sweep_avg.csv", avg.str());
    out.commit();
    std::cout << avg.str();
    return 0;
}

std::string single_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantile unit-log-symmetric ARMA models for series in (0,1)"};
    app.set_config("--config", "", "Flat key = value configuration file");
    app.require_subcommand(1);
    Options o;

    const auto add_model = [&o](CLI::App* c) {
        c->add_option("--model", o.model, "Orders as arma:P,Q")->capture_default_str();
        c->add_option("--kernel", o.kernel, "normal or t")->capture_default_str();
        c->add_option("--nu-grid", o.nu_grid, "Comma-separated Student-t degrees of freedom");
        c->add_option("--tau", o.tau, "Quantile level")->capture_default_str();
        c->add_option("--link", o.link, "logit, probit or cloglog")->capture_default_str();
        c->add_option("--max-iter", o.max_iter, "Optimizer iteration limit")->capture_default_str();
        c->add_option("--grad-tol", o.grad_tol, "Gradient sup-norm tolerance")->capture_default_str();
        c->add_option("--workers", o.workers, "Worker threads (0 = all cores)")->capture_default_str();
    };
    const auto add_data = [&o](CLI::App* c) {
        c->add_option("--data", o.data, "CSV with header: date?, value, covariates...")->required();
        c->add_option("--harmonics", o.harmonics, "Add cos/sin(2 pi t / PERIOD) covariates (0 = none)")->capture_default_str();
        c->add_option("--covariates", o.covariates, "File covariate columns to use (default: all non-empty)")->delimiter(',');
    };
    const auto add_out = [&o](CLI::App* c) { c->add_option("--out", o.out, "Output directory")->capture_default_str(); };
    const auto add_scenario = [&o](CLI::App* c) {
        c->add_option("--scenario", o.scenario, "S1, S2, S3 or S4")->capture_default_str();
        c->add_option("--n", o.n, "Retained series length(s)")->delimiter(',');
        c->add_option("--seed", o.seed, "Base seed")->capture_default_str();
        c->add_option("--burn-in", o.burn_in, "Discarded leading observations")->capture_default_str();
        c->add_option("--tau", o.tau, "Quantile level")->capture_default_str();
        c->add_option("--kernel", o.kernel, "normal or t")->capture_default_str();
        c->add_option("--nu", o.nu, "Student-t degrees of freedom of the generator")->capture_default_str();
        c->add_option("--link", o.link, "logit, probit or cloglog")->capture_default_str();
    };

    CLI::App* fit = app.add_subcommand("fit", "Fit a model by conditional maximum likelihood");
    add_data(fit);
    add_model(fit);
    add_out(fit);
    fit->add_option("--holdout", o.holdout, "Exclude the final H observations")->capture_default_str();

    CLI::App* fc = app.add_subcommand("forecast", "Fit on all but the holdout and forecast it");
    add_data(fc);
    add_model(fc);
    add_out(fc);
    fc->add_option("--holdout", o.holdout, "Final H observations reserved for evaluation")->capture_default_str();
    fc->add_option("--horizon", o.horizon, "Steps to forecast (default: the holdout length)");

    CLI::App* dg = app.add_subcommand("diagnose", "Residual diagnostics of a fitted model");
    add_data(dg);
    add_model(dg);
    add_out(dg);
    dg->add_flag("--svg", o.svg, "Also write QQ plots as SVG");

    CLI::App* sim = app.add_subcommand("simulate", "Generate a series from a Monte Carlo scenario");
    add_scenario(sim);
    add_out(sim);

    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo study of the estimator");
    add_scenario(mc);
    add_out(mc);
    mc->add_option("--reps", o.reps, "Replications")->capture_default_str();
    mc->add_option("--workers", o.workers, "Worker threads (0 = all cores)")->capture_default_str();
    mc->add_option("--estimator", o.estimator, "cml, or truth for a stub that returns the true parameters")
        ->capture_default_str();
    mc->add_option("--max-iter", o.max_iter, "Optimizer iteration limit")->capture_default_str();
    mc->add_option("--grad-tol", o.grad_tol, "Gradient sup-norm tolerance")->capture_default_str();

    CLI::App* sweep = app.add_subcommand("tau-sweep", "Fit across a grid of quantile levels");
    add_data(sweep);
    add_model(sweep);
    add_out(sweep);
    sweep->add_option("--tau-grid", o.tau_grid, "start:stop:step or a comma list")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << single_line(e.what()) << '\n';
        return 2;
    }

    try {
        if (fit->parsed()) return cmd_fit(o);
        if (fc->parsed()) return cmd_forecast(o);
        if (dg->parsed()) return cmd_diagnose(o);
        if (sim->parsed()) return cmd_simulate(o);
        if (mc->parsed()) return cmd_mc(o);
        if (sweep->parsed()) return cmd_tau_sweep(o);
    } catch (const InputError& e) {
        std::cerr << "error: input: " << single_line(e.what()) << '\n';
        return 2;
    } catch (const InsufficientDataError& e) {
        std::cerr << "error: insufficient-data: " << single_line(e.what()) << '\n';
        return 3;
    } catch (const SingularDesignError& e) {
        std::cerr << "error: singular-design: " << single_line(e.what()) << '\n';
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "error: domain: " << single_line(e.what()) << '\n';
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: numeric: " << single_line(e.what()) << '\n';
        return 4;
    } catch (const GridFitError& e) {
        std::cerr << "error: numeric: " << single_line(e.what()) << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << single_line(e.what()) << '\n';
        return 1;
    }
    return 1;
}
