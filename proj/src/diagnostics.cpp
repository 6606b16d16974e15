#include "quls/diagnostics.hpp"

#include "quls/error.hpp"
#include "quls/uls.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace quls {

ResidualSet residuals(const ModelSpec& spec, const ParamVector& params, const BoundedSeries& data) {
    const RecursionState st = run_recursion(spec, params, data);
    ResidualSet out;
    const SymmetricKernel normal = SymmetricKernel::normal();
    for (std::size_t t = static_cast<std::size_t>(spec.m()); t < data.size(); ++t) {
        const QulsParams qp{st.q_tau[t], params.sigma, spec.tau, spec.kernel};
        const double f = std::clamp(quls_cdf(qp, data.y[t]), kCdfClamp, 1.0 - kCdfClamp);
        out.fitted_cdf.push_back(f);
        out.gcs.push_back(-std::log1p(-f));
        out.rq.push_back(quantile(normal, f));
    }
    return out;
}

std::vector<std::pair<double, double>> qq_data(std::vector<double> values, QqReference reference) {
    if (values.empty()) throw InputError("QQ data needs at least one value");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const SymmetricKernel normal = SymmetricKernel::normal();
    std::vector<std::pair<double, double>> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double p = (static_cast<double>(i) + 0.5) / n;
        const double theo = reference == QqReference::Exp1 ? -std::log1p(-p) : quantile(normal, p);
        out.emplace_back(theo, values[i]);
    }
    return out;
}

double kolmogorov_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 1.18) {
        // Theta-function form converges fast for small x.
        const double pi = 3.14159265358979323846;
        const double y = std::exp(-pi * pi / (8.0 * x * x));
        double sum = 0.0;
        for (int k = 1; k <= 7; k += 2) sum += std::pow(y, k * k);
        return std::sqrt(2.0 * pi) / x * sum;
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return 1.0 - 2.0 * sum;
}

KsResult ks_test_normal(std::vector<double> values) {
    if (values.empty()) throw InputError("KS test needs at least one value");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    const SymmetricKernel normal = SymmetricKernel::normal();
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(normal, values[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    const double sn = std::sqrt(n);
    KsResult res;
    res.statistic = d;
    res.p_value = std::clamp(1.0 - kolmogorov_cdf((sn + 0.12 + 0.11 / sn) * d), 0.0, 1.0);
    return res;
}

std::string qq_svg(const std::vector<std::pair<double, double>>& pairs, const std::string& title) {
    if (pairs.empty()) throw InputError("QQ plot needs at least one point");
    double lo = pairs.front().first, hi = pairs.front().first;
    for (const auto& [a, b] : pairs) {
        lo = std::min({lo, a, b});
        hi = std::max({hi, a, b});
    }
    if (hi <= lo) hi = lo + 1.0;
    const double size = 400.0, pad = 40.0;
    const auto px = [&](double v) { return pad + (v - lo) / (hi - lo) * (size - 2 * pad); };
    const auto py = [&](double v) { return size - pad - (v - lo) / (hi - lo) * (size - 2 * pad); };
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << size / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    os << "<line x1=\"" << px(lo) << "\" y1=\"" << py(lo) << "\" x2=\"" << px(hi) << "\" y2=\"" << py(hi)
       << "\" stroke=\"red\"/>\n";
    for (const auto& [a, b] : pairs) {
        os << "<circle cx=\"" << px(a) << "\" cy=\"" << py(b) << "\" r=\"2\" fill=\"black\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace quls
