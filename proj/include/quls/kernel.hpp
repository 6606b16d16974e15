#pragma once

#include <optional>
#include <string>

namespace quls {

/**
 * Standard symmetric distribution Z on the real line used as the generator of
 * the unit-log-symmetric family. Either the standard normal or a Student-t
 * with a fixed number of degrees of freedom.
 *
 * The degrees of freedom are a model constant; they are never optimized.
 */
class SymmetricKernel {
public:
    enum class Kind { Normal, StudentT };

    static SymmetricKernel normal() { return SymmetricKernel(Kind::Normal, 0.0); }
    /// Throws DomainError unless dof is finite and positive.
    static SymmetricKernel student_t(double dof);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::optional<double> dof() const noexcept {
        if (kind_ == Kind::StudentT) return dof_;
        return std::nullopt;
    }
    [[nodiscard]] std::string name() const;

    friend bool operator==(const SymmetricKernel&, const SymmetricKernel&) = default;

private:
    SymmetricKernel(Kind kind, double dof) : kind_(kind), dof_(dof) {}

    Kind kind_;
    double dof_;
};

double pdf(const SymmetricKernel& kernel, double z);
double log_pdf(const SymmetricKernel& kernel, double z);
double pdf_deriv1(const SymmetricKernel& kernel, double z);
double pdf_deriv2(const SymmetricKernel& kernel, double z);

// d/dz log f_Z and d²/dz² log f_Z. These are what the likelihood score and
// Hessian consume; they stay finite where f_Z itself underflows.
double log_pdf_deriv1(const SymmetricKernel& kernel, double z);
double log_pdf_deriv2(const SymmetricKernel& kernel, double z);

/// Accepts ±infinity; NaN raises DomainError.
double cdf(const SymmetricKernel& kernel, double z);
/// Upper tail 1 - F_Z(z), accurate when F_Z(z) is close to one.
double ccdf(const SymmetricKernel& kernel, double z);
/// Q_Z(tau) for 0 < tau < 1.
double quantile(const SymmetricKernel& kernel, double tau);

namespace detail {
double normal_quantile(double p);
}  // namespace detail

}  // namespace quls
