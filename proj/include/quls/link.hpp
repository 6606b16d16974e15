#pragma once

#include <string>
#include <string_view>

namespace quls {

/// Strictly increasing, twice differentiable map (0,1) -> R.
enum class LinkFunction { Logit, Probit, Cloglog };

/// Inverse-link outputs are kept inside [kLinkEpsilon, 1 - kLinkEpsilon].
inline constexpr double kLinkEpsilon = 2.220446049250313e-16;

double g(LinkFunction link, double u);
double g_inv(LinkFunction link, double eta);
double g_deriv(LinkFunction link, double u);
double g_deriv2(LinkFunction link, double u);

/// logit(g_inv(eta)) evaluated without round-tripping through (0,1) where possible.
double logit_of_inverse(LinkFunction link, double eta);
/// First and second derivatives of logit_of_inverse in eta (clamping ignored).
double logit_of_inverse_deriv1(LinkFunction link, double eta);
double logit_of_inverse_deriv2(LinkFunction link, double eta);

std::string to_string(LinkFunction link);
/// Accepts "logit", "probit", "cloglog"; throws InputError otherwise.
LinkFunction parse_link(std::string_view name);

}  // namespace quls
