#include "nudge/conditions.hpp"

#include <cmath>
#include <stdexcept>

namespace nudge {

ConditionResult h_condition(double nu, double c1, double h, double chi) {
    // 2 chi H first: for decimal inputs such as H = 0.1 this rounds back onto
    // the exact product and boundary cases land on slack 0.
    const double slack = nu - 2.0 * chi * h * h * c1 * c1;
    return {slack >= 0.0, slack};
}

double max_admissible_chi(double nu, double c1, double h) { return nu / (2.0 * c1 * c1 * h * h); }

ConditionResult chi_condition_2d(double chi, double nu, double avg_grad_sq, double chi0,
                                 std::optional<double> coefficient) {
    const double coef = coefficient.value_or(1.0 / (2.0 * nu));
    const double slack = chi - coef * avg_grad_sq - chi0;
    return {slack >= 0.0, slack};
}

ConditionResult chi_condition_3d(double chi, double nu, double avg_grad_4, double chi0) {
    const double slack = 2.0 * (chi - kLadyzhenskaya3d / (nu * nu * nu) * avg_grad_4) - chi0;
    return {slack >= 0.0, slack};
}

ConditionResult refined_h_condition(double chi, double nu, double c1, double h, double lambda_t_e,
                                    double avg_grad_4) {
    if (!(lambda_t_e > 0.0)) {
        throw std::invalid_argument("refined_h_condition: lambda_T must be positive");
    }
    const double ratio = h / lambda_t_e;
    const double slack =
        2.0 * (chi * (1.0 - c1 * c1 * ratio * ratio) - kLadyzhenskaya3d / (nu * nu * nu) * avg_grad_4);
    return {slack > 0.0, slack};
}

void FlowScales::validate() const {
    if (!(length > 0.0) || !(velocity > 0.0) || !(nu > 0.0)) {
        throw std::invalid_argument("flow scales L, U and nu must be positive");
    }
    if (kf && !(*kf > 0.0)) {
        throw std::invalid_argument("forcing wavenumber kf must be positive");
    }
}

ScalingRecommendation re_scalings(const FlowScales& scales, int dim) {
    scales.validate();
    ScalingRecommendation r;
    r.dim = dim;
    r.reynolds = scales.reynolds();
    if (dim == 2) {
        if (!scales.kf) {
            throw std::invalid_argument("2d scaling needs the forcing wavenumber kf");
        }
        const double lk = scales.length * *scales.kf;
        r.chi_turnover = 2.0 * std::pow(lk, 1.5) * std::pow(r.reynolds, 1.5);
        r.h_over_l = std::pow(r.reynolds, -1.25);
    } else if (dim == 3) {
        r.chi_turnover = 0.1 * std::pow(r.reynolds, 5.0);
        r.h_over_l = std::pow(r.reynolds, -3.0);
    } else {
        throw std::invalid_argument("scaling dimension must be 2 or 3");
    }
    r.chi_min = r.chi_turnover / scales.turnover_time();
    r.h_max = r.h_over_l * scales.length;
    return r;
}

ConditionReport evaluate_conditions(const ConditionInputs& in) {
    ConditionReport r;
    r.h = h_condition(in.nu, in.c1, in.h, in.chi);
    r.chi2d = chi_condition_2d(in.chi, in.nu, in.avg_grad_sq, in.chi0);
    r.chi3d = chi_condition_3d(in.chi, in.nu, in.avg_grad_4, in.chi0);
    r.max_admissible_chi = max_admissible_chi(in.nu, in.c1, in.h);
    if (in.lambda_t_e && *in.lambda_t_e > 0.0 && std::isfinite(*in.lambda_t_e)) {
        r.refined = refined_h_condition(in.chi, in.nu, in.c1, in.h, *in.lambda_t_e, in.avg_grad_4);
    }
    if (in.scales) {
        if (in.scales->kf) {
            r.scaling2d = re_scalings(*in.scales, 2);
        }
        r.scaling3d = re_scalings(*in.scales, 3);
    }
    return r;
}

}  // namespace nudge
