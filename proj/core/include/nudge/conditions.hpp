#pragma once

#include <optional>

namespace nudge {

/// Constant 2048/19683 of the 3d Ladyzhenskaya / Young estimate.
inline constexpr double kLadyzhenskaya3d = 2048.0 / 19683.0;

/// Outcome of one parameter inequality: ok iff the slack satisfies the
/// inequality's sign convention.
struct ConditionResult {
    bool ok = false;
    double slack = 0.0;
};

/// nu - 2 c1^2 H^2 chi >= 0.
ConditionResult h_condition(double nu, double c1, double h, double chi);

/// Largest chi for which h_condition holds: nu / (2 c1^2 H^2).
double max_admissible_chi(double nu, double c1, double h);

/// chi - coefficient * avg_grad_sq - chi0 >= 0 with avg_grad_sq the time
/// average of ||grad u||^2. The published coefficient is 1/(2 nu); pass
/// `coefficient` to use a different one (e.g. 2/nu).
ConditionResult chi_condition_2d(double chi, double nu, double avg_grad_sq, double chi0,
                                 std::optional<double> coefficient = std::nullopt);

/// 2 [chi - (2048/19683) nu^-3 avg_grad_4] - chi0 >= 0.
ConditionResult chi_condition_3d(double chi, double nu, double avg_grad_4, double chi0);

/// 2 [chi (1 - c1^2 (H / lambda_T)^2) - (2048/19683) nu^-3 avg_grad_4] > 0.
ConditionResult refined_h_condition(double chi, double nu, double c1, double h, double lambda_t_e,
                                    double avg_grad_4);

/// Large-scale description of a flow.
struct FlowScales {
    double length = 1.0;    // L
    double velocity = 1.0;  // U
    double nu = 1.0;
    /// Forcing wavenumber (1/length); required in 2d.
    std::optional<double> kf;

    void validate() const;
    double reynolds() const { return length * velocity / nu; }
    double turnover_time() const { return length / velocity; }
};

/// Phenomenological (order-of-magnitude) sizes of chi and H. Never enforced.
struct ScalingRecommendation {
    int dim = 2;
    double reynolds = 0.0;
    /// chi T* lower bound.
    double chi_turnover = 0.0;
    /// chi lower bound = chi_turnover / T*.
    double chi_min = 0.0;
    /// H / L upper bound.
    double h_over_l = 0.0;
    /// H upper bound = h_over_l * L.
    double h_max = 0.0;
};

/// 2d: chi T* ~ 2 (L kf)^{3/2} Re^{3/2}, H/L ~ Re^{-5/4}.
/// 3d: chi T* ~ 0.1 Re^5,              H/L ~ Re^{-3}.
/// Throws std::invalid_argument for dim not in {2, 3} or missing kf in 2d.
ScalingRecommendation re_scalings(const FlowScales& scales, int dim);

/// All evaluators applied to one configuration.
struct ConditionInputs {
    double nu = 1.0;
    double c1 = 1.0;
    double h = 0.1;
    double chi = 1.0;
    double chi0 = 1.0;
    double avg_grad_sq = 0.0;
    double avg_grad_4 = 0.0;
    /// lambda_T of the error; refined condition skipped when absent.
    std::optional<double> lambda_t_e;
    std::optional<FlowScales> scales;
};

struct ConditionReport {
    ConditionResult h;
    ConditionResult chi2d;
    ConditionResult chi3d;
    std::optional<ConditionResult> refined;
    double max_admissible_chi = 0.0;
    std::optional<ScalingRecommendation> scaling2d;
    std::optional<ScalingRecommendation> scaling3d;
};

ConditionReport evaluate_conditions(const ConditionInputs& in);

}  // namespace nudge
