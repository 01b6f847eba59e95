#pragma once

namespace nudge {

/// Diagnostics of one accepted assimilation step; one CSV row.
struct StepRecord {
    long step = 0;
    double t = 0.0;
    /// chi used for the accepted solve.
    double chi = 0.0;
    double err_l2 = 0.0;
    double rel_err = 0.0;
    double proj_err = 0.0;
    double rel_proj_err = 0.0;
    double grad_v_sq = 0.0;
    int repeats = 0;

    // In-memory only; not part of the CSV schema.
    /// Accepted because the repeat budget ran out or chi sat at chi_max.
    bool forced = false;
    /// ||I_H e(t_n)|| the controller compared against.
    double est_prev = 0.0;
    /// Algorithm 2 band quantity Q at the accepted step.
    double band_q = 0.0;
};

}  // namespace nudge
