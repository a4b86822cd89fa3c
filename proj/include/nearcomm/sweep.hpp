#pragma once

#include <string>
#include <vector>

#include "nearcomm/approx.hpp"
#include "nearcomm/generators.hpp"

namespace nearcomm {

struct SweepCase {
    InstanceRecipe recipe;
    BinningParams params;
};

struct SweepRow {
    InstanceRecipe recipe;
    BinningParams params;
    bool ok = false;
    std::string error;          // set when the case failed, cert is then unset
    ApproxCertificate cert;
    double wall_ms = 0.0;       // stays 0 unless timing was requested
};

struct SweepSummary {
    int total = 0;
    int failed = 0;             // cases that threw
    int violations_dx = 0;      // rows with dX above its certified bound
    int violations_domega = 0;
    double max_ratio_dx = 0.0;  // max dX / bound_dX over ok rows
    double max_ratio_domega = 0.0;
    double slope_dx = 0.0;      // log-log fit of median dX against eps
    int slope_points = 0;       // distinct eps values entering the fit
};

struct SweepResult {
    std::vector<SweepRow> rows;
    SweepSummary summary;
};

// Runs every case in order. Per-case failures are captured in the row, not
// thrown. With `timing` set, wall_ms holds the measured per-case time;
// otherwise it stays 0 so the emitted CSV is reproducible byte for byte.
SweepResult run_sweep(const std::vector<SweepCase>& cases, bool timing = false);

// Header:
// kind,dim,seed,eps,delta_eps,dX,bound_dX,dOmega,bound_dOmega,residual,pass_dX,pass_dOmega,wall_ms
// Numbers are printed with 17 significant digits; failed rows carry nan
// in the certificate columns and 0 in the pass flags.
std::string sweep_to_csv(const SweepResult& result);

// Least squares slope of log(median dX) against log(eps), restricted to rows
// with a light spectral tail (delta_eps < 0.5) and a nonzero dX. Returns the
// number of distinct eps medians through `points`.
double fit_dx_slope(const std::vector<SweepRow>& rows, int* points = nullptr);

}  // namespace nearcomm
