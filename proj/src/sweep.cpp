#include "nearcomm/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "nearcomm/errors.hpp"

namespace nearcomm {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double fit_dx_slope(const std::vector<SweepRow>& rows, int* points) {
    std::map<double, std::vector<double>> by_eps;
    for (const auto& r : rows) {
        if (!r.ok) continue;
        if (!(r.cert.delta_eps < 0.5)) continue;
        if (!(r.cert.dX > 0.0)) continue;
        by_eps[r.cert.eps].push_back(r.cert.dX);
    }
    if (points) *points = (int)by_eps.size();
    if (by_eps.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = (double)by_eps.size();
    for (const auto& [eps, vals] : by_eps) {
        double lx = std::log(eps);
        double ly = std::log(median(vals));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepResult run_sweep(const std::vector<SweepCase>& cases, bool timing) {
    SweepResult out;
    out.rows.reserve(cases.size());
    for (const auto& c : cases) {
        SweepRow row;
        row.recipe = c.recipe;
        row.params = c.params;
        auto t0 = std::chrono::steady_clock::now();
        try {
            Instance inst = gen_instance(c.recipe);
            CommutingApproximant ca = commuting_approximants(inst.rho, inst.x, c.params);
            row.cert = ca.cert;
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        if (timing) {
            auto t1 = std::chrono::steady_clock::now();
            row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
        out.rows.push_back(std::move(row));
    }

    SweepSummary& s = out.summary;
    s.total = (int)out.rows.size();
    for (const auto& r : out.rows) {
        if (!r.ok) {
            s.failed += 1;
            continue;
        }
        if (!r.cert.pass_dX()) s.violations_dx += 1;
        if (!r.cert.pass_dOmega()) s.violations_domega += 1;
        if (r.cert.bound_dX > 0.0)
            s.max_ratio_dx = std::max(s.max_ratio_dx, r.cert.dX / r.cert.bound_dX);
        if (r.cert.bound_dOmega > 0.0)
            s.max_ratio_domega = std::max(s.max_ratio_domega, r.cert.dOmega / r.cert.bound_dOmega);
    }
    s.slope_dx = fit_dx_slope(out.rows, &s.slope_points);
    return out;
}

std::string sweep_to_csv(const SweepResult& result) {
    std::string out =
        "kind,dim,seed,eps,delta_eps,dX,bound_dX,dOmega,bound_dOmega,"
        "residual,pass_dX,pass_dOmega,wall_ms\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : result.rows) {
        const ApproxCertificate* c = r.ok ? &r.cert : nullptr;
        out += to_string(r.recipe.kind);
        out += ',';
        out += std::to_string(r.recipe.dim);
        out += ',';
        out += std::to_string(r.recipe.seed);
        out += ',';
        out += fmt17(r.params.eps);
        out += ',';
        out += fmt17(c ? c->delta_eps : nan);
        out += ',';
        out += fmt17(c ? c->dX : nan);
        out += ',';
        out += fmt17(c ? c->bound_dX : nan);
        out += ',';
        out += fmt17(c ? c->dOmega : nan);
        out += ',';
        out += fmt17(c ? c->bound_dOmega : nan);
        out += ',';
        out += fmt17(c ? c->residual : nan);
        out += ',';
        out += (c && c->pass_dX()) ? '1' : '0';
        out += ',';
        out += (c && c->pass_dOmega()) ? '1' : '0';
        out += ',';
        out += fmt17(r.wall_ms);
        out += '\n';
    }
    return out;
}

}  // namespace nearcomm
