#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fastosc/asymptotics.hpp"
#include "fastosc/bound_state.hpp"
#include "fastosc/harness/config.hpp"
#include "fastosc/harness/csv.hpp"

namespace fastosc::harness {

struct SweepRecord {
    double eps = 0.0;
    std::optional<complex> k2;
    std::optional<complex> lambda_pred;
    std::optional<complex> lambda_num;
    std::optional<double> rel_err;
    std::optional<double> remainder_ratio;
    Existence verdict = Existence::Inconclusive;
    bool converged = false;
    // solver diagnostics
    int iterations = 0;
    double residual = std::numeric_limits<double>::quiet_NaN();
    double step = 0.0;
    std::string reason;
};

struct SweepSummary {
    std::size_t converged = 0;
    std::optional<double> slope;           // log|lambda_num| vs log eps
    std::optional<double> mean_remainder;  // mean remainder_ratio
    std::optional<double> remainder_spread; // max/min remainder_ratio
};

struct SweepResult {
    std::vector<SweepRecord> records;
    SweepSummary summary;
};

/// One solver run at eps, compared with the prediction when k2 is known.
inline SweepRecord solve_record(ExperimentConfig const& cfg, double eps, std::optional<K2Report> const& k2) {
    SweepRecord rec;
    rec.eps = eps;
    std::optional<complex> hint;
    if (k2) {
        rec.k2 = k2->value;
        rec.lambda_pred = predict_lambda(k2->value, eps);
        rec.verdict = k2->classification;
        hint = k2->value;
    }
    auto const search = find_bound_state(cfg.potential, eps, hint, cfg.solver, k2 ? std::nullopt : cfg.bracket);
    rec.iterations = search.iterations;
    rec.residual = search.last_residual;
    rec.step = search.step;
    rec.reason = search.reason;
    if (search.result) {
        rec.converged = true;
        rec.lambda_num = search.result->lambda;
        if (rec.lambda_pred) {
            double const diff = std::abs(*rec.lambda_num - *rec.lambda_pred);
            rec.rel_err = diff / std::abs(*rec.lambda_pred);
            rec.remainder_ratio = diff / std::pow(eps, 5);
        }
    }
    return rec;
}

inline SweepSummary summarize(std::vector<SweepRecord> const& records) {
    SweepSummary s;
    std::vector<double> xs, ys, ratios;
    for (auto const& r : records) {
        if (!r.lambda_num) continue;
        ++s.converged;
        xs.push_back(r.eps);
        ys.push_back(std::abs(*r.lambda_num));
        if (r.remainder_ratio) ratios.push_back(*r.remainder_ratio);
    }
    if (xs.size() >= 2) s.slope = log_log_slope(xs, ys);
    if (!ratios.empty()) {
        double sum = 0.0;
        for (double r : ratios) sum += r;
        s.mean_remainder = sum / static_cast<double>(ratios.size());
        auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        if (*lo > 0.0) s.remainder_spread = *hi / *lo;
    }
    return s;
}

/// One record per eps, in input order; entries are computed concurrently.
inline SweepResult run_sweep(ExperimentConfig const& cfg) {
    auto const k2 = compute_k2(cfg.potential);
    if (k2.classification == Existence::Inconclusive)
        throw InputError("sweep needs Re k2 != 0 (classification is Inconclusive)");
    std::vector<std::future<SweepRecord>> jobs;
    jobs.reserve(cfg.epsilons.size());
    for (double eps : cfg.epsilons)
        jobs.push_back(std::async(std::launch::async, [&cfg, &k2, eps] {
            try {
                return solve_record(cfg, eps, k2);
            } catch (std::exception const& e) {
                SweepRecord rec;
                rec.eps = eps;
                rec.k2 = k2.value;
                rec.lambda_pred = predict_lambda(k2.value, eps);
                rec.verdict = k2.classification;
                rec.reason = e.what();
                return rec;
            }
        }));
    SweepResult out;
    for (auto& j : jobs) out.records.push_back(j.get());
    out.summary = summarize(out.records);
    return out;
}

inline std::vector<std::string> const& record_header() {
    static std::vector<std::string> const h{"eps",          "k2_re",         "k2_im",        "lambda_pred_re",
                                            "lambda_pred_im", "lambda_num_re", "lambda_num_im", "rel_err",
                                            "remainder_ratio", "verdict",      "converged"};
    return h;
}

inline void emit_csv(std::vector<SweepRecord> const& records, std::ostream& out,
                     std::string const& destination = "<stream>") {
    write_row(out, record_header());
    auto re = [](std::optional<complex> const& z) { return z ? format_real(z->real()) : std::string{}; };
    auto im = [](std::optional<complex> const& z) { return z ? format_real(z->imag()) : std::string{}; };
    for (auto const& r : records) {
        write_row(out, {format_real(r.eps), re(r.k2), im(r.k2), re(r.lambda_pred), im(r.lambda_pred), re(r.lambda_num),
                        im(r.lambda_num), format_field(r.rel_err), format_field(r.remainder_ratio), to_string(r.verdict),
                        r.converged ? "true" : "false"});
    }
    if (!out) throw std::runtime_error("failed writing CSV to " + destination + ": output stream error");
}

} // namespace fastosc::harness
