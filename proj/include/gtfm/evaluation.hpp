#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtfm/frame.hpp"
#include "gtfm/hmc.hpp"
#include "gtfm/psis.hpp"
#include "gtfm/stats.hpp"

namespace gtfm {

// ---------------------------------------------------------------------------
// Information criteria
// ---------------------------------------------------------------------------

struct DicResult {
    double dic = 0.0;
    double p_dic = 0.0;
    double loglik_at_mean = 0.0;
};

/// DIC = -2 log p(Y|theta_hat) + 2 p_DIC with theta_hat the posterior mean in
/// the constrained space and p_DIC = 2(log p(Y|theta_hat) - mean_m loglik_m).
/// p_DIC can come out negative for awkward posteriors; it is reported as is.
inline DicResult dic(const PosteriorDraws& draws,
                     const std::function<double(const std::vector<double>&)>& loglik_at) {
    if (draws.draws.empty()) throw std::invalid_argument("dic: no draws");
    const std::size_t dim = draws.dim();
    std::vector<double> mean_point(dim, 0.0);
    for (const auto& row : draws.draws)
        for (std::size_t i = 0; i < dim; ++i) mean_point[i] += row[i];
    for (double& v : mean_point) v /= static_cast<double>(draws.size());

    double mean_ll = 0.0;
    for (const auto& row : draws.draws) mean_ll += loglik_at(row);
    mean_ll /= static_cast<double>(draws.size());

    DicResult out;
    out.loglik_at_mean = loglik_at(mean_point);
    if (!std::isfinite(out.loglik_at_mean))
        throw std::runtime_error("dic: non-finite log-likelihood at the posterior mean");
    out.p_dic = 2.0 * (out.loglik_at_mean - mean_ll);
    out.dic = -2.0 * out.loglik_at_mean + 2.0 * out.p_dic;
    return out;
}

struct WaicResult {
    double waic = 0.0;
    double se = 0.0;
    double p_waic = 0.0;
    double elpd = 0.0;
    bool unstable = false;  // some pointwise variance > 0.4
};

/// Widely applicable information criterion from an M x T pointwise
/// log-likelihood matrix. SE is the T-scaled pointwise SD on the reported
/// (-2 elpd) scale.
inline WaicResult waic(const std::vector<std::vector<double>>& pointwise) {
    WaicResult out;
    const std::size_t M = pointwise.size();
    if (M == 0 || pointwise[0].empty()) return out;
    if (M < 2) throw std::invalid_argument("waic: need at least 2 draws");
    const std::size_t T = pointwise[0].size();

    std::vector<double> contrib(T);
    std::vector<double> col(M);
    for (std::size_t i = 0; i < T; ++i) {
        for (std::size_t m = 0; m < M; ++m) col[m] = pointwise[m][i];
        const double lpd_i = logsumexp(col) - std::log(static_cast<double>(M));
        const double p_i = variance(col);
        out.p_waic += p_i;
        out.elpd += lpd_i - p_i;
        contrib[i] = -2.0 * (lpd_i - p_i);
        if (p_i > 0.4) out.unstable = true;
    }
    out.waic = -2.0 * out.elpd;
    out.se = T >= 2 ? std::sqrt(static_cast<double>(T) * variance(contrib)) : 0.0;
    return out;
}

struct LooResult {
    double looic = 0.0;
    double se = 0.0;
    double elpd = 0.0;
    std::vector<double> khat;  // per observation; NaN when no tail fit happened
    bool khat_warn = false;    // any khat > 0.7
};

/// PSIS leave-one-out criterion. Raw importance ratios are 1/p(Y_i|theta_m);
/// their log is smoothed per observation by psis_smooth.
inline LooResult looic(const std::vector<std::vector<double>>& pointwise) {
    LooResult out;
    const std::size_t M = pointwise.size();
    if (M == 0 || pointwise[0].empty()) return out;
    if (M < 25) throw std::invalid_argument("looic: need at least 25 draws");
    const std::size_t T = pointwise[0].size();

    std::vector<double> contrib(T);
    std::vector<double> lr(M), ll(M);
    for (std::size_t i = 0; i < T; ++i) {
        for (std::size_t m = 0; m < M; ++m) {
            ll[m] = pointwise[m][i];
            lr[m] = -pointwise[m][i];
        }
        const PsisResult ps = psis_smooth(lr);
        std::vector<double> lw(M);
        for (std::size_t m = 0; m < M; ++m) lw[m] = ps.log_weights[m] + ll[m];
        const double elpd_i = logsumexp(lw);
        out.elpd += elpd_i;
        contrib[i] = -2.0 * elpd_i;
        out.khat.push_back(ps.khat);
        if (std::isfinite(ps.khat) && ps.khat > 0.7) out.khat_warn = true;
    }
    out.looic = -2.0 * out.elpd;
    out.se = T >= 2 ? std::sqrt(static_cast<double>(T) * variance(contrib)) : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Goodness of fit and residual tests
// ---------------------------------------------------------------------------

struct GofResult {
    double mase = 0.0;
    double mse = 0.0;
    double r2 = nan_value();
    bool r2_defined = false;
};

/// MASE scales errors by the mean absolute first difference of y; MSE is the
/// mean squared error; R2 = 1 - SS_res/SS_tot, absent for constant y.
inline GofResult gof(const std::vector<double>& y, const std::vector<double>& fitted) {
    const std::size_t T = y.size();
    if (fitted.size() != T) throw std::invalid_argument("gof: length mismatch");
    if (T < 2) throw std::invalid_argument("gof: need T >= 2");

    double denom = 0.0;
    for (std::size_t t = 1; t < T; ++t) denom += std::abs(y[t] - y[t - 1]);
    denom /= static_cast<double>(T - 1);

    GofResult out;
    const double ybar = mean(y);
    double ss_res = 0.0, ss_tot = 0.0, abs_q = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const double e = y[t] - fitted[t];
        ss_res += e * e;
        ss_tot += (y[t] - ybar) * (y[t] - ybar);
        if (denom > 0.0) abs_q += std::abs(e / denom);
    }
    out.mse = ss_res / static_cast<double>(T);
    out.mase = denom > 0.0 ? abs_q / static_cast<double>(T) : nan_value();
    if (ss_tot > 0.0) {
        out.r2 = 1.0 - ss_res / ss_tot;
        out.r2_defined = true;
    }
    return out;
}

struct LjungBoxRow {
    int lag = 0;
    double statistic = 0.0;
    double p = 0.0;
};

/// Q(h) = T(T+2) sum_{k<=h} rho_k^2/(T-k), chi-squared with h degrees of
/// freedom; one row per cumulative lag h = 1..max_lag.
inline std::vector<LjungBoxRow> ljung_box(const std::vector<double>& residuals, int max_lag) {
    const auto T = residuals.size();
    if (max_lag < 1 || static_cast<std::size_t>(max_lag) >= T)
        throw std::invalid_argument("ljung_box: need T > max_lag >= 1");
    double energy = 0.0;
    const double m = mean(residuals);
    for (double e : residuals) energy += (e - m) * (e - m);
    if (energy <= 0.0) throw std::invalid_argument("ljung_box: zero-variance residuals");

    const auto rho = acf(residuals, max_lag);
    std::vector<LjungBoxRow> out;
    double cum = 0.0;
    const double Td = static_cast<double>(T);
    for (int h = 1; h <= max_lag; ++h) {
        cum += rho[static_cast<std::size_t>(h)] * rho[static_cast<std::size_t>(h)] /
               (Td - static_cast<double>(h));
        LjungBoxRow row;
        row.lag = h;
        row.statistic = Td * (Td + 2.0) * cum;
        row.p = 1.0 - boost::math::cdf(boost::math::chi_squared(h), row.statistic);
        out.push_back(row);
    }
    return out;
}

inline double durbin_watson(const std::vector<double>& residuals) {
    if (residuals.size() < 2) throw std::invalid_argument("durbin_watson: need T >= 2");
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < residuals.size(); ++t) {
        den += residuals[t] * residuals[t];
        if (t > 0) {
            const double d = residuals[t] - residuals[t - 1];
            num += d * d;
        }
    }
    if (den <= 0.0) throw std::invalid_argument("durbin_watson: all-zero residuals");
    return num / den;
}

// ---------------------------------------------------------------------------
// OLS core
// ---------------------------------------------------------------------------

struct OlsFit {
    std::vector<std::string> names;
    std::vector<double> coef;
    std::vector<double> se;
    std::vector<double> t;
    std::vector<double> p;
    std::vector<double> fitted;
    std::vector<double> residuals;
    double sigma2 = 0.0;
    double r2 = 0.0;
    int df = 0;
};

/// Classical OLS of y on the given columns (pass the intercept explicitly).
inline OlsFit ols(const std::vector<double>& y, const std::vector<std::vector<double>>& X,
                  const std::vector<std::string>& names) {
    const auto T = y.size();
    const auto k = X.size();
    if (k == 0 || names.size() != k) throw std::invalid_argument("ols: bad design");
    for (const auto& c : X)
        if (c.size() != T) throw std::invalid_argument("ols: ragged design");
    if (T <= k) throw std::invalid_argument("ols: need more rows than coefficients");

    Eigen::MatrixXd Xm(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(k));
    Eigen::VectorXd yv(static_cast<Eigen::Index>(T));
    for (std::size_t t = 0; t < T; ++t) {
        yv(static_cast<Eigen::Index>(t)) = y[t];
        for (std::size_t j = 0; j < k; ++j)
            Xm(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = X[j][t];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xm);
    // The default pivot threshold can miss exactly collinear columns once
    // rounding leaves a ~1e-14 remainder; anything this ill-conditioned is
    // junk for inference either way.
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(k))
        throw std::invalid_argument("ols: rank-deficient design");
    const Eigen::VectorXd beta = qr.solve(yv);
    const Eigen::VectorXd fit = Xm * beta;
    const Eigen::VectorXd res = yv - fit;

    OlsFit out;
    out.names = names;
    out.df = static_cast<int>(T - k);
    out.sigma2 = res.squaredNorm() / static_cast<double>(out.df);
    const Eigen::MatrixXd cov = out.sigma2 * (Xm.transpose() * Xm).inverse();

    const boost::math::students_t tdist(out.df);
    for (std::size_t j = 0; j < k; ++j) {
        const auto ej = static_cast<Eigen::Index>(j);
        out.coef.push_back(beta(ej));
        out.se.push_back(std::sqrt(cov(ej, ej)));
        const double tj = beta(ej) / out.se.back();  // +-inf on a perfect fit
        out.t.push_back(tj);
        out.p.push_back(std::isnan(tj) ? nan_value()
                                       : 2.0 * boost::math::cdf(tdist, -std::abs(tj)));
    }
    for (std::size_t t = 0; t < T; ++t) {
        out.fitted.push_back(fit(static_cast<Eigen::Index>(t)));
        out.residuals.push_back(res(static_cast<Eigen::Index>(t)));
    }
    const double ybar = mean(y);
    double ss_tot = 0.0;
    for (double v : y) ss_tot += (v - ybar) * (v - ybar);
    out.r2 = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot : nan_value();
    return out;
}

struct AdfResult {
    double statistic = 0.0;
    bool reject_at_5 = false;
    bool reject_at_1 = false;
    // Constant-only (no trend) asymptotic Dickey-Fuller critical values.
    double crit_5 = -2.86;
    double crit_1 = -3.43;
    int lags = 0;
};

/// Augmented Dickey-Fuller regression dy_t on (1, y_{t-1}, dy_{t-1..max_lag});
/// the reported statistic is the t-value of the y_{t-1} coefficient, compared
/// against the hard-coded constant/no-trend critical values above.
inline AdfResult adf(const std::vector<double>& series, int max_lag) {
    const auto T = series.size();
    if (max_lag < 0) throw std::invalid_argument("adf: negative lag");
    if (T < static_cast<std::size_t>(max_lag) + 10)
        throw std::invalid_argument("adf: need T >= max_lag + 10");

    std::vector<double> dy(T - 1);
    for (std::size_t t = 1; t < T; ++t) dy[t - 1] = series[t] - series[t - 1];

    const std::size_t first = static_cast<std::size_t>(max_lag) + 1;  // index into series
    const std::size_t n = T - first;
    std::vector<double> lhs(n);
    std::vector<std::vector<double>> X;
    std::vector<std::string> names;
    X.emplace_back(n, 1.0);
    names.emplace_back("intercept");
    X.emplace_back(n);
    names.emplace_back("level");
    for (int j = 1; j <= max_lag; ++j) {
        X.emplace_back(n);
        names.push_back("dlag" + std::to_string(j));
    }
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t t = first + r;
        lhs[r] = series[t] - series[t - 1];
        X[1][r] = series[t - 1];
        for (int j = 1; j <= max_lag; ++j)
            X[static_cast<std::size_t>(1 + j)][r] = dy[t - 1 - static_cast<std::size_t>(j)];
    }

    const OlsFit fit = ols(lhs, X, names);
    AdfResult out;
    out.lags = max_lag;
    out.statistic = fit.t[1];
    out.reject_at_5 = out.statistic < out.crit_5;
    out.reject_at_1 = out.statistic < out.crit_1;
    return out;
}

struct KsResult {
    double statistic = 0.0;
    double p = 0.0;
    bool moments_estimated = true;  // Lilliefors caveat: p is anti-conservative
};

/// Kolmogorov-Smirnov distance between the sample and Normal(mean, sd^2) with
/// both moments estimated from the sample; asymptotic p-value with the usual
/// finite-sample factor.
inline KsResult ks_normality(const std::vector<double>& residuals) {
    const auto n = residuals.size();
    if (n < 5) throw std::invalid_argument("ks_normality: need T >= 5");
    const double m = mean(residuals);
    const double s = stddev(residuals);
    if (s <= 0.0) throw std::invalid_argument("ks_normality: zero variance");

    std::vector<double> z(residuals);
    std::sort(z.begin(), z.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = detail::std_normal_cdf((z[i] - m) / s);
        d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / static_cast<double>(n)));
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / static_cast<double>(n)));
    }

    const double nd = static_cast<double>(n);
    const double lambda = (std::sqrt(nd) + 0.12 + 0.11 / std::sqrt(nd)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * (k % 2 == 1 ? 1.0 : -1.0) *
                            std::exp(-2.0 * k * k * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-10) break;
    }
    KsResult out;
    out.statistic = d;
    out.p = std::clamp(p, 0.0, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

struct ResidualTests {
    std::vector<LjungBoxRow> ljung_box;
    double durbin_watson = 0.0;
    AdfResult adf;
    KsResult ks;
};

struct FitReport {
    DicResult dic;
    WaicResult waic;
    LooResult loo;
    GofResult gof;
    ResidualTests tests;
    std::vector<double> fitted;
    std::vector<double> residuals;
    Period fitted_start;  // period of fitted[0]
};

/// Assembles the full report for one fitted model: information criteria,
/// goodness of fit on the model's fitted values, and residual diagnostics.
/// Fitted values are posterior means of the latent level (eta_free) or
/// one-step-ahead means phi_hat*Y_{t-1} + x_t'beta_hat at posterior means
/// (eta_zero, so the first observation has no fitted value).
inline FitReport model_report(const ModelSpec& spec, const TimeSeriesFrame& frame,
                              const PosteriorDraws& draws, int lb_max_lag = 4,
                              int adf_max_lag = 0) {
    const DesignMatrix d = build_design(spec, frame);
    const ParamLayout L = build_layout(spec, d.T());
    if (draws.dim() != static_cast<std::size_t>(L.dim()))
        throw std::invalid_argument("model_report: draws do not match the model layout");

    std::vector<double> vbar(draws.dim(), 0.0);
    for (const auto& row : draws.draws)
        for (std::size_t i = 0; i < vbar.size(); ++i) vbar[i] += row[i];
    for (double& v : vbar) v /= static_cast<double>(draws.size());

    FitReport rep;
    rep.dic = dic(draws, [&](const std::vector<double>& v) { return loglik_at(spec, d, L, v); });
    rep.waic = waic(draws.pointwise);
    rep.loo = looic(draws.pointwise);

    const int T = L.T;
    std::vector<double> y_aligned;
    if (spec.noise == NoiseMode::eta_free) {
        for (int t = 0; t < T; ++t)
            rep.fitted.push_back(vbar[static_cast<std::size_t>(L.state0 + t)]);
        y_aligned = d.y;
        rep.fitted_start = d.start;
    } else {
        for (int i = 1; i < T; ++i) {
            const double phi_i = spec.resilience == ResilienceMode::time_varying
                                     ? vbar[static_cast<std::size_t>(L.phi_path0 + i)]
                                     : vbar[static_cast<std::size_t>(L.phi)];
            double mu = phi_i * d.y[static_cast<std::size_t>(i - 1)] +
                        vbar[static_cast<std::size_t>(L.alpha)];
            for (int k = 0; k < L.p; ++k)
                mu += vbar[static_cast<std::size_t>(L.beta0 + k)] *
                      d.X[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            rep.fitted.push_back(mu);
            y_aligned.push_back(d.y[static_cast<std::size_t>(i)]);
        }
        rep.fitted_start = d.start.plus(1);
    }
    for (std::size_t t = 0; t < y_aligned.size(); ++t)
        rep.residuals.push_back(y_aligned[t] - rep.fitted[t]);

    rep.gof = gof(y_aligned, rep.fitted);
    rep.tests.ljung_box = ljung_box(rep.residuals, lb_max_lag);
    rep.tests.durbin_watson = durbin_watson(rep.residuals);
    rep.tests.adf = adf(rep.residuals, adf_max_lag);
    rep.tests.ks = ks_normality(rep.residuals);
    return rep;
}

/// OLS of the risk target on an intercept plus every other frame column.
inline OlsFit ols_baseline(const TimeSeriesFrame& frame) {
    const auto& y = frame.target();
    std::vector<std::vector<double>> X{std::vector<double>(y.size(), 1.0)};
    std::vector<std::string> names{"intercept"};
    for (const auto& n : frame.names()) {
        if (n == frame.risk_target()) continue;
        X.push_back(frame.col(n));
        names.push_back(n);
    }
    return ols(y, X, names);
}

}  // namespace gtfm
