#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gtfm/log_joint.hpp"
#include "gtfm/model.hpp"
#include "gtfm/stats.hpp"

namespace gtfm {

struct SamplerConfig {
    int n_chains = 2;
    int n_warmup = 500;   // discarded; all adaptation happens here
    int n_keep = 500;     // recorded per chain
    double step_size = 0.1;
    int n_leapfrog = 32;  // per-iteration count is uniform in [1, n_leapfrog]
    double target_accept = 0.8;
    std::uint64_t seed = 1;
    bool adapt_step = true;
    bool adapt_mass = true;

    void validate() const {
        if (n_chains < 1 || n_warmup < 1 || n_keep < 1)
            throw std::invalid_argument("sampler: chains/warmup/keep must be >= 1");
        if (step_size <= 0.0) throw std::invalid_argument("sampler: step_size must be > 0");
        if (n_leapfrog < 1) throw std::invalid_argument("sampler: n_leapfrog must be >= 1");
        if (target_accept <= 0.0 || target_accept >= 1.0)
            throw std::invalid_argument("sampler: target_accept must be in (0,1)");
    }
};

/// Posterior sample in the constrained parameterization, stored chain-major
/// (all of chain 0, then chain 1, ...). pointwise[m] holds the per-factor
/// data log-likelihood of draw m.
struct PosteriorDraws {
    std::vector<std::string> names;
    std::vector<std::vector<double>> draws;
    std::vector<std::vector<double>> pointwise;
    std::vector<int> chain_ids;
    std::vector<double> accept_stats;
    std::vector<char> divergence_flags;
    int n_chains = 0;
    int n_warmup = 0;
    int n_keep = 0;
    int warmup_divergences = 0;
    std::vector<double> final_step_sizes;

    std::size_t size() const { return draws.size(); }
    std::size_t dim() const { return names.size(); }

    std::size_t param_index(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        throw std::invalid_argument("no parameter named '" + name + "'");
    }

    std::vector<double> column(std::size_t i) const {
        std::vector<double> out(draws.size());
        for (std::size_t m = 0; m < draws.size(); ++m) out[m] = draws[m][i];
        return out;
    }
    std::vector<double> column(const std::string& name) const {
        return column(param_index(name));
    }
};

namespace hmc_detail {

// One leapfrog position/momentum update; grad must hold the gradient at z on
// entry and holds the gradient at the new z on exit. Returns the new logp.
template <class Target>
double leapfrog_step(const Target& target, std::vector<double>& z, std::vector<double>& p,
                     std::vector<double>& grad, const std::vector<double>& inv_mass,
                     double eps) {
    const std::size_t dim = z.size();
    for (std::size_t i = 0; i < dim; ++i) p[i] += 0.5 * eps * grad[i];
    for (std::size_t i = 0; i < dim; ++i) z[i] += eps * inv_mass[i] * p[i];
    const double lp = target.logp_grad(z, grad);
    for (std::size_t i = 0; i < dim; ++i) p[i] += 0.5 * eps * grad[i];
    return lp;
}

inline double kinetic(const std::vector<double>& p, const std::vector<double>& inv_mass) {
    double k = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) k += 0.5 * inv_mass[i] * p[i] * p[i];
    return k;
}

// Crude bisection-free search for a step size whose one-step acceptance
// probability straddles 0.5, following the usual doubling/halving heuristic.
template <class Target>
double find_step_size(const Target& target, const std::vector<double>& z0, double logp0,
                      const std::vector<double>& grad0, const std::vector<double>& inv_mass,
                      double eps0, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    const std::size_t dim = z0.size();
    std::vector<double> p0(dim);
    for (std::size_t i = 0; i < dim; ++i) p0[i] = nd(rng) / std::sqrt(inv_mass[i]);
    const double h0 = -logp0 + kinetic(p0, inv_mass);

    auto accept_prob = [&](double eps) {
        std::vector<double> z = z0, p = p0, grad = grad0;
        const double lp = leapfrog_step(target, z, p, grad, inv_mass, eps);
        if (!std::isfinite(lp)) return 0.0;
        const double h1 = -lp + kinetic(p, inv_mass);
        if (!std::isfinite(h1)) return 0.0;
        return std::exp(std::min(0.0, h0 - h1));
    };

    double eps = eps0;
    double a = accept_prob(eps);
    const int dir = a > 0.5 ? 1 : -1;
    for (int it = 0; it < 60; ++it) {
        if (dir == 1 && a <= 0.5) break;
        if (dir == -1 && a > 0.5) break;
        eps *= dir == 1 ? 2.0 : 0.5;
        if (eps > 1e3 || eps < 1e-10) break;
        a = accept_prob(eps);
    }
    return std::clamp(eps, 1e-10, 1e3);
}

struct DualAveraging {
    double mu = 0.0;
    double log_eps = 0.0;
    double log_eps_bar = 0.0;
    double h_bar = 0.0;
    int m = 0;
    static constexpr double gamma = 0.05;
    static constexpr double t0 = 10.0;
    static constexpr double kappa = 0.75;

    void reset(double eps) {
        mu = std::log(10.0 * eps);
        log_eps = std::log(eps);
        log_eps_bar = std::log(eps);
        h_bar = 0.0;
        m = 0;
    }
    double update(double target_accept, double accept) {
        ++m;
        const double md = static_cast<double>(m);
        h_bar = (1.0 - 1.0 / (md + t0)) * h_bar + (target_accept - accept) / (md + t0);
        log_eps = mu - std::sqrt(md) / gamma * h_bar;
        const double w = std::pow(md, -kappa);
        log_eps_bar = w * log_eps + (1.0 - w) * log_eps_bar;
        return std::exp(log_eps);
    }
    double adapted() const { return std::exp(log_eps_bar); }
};

struct ChainResult {
    std::vector<std::vector<double>> z_draws;
    std::vector<double> accept_stats;
    std::vector<char> divergences;
    int warmup_divergences = 0;
    double final_step_size = 0.0;
};

template <class Target, class Init>
ChainResult run_chain(const Target& target, const SamplerConfig& cfg, int chain_id,
                      const Init& init) {
    const std::size_t dim = static_cast<std::size_t>(target.dim());
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(chain_id));
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> ud(0.0, 1.0);

    std::vector<double> z, grad(dim);
    double logp = detail::neg_inf();
    for (int attempt = 0; attempt < 100 && !std::isfinite(logp); ++attempt) {
        z = init(chain_id, rng);
        if (z.size() != dim) throw std::invalid_argument("sampler: init has wrong dimension");
        logp = target.logp_grad(z, grad);
    }
    if (!std::isfinite(logp))
        throw std::runtime_error("sampler: non-finite joint density at every initial point");

    std::vector<double> inv_mass(dim, 1.0);
    double eps = cfg.step_size;
    DualAveraging da;
    if (cfg.adapt_step) {
        eps = find_step_size(target, z, logp, grad, inv_mass, cfg.step_size, rng);
        da.reset(eps);
    }

    // Mass-adaptation window: the middle half of warmup.
    const bool use_mass = cfg.adapt_mass && cfg.n_warmup >= 200;
    const int win_lo = cfg.n_warmup / 4;
    const int win_hi = 3 * cfg.n_warmup / 4;
    std::vector<double> acc_mean(dim, 0.0), acc_m2(dim, 0.0);
    long acc_n = 0;

    ChainResult out;
    out.z_draws.reserve(static_cast<std::size_t>(cfg.n_keep));
    std::vector<double> p(dim), z_new(dim), grad_new(dim);

    const int total = cfg.n_warmup + cfg.n_keep;
    for (int iter = 0; iter < total; ++iter) {
        const bool warming = iter < cfg.n_warmup;
        const int n_steps =
            std::uniform_int_distribution<int>(1, cfg.n_leapfrog)(rng);
        for (std::size_t i = 0; i < dim; ++i) p[i] = nd(rng) / std::sqrt(inv_mass[i]);
        const double h0 = -logp + kinetic(p, inv_mass);

        z_new = z;
        grad_new = grad;
        std::vector<double> p_new = p;
        double logp_new = logp;
        bool divergent = false;
        for (int s = 0; s < n_steps; ++s) {
            logp_new = leapfrog_step(target, z_new, p_new, grad_new, inv_mass, eps);
            if (!std::isfinite(logp_new)) {
                divergent = true;
                break;
            }
        }
        double accept = 0.0;
        if (!divergent) {
            const double h1 = -logp_new + kinetic(p_new, inv_mass);
            const double dh = h1 - h0;
            if (!std::isfinite(dh) || dh > 1000.0) divergent = true;
            else accept = std::exp(std::min(0.0, -dh));
        }
        if (!divergent && ud(rng) < accept) {
            z = z_new;
            grad = grad_new;
            logp = logp_new;
        }

        if (warming) {
            if (divergent) ++out.warmup_divergences;
            if (cfg.adapt_step) eps = da.update(cfg.target_accept, accept);
            if (use_mass && iter >= win_lo && iter < win_hi) {
                ++acc_n;
                for (std::size_t i = 0; i < dim; ++i) {
                    const double delta = z[i] - acc_mean[i];
                    acc_mean[i] += delta / static_cast<double>(acc_n);
                    acc_m2[i] += delta * (z[i] - acc_mean[i]);
                }
                if (iter == win_hi - 1 && acc_n > 1) {
                    const double n = static_cast<double>(acc_n);
                    for (std::size_t i = 0; i < dim; ++i) {
                        const double var = acc_m2[i] / (n - 1.0);
                        inv_mass[i] = n / (n + 5.0) * var + 1e-3 * (5.0 / (n + 5.0));
                    }
                    if (cfg.adapt_step) {
                        eps = find_step_size(target, z, logp, grad, inv_mass, eps, rng);
                        da.reset(eps);
                    }
                }
            }
            if (iter == cfg.n_warmup - 1) {
                if (cfg.adapt_step) eps = da.adapted();
                if (out.warmup_divergences == cfg.n_warmup)
                    throw std::runtime_error(
                        "sampler: every warmup iteration diverged (chain " +
                        std::to_string(chain_id) + ", step size " + std::to_string(eps) + ")");
            }
        } else {
            out.z_draws.push_back(z);
            out.accept_stats.push_back(accept);
            out.divergences.push_back(divergent ? 1 : 0);
        }
    }
    out.final_step_size = eps;
    return out;
}

}  // namespace hmc_detail

/// Runs cfg.n_chains independent HMC chains on an arbitrary differentiable
/// target (dim() + logp_grad(z, grad)). init(chain_id, rng) supplies starting
/// points. Draws stay in the target's own coordinates.
template <class Target, class Init>
PosteriorDraws sample_target(const Target& target, const SamplerConfig& cfg, const Init& init) {
    cfg.validate();
    std::vector<hmc_detail::ChainResult> results(static_cast<std::size_t>(cfg.n_chains));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.n_chains));

    auto work = [&](int c) {
        try {
            results[static_cast<std::size_t>(c)] = hmc_detail::run_chain(target, cfg, c, init);
        } catch (...) {
            errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
    };
    if (cfg.n_chains == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(cfg.n_chains));
        for (int c = 0; c < cfg.n_chains; ++c) threads.emplace_back(work, c);
        for (auto& t : threads) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    PosteriorDraws out;
    out.n_chains = cfg.n_chains;
    out.n_warmup = cfg.n_warmup;
    out.n_keep = cfg.n_keep;
    out.names.resize(static_cast<std::size_t>(target.dim()));
    for (std::size_t i = 0; i < out.names.size(); ++i)
        out.names[i] = "z" + std::to_string(i);
    for (int c = 0; c < cfg.n_chains; ++c) {
        auto& r = results[static_cast<std::size_t>(c)];
        out.warmup_divergences += r.warmup_divergences;
        out.final_step_sizes.push_back(r.final_step_size);
        for (std::size_t m = 0; m < r.z_draws.size(); ++m) {
            out.draws.push_back(std::move(r.z_draws[m]));
            out.accept_stats.push_back(r.accept_stats[m]);
            out.divergence_flags.push_back(r.divergences[m]);
            out.chain_ids.push_back(c);
        }
    }
    return out;
}

/// Prior-draw initialization for a model target: parameters start at prior
/// draws, latent states at the observed series plus a small jitter, the
/// resilience path at its starting draw.
inline std::vector<double> init_from_prior(const ModelSpec& spec, const DesignMatrix& d,
                                           const ParamLayout& L, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    double y_sd = 1.0;
    if (d.y.size() > 2) y_sd = std::max(stddev(d.y), 1e-3);

    std::vector<double> v(static_cast<std::size_t>(L.dim()), 0.0);
    double phi_draw = 0.5;
    for (int i = 0; i < L.dim(); ++i) {
        const Slot& s = L.slots[static_cast<std::size_t>(i)];
        switch (s.role) {
            case SlotRole::phi_fixed:
            case SlotRole::phi0: {
                const double raw = s.prior.sample(rng);
                phi_draw = s.negated ? -raw : raw;
                v[static_cast<std::size_t>(i)] = phi_draw;
                break;
            }
            case SlotRole::phi_path:
                v[static_cast<std::size_t>(i)] = phi_draw + 0.01 * nd(rng);
                break;
            case SlotRole::state:
                v[static_cast<std::size_t>(i)] =
                    d.y[static_cast<std::size_t>(s.index - 1)] + 0.1 * y_sd * nd(rng);
                break;
            default: {
                const double raw = s.prior.sample(rng);
                v[static_cast<std::size_t>(i)] = s.negated ? -raw : raw;
                break;
            }
        }
    }
    return unconstrain_point(L, v);
}

/// Fits a model to a frame: builds the design and layout, samples the joint
/// posterior, and returns constrained draws with per-draw pointwise data
/// log-likelihoods.
inline PosteriorDraws sample(const ModelSpec& spec, const TimeSeriesFrame& frame,
                             const SamplerConfig& cfg) {
    spec.validate();
    cfg.validate();
    const DesignMatrix d = build_design(spec, frame);
    const ParamLayout L = build_layout(spec, d.T());
    const GtfmTarget target{&spec, &d, &L};

    auto init = [&](int, std::mt19937_64& rng) { return init_from_prior(spec, d, L, rng); };
    PosteriorDraws out = sample_target(target, cfg, init);

    out.names.clear();
    for (const auto& s : L.slots) out.names.push_back(s.name);
    out.pointwise.reserve(out.draws.size());
    for (auto& zrow : out.draws) {
        const std::vector<double> vrow = constrain_point(L, zrow);
        out.pointwise.push_back(pointwise_loglik(spec, d, L, vrow));
        zrow = vrow;
    }
    return out;
}

struct Diagnostics {
    std::vector<double> rhat;  // NaN when a single chain was run
    std::vector<double> ess;
    int divergences = 0;
};

namespace hmc_detail {

// Average ranks with ties shared, mapped through the normal quantile.
inline std::vector<double> rank_normalize(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = avg;
        i = j + 1;
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = detail::std_normal_quantile((rank[k] - 0.375) /
                                             (static_cast<double>(n) + 0.25));
    return out;
}

struct SplitStats {
    double rhat = nan_value();
    double ess = nan_value();
};

inline SplitStats split_stats(const std::vector<std::vector<double>>& chains) {
    // Split each chain in half.
    std::vector<std::vector<double>> seq;
    for (const auto& c : chains) {
        const std::size_t half = c.size() / 2;
        if (half < 2) return {};
        seq.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(half));
        seq.emplace_back(c.end() - static_cast<std::ptrdiff_t>(half), c.end());
    }
    const std::size_t S = seq.size();
    const std::size_t n = seq[0].size();

    std::vector<double> means(S), vars(S);
    for (std::size_t s = 0; s < S; ++s) {
        means[s] = mean(seq[s]);
        vars[s] = variance(seq[s]);
    }
    const double W = mean(vars);
    const double B = static_cast<double>(n) * variance(means);
    const double nd = static_cast<double>(n);
    const double var_plus = (nd - 1.0) / nd * W + B / nd;
    SplitStats out;
    if (W > 0.0) out.rhat = std::max(1.0, std::sqrt(var_plus / W));
    if (var_plus <= 0.0) return out;

    // Multi-chain autocorrelation, Geyer initial monotone sequence.
    std::vector<double> mean_acov(n, 0.0);
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            double a = 0.0;
            for (std::size_t i = 0; i + t < n; ++i)
                a += (seq[s][i] - means[s]) * (seq[s][i + t] - means[s]);
            mean_acov[t] += a / static_cast<double>(n) / static_cast<double>(S);
        }
    std::vector<double> rho(n);
    for (std::size_t t = 0; t < n; ++t) rho[t] = 1.0 - (W - mean_acov[t]) / var_plus;

    double tau = 0.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
        double pair = rho[2 * k] + rho[2 * k + 1];
        if (pair <= 0.0) break;
        pair = std::min(pair, prev_pair);
        prev_pair = pair;
        tau += 2.0 * pair;
    }
    tau -= rho[0];
    tau = std::max(tau, 1.0 / std::log10(static_cast<double>(S * n) + 10.0));
    out.ess = static_cast<double>(S * n) / tau;
    return out;
}

}  // namespace hmc_detail

inline Diagnostics diagnostics(const PosteriorDraws& d) {
    Diagnostics out;
    out.divergences = 0;
    for (char f : d.divergence_flags) out.divergences += f ? 1 : 0;
    const std::size_t dim = d.dim();
    out.rhat.assign(dim, nan_value());
    out.ess.assign(dim, nan_value());
    if (d.n_keep < 4) return out;

    for (std::size_t i = 0; i < dim; ++i) {
        const auto pooled = hmc_detail::rank_normalize(d.column(i));
        std::vector<std::vector<double>> chains(static_cast<std::size_t>(d.n_chains));
        for (std::size_t m = 0; m < pooled.size(); ++m)
            chains[static_cast<std::size_t>(d.chain_ids[m])].push_back(pooled[m]);
        const auto st = hmc_detail::split_stats(chains);
        out.ess[i] = st.ess;
        out.rhat[i] = d.n_chains >= 2 ? st.rhat : nan_value();
    }
    return out;
}

struct SummaryRow {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    double q2_5 = 0.0;
    double q25 = 0.0;
    double q50 = 0.0;
    double q75 = 0.0;
    double q97_5 = 0.0;
};

/// Posterior table in the usual report format: mean, SD and the 2.5/25/50/
/// 75/97.5 percent quantiles for the selected parameters (exactly those; an
/// empty selection yields an empty table).
inline std::vector<SummaryRow> summarize(const PosteriorDraws& d,
                                         const std::vector<std::string>& select) {
    if (d.draws.empty()) throw std::invalid_argument("summarize: no draws");
    std::vector<SummaryRow> out;
    for (const auto& name : select) {
        const auto col = d.column(name);
        SummaryRow r;
        r.name = name;
        r.mean = mean(col);
        r.sd = col.size() > 1 ? stddev(col) : 0.0;
        r.q2_5 = quantile(col, 0.025);
        r.q25 = quantile(col, 0.25);
        r.q50 = quantile(col, 0.50);
        r.q75 = quantile(col, 0.75);
        r.q97_5 = quantile(col, 0.975);
        out.push_back(r);
    }
    return out;
}

/// All parameters.
inline std::vector<SummaryRow> summarize(const PosteriorDraws& d) {
    return summarize(d, d.names);
}

}  // namespace gtfm
