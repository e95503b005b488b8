#include "itreval/variance_kit.hpp"

#include <algorithm>
#include <cmath>

#include "itreval/errors.hpp"
#include "itreval/rng.hpp"
#include "itreval/special.hpp"

namespace itreval {

double arm_mean(const ExperimentData& data, std::span<const double> values, int arm) {
    double s = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        if (data.t()[i] == arm) {
            s += values[i];
            ++c;
        }
    }
    if (c == 0) throw DegenerateDataError("empty arm");
    return s / static_cast<double>(c);
}

std::optional<double> arm_variance(const ExperimentData& data, std::span<const double> values,
                                   int arm) {
    const std::size_t c = arm ? data.n1() : data.n0();
    if (c < 2) return std::nullopt;
    const double m = arm_mean(data, values, arm);
    double ss = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        if (data.t()[i] == arm) {
            const double d = values[i] - m;
            ss += d * d;
        }
    }
    return ss / static_cast<double>(c - 1);
}

std::optional<double> kappa_hat(const ExperimentData& data, std::span<const std::uint8_t> f,
                                int group) {
    if (f.size() != data.n()) throw InputError("assignment length does not match data");
    double s1 = 0.0, s0 = 0.0;
    std::size_t c1 = 0, c0 = 0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        if (f[i] != group) continue;
        if (data.t()[i]) {
            s1 += data.y()[i];
            ++c1;
        } else {
            s0 += data.y()[i];
            ++c0;
        }
    }
    if (c1 == 0 || c0 == 0) return std::nullopt;
    return s1 / static_cast<double>(c1) - s0 / static_cast<double>(c0);
}

KappaProfile kappa_profile(const ExperimentData& data, std::span<const double> scores) {
    const std::size_t n = data.n();
    if (scores.size() != n) throw InputError("score length does not match data");
    auto order = rank_order(scores);

    std::vector<double> sum_t(n + 1, 0.0), sum_c(n + 1, 0.0);
    std::vector<std::size_t> cnt_t(n + 1, 0), cnt_c(n + 1, 0);
    for (std::size_t z = 1; z <= n; ++z) {
        const std::size_t i = order[z - 1];
        sum_t[z] = sum_t[z - 1];
        sum_c[z] = sum_c[z - 1];
        cnt_t[z] = cnt_t[z - 1];
        cnt_c[z] = cnt_c[z - 1];
        if (data.t()[i]) {
            sum_t[z] += data.y()[i];
            ++cnt_t[z];
        } else {
            sum_c[z] += data.y()[i];
            ++cnt_c[z];
        }
    }

    KappaProfile kp;
    kp.kappa1.assign(n + 1, 0.0);
    kp.kappa0.assign(n + 1, 0.0);
    std::vector<bool> ok1(n + 1, false), ok0(n + 1, false);
    for (std::size_t z = 0; z <= n; ++z) {
        if (cnt_t[z] > 0 && cnt_c[z] > 0) {
            ok1[z] = true;
            kp.kappa1[z] = sum_t[z] / static_cast<double>(cnt_t[z]) -
                           sum_c[z] / static_cast<double>(cnt_c[z]);
        }
        const std::size_t rt = cnt_t[n] - cnt_t[z], rc = cnt_c[n] - cnt_c[z];
        if (rt > 0 && rc > 0) {
            ok0[z] = true;
            kp.kappa0[z] = (sum_t[n] - sum_t[z]) / static_cast<double>(rt) -
                           (sum_c[n] - sum_c[z]) / static_cast<double>(rc);
        }
    }
    auto first = std::find(ok1.begin(), ok1.end(), true);
    auto last = std::find(ok0.rbegin(), ok0.rend(), true);
    if (first == ok1.end() || last == ok0.rend())
        throw DegenerateDataError("kappa profile is not estimable: an arm is empty");
    kp.z_min = static_cast<std::size_t>(first - ok1.begin());
    kp.z_max = n - static_cast<std::size_t>(last - ok0.rbegin());
    for (std::size_t z = 0; z < kp.z_min; ++z) kp.kappa1[z] = kp.kappa1[kp.z_min];
    for (std::size_t z = kp.z_max + 1; z <= n; ++z) kp.kappa0[z] = kp.kappa0[kp.z_max];
    return kp;
}

namespace {

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

void check_bound_args(double epsilon, double cap) {
    if (!(epsilon >= 0.0)) throw InputError("epsilon must be nonnegative");
    if (!(cap > 0.0)) throw InputError("CATE cap must be positive");
}

BiasBound tail_bound(std::size_t n, double p, double epsilon, double cap, double gamma,
                     double tail_weight) {
    const std::size_t k = budget_count(n, p);
    const double a = static_cast<double>(n - k), b = static_cast<double>(k + 1);
    const double hi = reg_inc_beta(clip01(1.0 - p + gamma), a, b);
    const double lo = reg_inc_beta(clip01(1.0 - p - gamma), a, b);
    BiasBound out;
    out.epsilon = epsilon;
    out.gamma = gamma;
    out.cate_cap = cap;
    out.probability_bound = clip01(1.0 - tail_weight * hi + tail_weight * lo);
    return out;
}

}  // namespace

BiasBound bias_bound_pape_budget(std::size_t n, double p, double epsilon, double cate_cap) {
    check_bound_args(epsilon, cate_cap);
    return tail_bound(n, p, epsilon, cate_cap, epsilon / cate_cap, 1.0);
}

BiasBound bias_bound_aupec(std::size_t n, double p_f_hat, double epsilon, double cate_cap) {
    check_bound_args(epsilon, cate_cap);
    return tail_bound(n, p_f_hat, epsilon, cate_cap, epsilon / (2.0 * cate_cap), 1.0);
}

BiasBound bias_bound_papd(std::size_t n, double p, double epsilon, double cate_cap) {
    check_bound_args(epsilon, cate_cap);
    return tail_bound(n, p, epsilon, cate_cap, epsilon / cate_cap, 2.0);
}

double papd_cov_bound(std::size_t n, double p, double kappa_f1, double kappa_g1) {
    if (n < 2) throw InputError("need n >= 2");
    const double k = static_cast<double>(budget_count(n, p));
    const double nn = static_cast<double>(n);
    return k * std::max(k, nn - k) / (nn * nn * (nn - 1.0)) * std::fabs(kappa_f1 * kappa_g1);
}

std::vector<double> binomial_pmf(std::size_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("binomial probability outside [0, 1]");
    std::vector<double> pmf(n + 1, 0.0);
    if (p == 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (p == 1.0) {
        pmf[n] = 1.0;
        return pmf;
    }
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        pmf[k] = std::exp(std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1) +
                          kk * std::log(p) + (nn - kk) * std::log1p(-p));
    }
    return pmf;
}

ZMomentEngine::ZMomentEngine(std::size_t n, double p_hat, std::vector<double> kappa1,
                             std::vector<double> kappa0, ZMomentOptions options)
    : n_(n), p_hat_(p_hat), options_(options) {
    if (n < 2) throw InputError("Z-moment engine needs n >= 2");
    if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw InputError("p_hat outside [0, 1]");
    if (kappa1.size() != n + 1 || kappa0.size() != n + 1)
        throw InputError("kappa arrays must have n + 1 entries");
    if (options.mode == ZMode::MonteCarlo && options.draws < 1)
        throw InputError("Monte Carlo needs at least one draw");
    if (options.mode == ZMode::ExactPolynomial && n > 30)
        throw InputError("exact polynomial Z-moments are limited to n <= 30");

    const double nn = static_cast<double>(n);
    const double d1 = nn * nn * (nn - 1.0);
    const double n4 = nn * nn * nn * nn;
    const double d4 = n4 * (nn - 1.0);
    a_.assign(n + 1, 0.0);
    b_.assign(n + 1, 0.0);
    // Running sums over z = 1..Z.
    double q = 0.0;     // sum z k1(z)
    double p1 = 0.0;    // sum z(n-z) k1(z) k0(z)
    double dsum = 0.0;  // sum_{z<z'} z(n-z') k1(z) k1(z')
    double t5 = 0.0;    // sum z(n-z) k1(z)^2
    for (std::size_t zi = 1; zi <= n; ++zi) {
        const double z = static_cast<double>(zi);
        const double k1 = kappa1[zi], k0 = kappa0[zi];
        dsum += (nn - z) * k1 * q;
        q += z * k1;
        p1 += z * (nn - z) * k1 * k0;
        t5 += z * (nn - z) * k1 * k1;
        const double r = nn - z;
        a_[zi] = -(1.0 / nn) * (p1 / d1 + z * r * r * k1 * k0 / d1) - 2.0 * dsum / d4 -
                 z * z * r * r * k1 * k1 / d4 - 2.0 * r * r * k1 * q / d4 + t5 / n4;
        b_[zi] = q / nn + r * z * k1 / nn;
    }
}

namespace {

ZMomentTerms exact_terms(const ZMomentEngine& e) {
    const std::size_t n = e.n();
    const auto& a = e.expectation_integrand();
    const auto& b = e.variance_argument();
    // E[g(Z)] expanded in the power basis of p.
    std::vector<std::vector<long double>> choose(n + 1, std::vector<long double>(n + 1, 0.0L));
    for (std::size_t i = 0; i <= n; ++i) {
        choose[i][0] = 1.0L;
        for (std::size_t j = 1; j <= i; ++j)
            choose[i][j] = choose[i - 1][j - 1] + (j <= i - 1 ? choose[i - 1][j] : 0.0L);
    }
    std::vector<long double> powers(n + 1, 1.0L);
    const long double p = e.p_hat();
    if (e.options().unbiased_powers) {
        const long double s = std::round(p * static_cast<long double>(n));
        for (std::size_t m = 1; m <= n; ++m)
            powers[m] = powers[m - 1] * (s - static_cast<long double>(m - 1)) /
                        static_cast<long double>(n - m + 1);
    } else {
        for (std::size_t m = 1; m <= n; ++m) powers[m] = powers[m - 1] * p;
    }
    auto expect = [&](auto g) {
        long double total = 0.0L;
        for (std::size_t m = 0; m <= n; ++m) {
            long double cm = 0.0L;
            for (std::size_t z = 0; z <= m; ++z) {
                const long double sign = ((m - z) % 2 == 0) ? 1.0L : -1.0L;
                cm += g(z) * choose[n][z] * choose[n - z][m - z] * sign;
            }
            total += cm * powers[m];
        }
        return total;
    };
    ZMomentTerms out;
    out.expectation_term = static_cast<double>(expect([&](std::size_t z) { return (long double)a[z]; }));
    const long double eb = expect([&](std::size_t z) { return (long double)b[z]; });
    const long double eb2 = expect([&](std::size_t z) { return (long double)b[z] * b[z]; });
    out.variance_term = static_cast<double>(std::max(0.0L, eb2 - eb * eb));
    return out;
}

ZMomentTerms monte_carlo_terms(const ZMomentEngine& e) {
    const std::size_t n = e.n();
    const auto& a = e.expectation_integrand();
    const auto& b = e.variance_argument();
    auto pmf = binomial_pmf(n, e.p_hat());
    std::vector<double> cdf(n + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k <= n; ++k) cdf[k] = (acc += pmf[k]);
    const std::size_t draws = e.options().draws;
    const std::uint64_t seed = e.options().seed;

    std::vector<std::size_t> zs(draws);
    for (std::size_t d = 0; d < draws; ++d) {
        const double u = unit_uniform(stream_key(seed, 0x5a, d)) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        zs[d] = std::min<std::size_t>(n, static_cast<std::size_t>(it - cdf.begin()));
        if (e.p_hat() == 1.0) zs[d] = n;
        if (e.p_hat() == 0.0) zs[d] = 0;
    }
    const double dd = static_cast<double>(draws);
    double ma = 0.0, mb = 0.0;
    for (auto z : zs) {
        ma += a[z];
        mb += b[z];
    }
    ma /= dd;
    mb /= dd;
    double va = 0.0, m2 = 0.0, m4 = 0.0;
    for (auto z : zs) {
        const double da = a[z] - ma, db = b[z] - mb;
        va += da * da;
        m2 += db * db;
        m4 += db * db * db * db;
    }
    ZMomentTerms out;
    out.expectation_term = ma;
    out.variance_term = draws > 1 ? m2 / (dd - 1.0) : 0.0;
    out.expectation_mcse = draws > 1 ? std::sqrt(va / (dd - 1.0) / dd) : 0.0;
    const double s2 = m2 / dd;
    out.variance_mcse = draws > 1 ? std::sqrt(std::max(0.0, m4 / dd - s2 * s2) / dd) : 0.0;
    return out;
}

}  // namespace

ZMomentTerms z_moment_terms(const ZMomentEngine& engine) {
    if (engine.options().mode == ZMode::ExactPolynomial) return exact_terms(engine);
    return monte_carlo_terms(engine);
}

}  // namespace itreval
