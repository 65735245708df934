#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "spsafs/measurement.hpp"
#include "spsafs/random.hpp"

namespace spsafs {

struct GroupSamples {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;

    std::size_t group_count() const { return values.size(); }
    std::size_t total_count() const {
        std::size_t n = 0;
        for (const auto& g : values) n += g.size();
        return n;
    }
    void validate() const {
        if (values.size() < 2) throw std::invalid_argument("need at least two groups");
        for (const auto& g : values)
            if (g.size() < 2)
                throw std::invalid_argument("each group needs at least two values");
        if (!names.empty() && names.size() != values.size())
            throw std::invalid_argument("group name count mismatch");
    }
};

namespace detail {

inline double group_mean(const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    return m / static_cast<double>(xs.size());
}

inline double group_variance(const std::vector<double>& xs) {  // n - 1 denominator
    const double m = group_mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace detail

// Bartlett's test of equal variances. Returns the chi-squared statistic
// and its upper tail probability on k - 1 degrees of freedom.
inline std::pair<double, double> bartlett_test(const GroupSamples& groups) {
    groups.validate();
    const std::size_t k = groups.group_count();
    const double n_total = static_cast<double>(groups.total_count());

    double pooled = 0.0, log_sum = 0.0, inv_sum = 0.0;
    for (const auto& g : groups.values) {
        const double v = detail::group_variance(g);
        if (v <= 0.0)
            throw std::invalid_argument("bartlett_test: a group has zero variance");
        const double dof = static_cast<double>(g.size() - 1);
        pooled += dof * v;
        log_sum += dof * std::log(v);
        inv_sum += 1.0 / dof;
    }
    const double dof_w = n_total - static_cast<double>(k);
    pooled /= dof_w;
    const double correction =
        1.0 + (inv_sum - 1.0 / dof_w) / (3.0 * static_cast<double>(k - 1));
    const double stat = (dof_w * std::log(pooled) - log_sum) / correction;

    boost::math::chi_squared dist(static_cast<double>(k - 1));
    return {stat, boost::math::cdf(boost::math::complement(dist, std::max(stat, 0.0)))};
}

struct AnovaResult {
    double f = 0.0;
    double df1 = 0.0;
    double df2 = 0.0;
    double p = 1.0;
    double ms_within = 0.0;  // only meaningful for the classic test
};

inline AnovaResult anova_oneway(const GroupSamples& groups) {
    groups.validate();
    const std::size_t k = groups.group_count();
    const double n_total = static_cast<double>(groups.total_count());

    double grand = 0.0;
    for (const auto& g : groups.values)
        for (double x : g) grand += x;
    grand /= n_total;

    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups.values) {
        const double m = detail::group_mean(g);
        ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double x : g) ssw += (x - m) * (x - m);
    }

    AnovaResult r;
    r.df1 = static_cast<double>(k - 1);
    r.df2 = n_total - static_cast<double>(k);
    r.ms_within = ssw / r.df2;
    if (r.ms_within <= 0.0) {
        // Every group internally constant: means either all agree or differ exactly.
        r.f = ssb > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        r.p = ssb > 0.0 ? 0.0 : 1.0;
        return r;
    }
    r.f = (ssb / r.df1) / r.ms_within;
    boost::math::fisher_f dist(r.df1, r.df2);
    r.p = boost::math::cdf(boost::math::complement(dist, r.f));
    return r;
}

// Welch's heteroscedastic one-way test.
inline AnovaResult welch_anova(const GroupSamples& groups) {
    groups.validate();
    const std::size_t k = groups.group_count();
    const double kd = static_cast<double>(k);

    std::vector<double> w(k), m(k);
    double w_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double v = detail::group_variance(groups.values[i]);
        if (v <= 0.0)
            throw std::invalid_argument("welch_anova: a group has zero variance");
        w[i] = static_cast<double>(groups.values[i].size()) / v;
        m[i] = detail::group_mean(groups.values[i]);
        w_sum += w[i];
    }
    double mean_w = 0.0;
    for (std::size_t i = 0; i < k; ++i) mean_w += w[i] * m[i];
    mean_w /= w_sum;

    double a = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        a += w[i] * (m[i] - mean_w) * (m[i] - mean_w);
        const double frac = 1.0 - w[i] / w_sum;
        tail += frac * frac / static_cast<double>(groups.values[i].size() - 1);
    }
    a /= kd - 1.0;

    AnovaResult r;
    r.df1 = kd - 1.0;
    r.df2 = (kd * kd - 1.0) / (3.0 * tail);
    r.f = a / (1.0 + 2.0 * (kd - 2.0) / (kd * kd - 1.0) * tail);
    boost::math::fisher_f dist(r.df1, r.df2);
    r.p = boost::math::cdf(boost::math::complement(dist, r.f));
    return r;
}

constexpr std::uint64_t kDefaultQuantileSeed = 0x5eedfacedbeef101ULL;
constexpr std::size_t kDefaultQuantileDraws = 200000;

// Draws of the studentized range: (max - min of k standard normals) over
// sqrt(chi-squared(df) / df), df a positive integer. Sorted ascending.
inline std::vector<double> studentized_range_draws(std::size_t k, std::size_t df,
                                                   std::size_t draws, std::uint64_t seed) {
    if (k < 2 || df < 1) throw std::invalid_argument("studentized range: k >= 2, df >= 1");
    RandomStream rng(seed);
    std::vector<double> out(draws);
    for (std::size_t d = 0; d < draws; ++d) {
        double lo = 0.0, hi = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double z = rng.next_gaussian();
            if (i == 0) {
                lo = hi = z;
            } else {
                lo = std::min(lo, z);
                hi = std::max(hi, z);
            }
        }
        double chi2 = 0.0;
        for (std::size_t i = 0; i < df; ++i) {
            const double z = rng.next_gaussian();
            chi2 += z * z;
        }
        out[d] = (hi - lo) / std::sqrt(chi2 / static_cast<double>(df));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline double quantile_of_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double studentized_range_quantile(std::size_t k, std::size_t df, double level,
                                         std::size_t draws = kDefaultQuantileDraws,
                                         std::uint64_t seed = kDefaultQuantileSeed) {
    return quantile_of_sorted(studentized_range_draws(k, df, draws, seed), level);
}

struct PairwiseComparison {
    std::size_t first = 0, second = 0;
    double difference = 0.0;  // mean(first) - mean(second)
    double ci_low = 0.0, ci_high = 0.0;
    double p = 1.0;
    bool significant = false;
};

// Tukey's honest significant difference with the Tukey-Kramer standard
// error for unequal group sizes. The studentized-range reference
// distribution comes from the seeded Monte Carlo above.
inline std::vector<PairwiseComparison> tukey_hsd(const GroupSamples& groups,
                                                 double alpha = 0.05,
                                                 std::size_t draws = kDefaultQuantileDraws,
                                                 std::uint64_t seed = kDefaultQuantileSeed) {
    groups.validate();
    const AnovaResult base = anova_oneway(groups);
    const std::size_t k = groups.group_count();
    const std::vector<double> ref = studentized_range_draws(
        k, static_cast<std::size_t>(base.df2), draws, seed);
    const double q_crit = quantile_of_sorted(ref, 1.0 - alpha);

    std::vector<PairwiseComparison> out;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double ni = static_cast<double>(groups.values[i].size());
            const double nj = static_cast<double>(groups.values[j].size());
            const double se = std::sqrt(base.ms_within / 2.0 * (1.0 / ni + 1.0 / nj));
            PairwiseComparison c;
            c.first = i;
            c.second = j;
            c.difference = detail::group_mean(groups.values[i]) -
                           detail::group_mean(groups.values[j]);
            c.ci_low = c.difference - q_crit * se;
            c.ci_high = c.difference + q_crit * se;
            const double stat = se > 0.0 ? std::fabs(c.difference) / se
                                         : (c.difference == 0.0 ? 0.0 : 1e300);
            const auto above =
                ref.end() - std::upper_bound(ref.begin(), ref.end(), stat);
            c.p = static_cast<double>(above) / static_cast<double>(ref.size());
            c.significant = stat > q_crit;
            out.push_back(c);
        }
    return out;
}

// Pairwise Welch t-tests, the heteroscedastic fallback when variances
// cannot be pooled.
inline std::vector<PairwiseComparison> welch_pairwise(const GroupSamples& groups,
                                                      double alpha = 0.05) {
    groups.validate();
    std::vector<PairwiseComparison> out;
    const std::size_t k = groups.group_count();
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double ni = static_cast<double>(groups.values[i].size());
            const double nj = static_cast<double>(groups.values[j].size());
            const double vi = detail::group_variance(groups.values[i]);
            const double vj = detail::group_variance(groups.values[j]);
            if (vi <= 0.0 && vj <= 0.0)
                throw std::invalid_argument("welch_pairwise: both groups constant");
            const double sei2 = vi / ni, sej2 = vj / nj;
            const double se = std::sqrt(sei2 + sej2);
            const double df = (sei2 + sej2) * (sei2 + sej2) /
                              (sei2 * sei2 / (ni - 1.0) + sej2 * sej2 / (nj - 1.0));
            PairwiseComparison c;
            c.first = i;
            c.second = j;
            c.difference = detail::group_mean(groups.values[i]) -
                           detail::group_mean(groups.values[j]);
            boost::math::students_t dist(df);
            const double t = c.difference / se;
            c.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
            const double t_crit = boost::math::quantile(dist, 1.0 - alpha / 2.0);
            c.ci_low = c.difference - t_crit * se;
            c.ci_high = c.difference + t_crit * se;
            c.significant = c.p < alpha;
            out.push_back(c);
        }
    return out;
}

struct ComparisonReport {
    double bartlett_stat = 0.0;
    double bartlett_p = 1.0;
    bool heteroscedastic = false;  // true when the Welch branch was taken
    AnovaResult anova;
    std::vector<PairwiseComparison> pairwise;
    std::size_t best_index = 0;  // group with the best mean
    // True when the omnibus test rejects and every pairwise comparison
    // against the best group is significant.
    bool best_distinguished = false;
};

inline ComparisonReport compare_groups(const GroupSamples& groups, double alpha = 0.05,
                                       bool lower_is_better = true,
                                       std::size_t draws = kDefaultQuantileDraws,
                                       std::uint64_t seed = kDefaultQuantileSeed) {
    groups.validate();
    ComparisonReport report;
    auto [b_stat, b_p] = bartlett_test(groups);
    report.bartlett_stat = b_stat;
    report.bartlett_p = b_p;
    report.heteroscedastic = b_p < alpha;

    if (report.heteroscedastic) {
        report.anova = welch_anova(groups);
        report.pairwise = welch_pairwise(groups, alpha);
    } else {
        report.anova = anova_oneway(groups);
        report.pairwise = tukey_hsd(groups, alpha, draws, seed);
    }

    for (std::size_t i = 1; i < groups.group_count(); ++i) {
        const double a = detail::group_mean(groups.values[i]);
        const double b = detail::group_mean(groups.values[report.best_index]);
        if (lower_is_better ? a < b : a > b) report.best_index = i;
    }

    bool all_significant = true;
    for (const auto& c : report.pairwise)
        if ((c.first == report.best_index || c.second == report.best_index) &&
            !c.significant)
            all_significant = false;
    report.best_distinguished = report.anova.p < alpha && all_significant;
    return report;
}

}  // namespace spsafs
