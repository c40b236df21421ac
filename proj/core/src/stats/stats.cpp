#include "kupred/stats/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cassert>
#include <numeric>
#include <set>

#include "kupred/util/error.hpp"
#include "kupred/util/rng.hpp"

namespace kupred::stats {

namespace {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) /
           static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    size_t n = x.size();
    double mx = mean_of(x), my = mean_of(y);
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0 || syy <= 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

std::vector<double> average_ranks(const std::vector<double>& values) {
    size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

SpearmanResult spearman_rho(const std::vector<double>& x,
                            const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw Error("spearman_rho needs equal series of length >= 3");
    bool cx = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    bool cy = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (cx || cy) return {0.0, true};
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    return {pearson(rx, ry), false};
}

CorrelationStrength strength_of(double rho) {
    int hundredths = static_cast<int>(std::llround(std::abs(rho) * 100.0));
    if (hundredths <= 19) return CorrelationStrength::VeryWeak;
    if (hundredths <= 39) return CorrelationStrength::Weak;
    if (hundredths <= 59) return CorrelationStrength::Moderate;
    if (hundredths <= 79) return CorrelationStrength::Strong;
    return CorrelationStrength::Large;
}

const char* strength_name(CorrelationStrength s) {
    switch (s) {
        case CorrelationStrength::VeryWeak: return "very weak";
        case CorrelationStrength::Weak: return "weak";
        case CorrelationStrength::Moderate: return "moderate";
        case CorrelationStrength::Strong: return "strong";
        case CorrelationStrength::Large: return "large";
    }
    return "?";
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    if (a.size() != b.size())
        throw Error("wilcoxon_signed_rank needs paired series");
    std::vector<double> diffs;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    WilcoxonResult out;
    out.n_effective = static_cast<int>(diffs.size());
    if (diffs.empty()) {
        out.degenerate = true;
        out.p = 1.0;
        return out;
    }
    std::vector<double> abs_d(diffs.size());
    for (size_t i = 0; i < diffs.size(); ++i) abs_d[i] = std::abs(diffs[i]);
    auto ranks = average_ranks(abs_d);
    double w_plus = 0;
    for (size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] > 0) w_plus += ranks[i];
    out.w_plus = w_plus;

    size_t n = diffs.size();
    if (n <= static_cast<size_t>(kWilcoxonExactLimit)) {
        out.exact = true;
        // enumerate all sign assignments over the ranks
        size_t total = size_t{1} << n;
        size_t le = 0, ge = 0;
        for (size_t mask = 0; mask < total; ++mask) {
            double w = 0;
            for (size_t i = 0; i < n; ++i)
                if (mask & (size_t{1} << i)) w += ranks[i];
            if (w <= w_plus) ++le;
            if (w >= w_plus) ++ge;
        }
        double p_le = static_cast<double>(le) / static_cast<double>(total);
        double p_ge = static_cast<double>(ge) / static_cast<double>(total);
        out.p = std::min(1.0, 2.0 * std::min(p_le, p_ge));
        return out;
    }
    // normal approximation with tie correction
    double nn = static_cast<double>(n);
    double mu = nn * (nn + 1) / 4.0;
    double tie_term = 0.0;
    {
        std::map<double, int> tie_counts;
        for (double v : abs_d) ++tie_counts[v];
        for (const auto& [v, t] : tie_counts)
            if (t > 1) tie_term += static_cast<double>(t) * t * t - t;
    }
    double var = nn * (nn + 1) * (2 * nn + 1) / 24.0 - tie_term / 48.0;
    if (var <= 0) {
        out.degenerate = true;
        out.p = 1.0;
        return out;
    }
    double z = (w_plus - mu) / std::sqrt(var);
    out.p = std::min(1.0, 2.0 * normal_sf(std::abs(z)));
    return out;
}

MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                 const std::vector<double>& b) {
    MannWhitneyResult out;
    if (a.empty() || b.empty()) return out;
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto ranks = average_ranks(pooled);
    double r1 = 0;
    for (size_t i = 0; i < a.size(); ++i) r1 += ranks[i];
    double n1 = static_cast<double>(a.size());
    double n2 = static_cast<double>(b.size());
    double u1 = r1 - n1 * (n1 + 1) / 2.0;
    out.u = u1;
    double mu = n1 * n2 / 2.0;
    double nn = n1 + n2;
    double tie_term = 0.0;
    {
        std::map<double, int> tie_counts;
        for (double v : pooled) ++tie_counts[v];
        for (const auto& [v, t] : tie_counts)
            if (t > 1) tie_term += static_cast<double>(t) * t * t - t;
    }
    double var = n1 * n2 / 12.0 * ((nn + 1) - tie_term / (nn * (nn - 1)));
    if (var <= 0) {
        out.p = 1.0;
        return out;
    }
    double diff = u1 - mu;
    double cc = diff > 0 ? -0.5 : (diff < 0 ? 0.5 : 0.0);
    double z = (diff + cc) / std::sqrt(var);
    out.p = std::min(1.0, 2.0 * normal_sf(std::abs(z)));
    return out;
}

EffectMagnitude effect_magnitude(double delta) {
    double d = std::abs(delta);
    if (d <= 0.147) return EffectMagnitude::Negligible;
    if (d <= 0.33) return EffectMagnitude::Small;
    if (d <= 0.474) return EffectMagnitude::Medium;
    return EffectMagnitude::Large;
}

const char* effect_letter(EffectMagnitude m) {
    switch (m) {
        case EffectMagnitude::Negligible: return "N";
        case EffectMagnitude::Small: return "S";
        case EffectMagnitude::Medium: return "M";
        case EffectMagnitude::Large: return "L";
    }
    return "?";
}

CliffsDelta cliffs_delta(const std::vector<double>& a,
                         const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw Error("cliffs_delta needs non-empty series");
    long long gt = 0, lt = 0;
    for (double x : a)
        for (double y : b) {
            if (x > y) ++gt;
            if (x < y) ++lt;
        }
    double delta = static_cast<double>(gt - lt) /
                   (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    return {delta, effect_magnitude(delta)};
}

double variance_inflation(const Eigen::MatrixXd& table, int target) {
    const long n = table.rows();
    const long d = table.cols();
    if (d < 2) throw Error("variance_inflation needs >= 2 columns");
    Eigen::VectorXd y = table.col(target);
    double ymean = y.mean();
    double sst = (y.array() - ymean).square().sum();
    if (sst <= 0) return 1.0;  // constant target carries no inflation

    Eigen::MatrixXd X(n, d);  // intercept + other columns
    X.col(0).setOnes();
    long c = 1;
    for (long j = 0; j < d; ++j) {
        if (j == target) continue;
        X.col(c++) = table.col(j);
    }
    X.conservativeResize(n, c);
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    double ssr = (y - X * beta).squaredNorm();
    double r2 = 1.0 - ssr / sst;
    if (r2 >= 1.0 - 1e-12) return std::numeric_limits<double>::infinity();
    return 1.0 / (1.0 - r2);
}

std::vector<std::string> auto_spearman(const Eigen::MatrixXd& table,
                                       const std::vector<std::string>& columns,
                                       const AutoSpearmanConfig& cfg) {
    const long d = table.cols();
    if (static_cast<size_t>(d) != columns.size())
        throw Error("auto_spearman: column name count mismatch");
    std::vector<int> remaining;
    for (long j = 0; j < d; ++j) remaining.push_back(static_cast<int>(j));

    auto col = [&](int j) {
        std::vector<double> v(static_cast<size_t>(table.rows()));
        for (long i = 0; i < table.rows(); ++i) v[static_cast<size_t>(i)] = table(i, j);
        return v;
    };
    // pairwise |rho| computed once
    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(d, d);
    for (long i = 0; i < d; ++i)
        for (long j = i + 1; j < d; ++j) {
            double rho =
                std::abs(spearman_rho(col(static_cast<int>(i)),
                                      col(static_cast<int>(j))).rho);
            corr(i, j) = corr(j, i) = rho;
        }

    // phase 1: drop the partner with the higher mean |rho| to all others
    for (;;) {
        int bi = -1, bj = -1;
        double best = cfg.rho_max;
        for (size_t x = 0; x < remaining.size(); ++x)
            for (size_t y = x + 1; y < remaining.size(); ++y) {
                double r = corr(remaining[x], remaining[y]);
                if (r >= best && (bi < 0 || r > best)) {
                    best = r;
                    bi = static_cast<int>(x);
                    bj = static_cast<int>(y);
                }
            }
        if (bi < 0) break;
        auto mean_corr = [&](size_t idx) {
            double s = 0;
            int cnt = 0;
            for (size_t o = 0; o < remaining.size(); ++o) {
                if (o == idx) continue;
                s += corr(remaining[idx], remaining[o]);
                ++cnt;
            }
            return cnt ? s / cnt : 0.0;
        };
        double mi = mean_corr(static_cast<size_t>(bi));
        double mj = mean_corr(static_cast<size_t>(bj));
        size_t drop = mi > mj ? static_cast<size_t>(bi)
                              : (mj > mi ? static_cast<size_t>(bj)
                                         : static_cast<size_t>(bj));
        remaining.erase(remaining.begin() + static_cast<long>(drop));
    }

    // phase 2: iterative highest-VIF removal
    for (;;) {
        if (remaining.size() < 2) break;
        Eigen::MatrixXd sub(table.rows(), static_cast<long>(remaining.size()));
        for (size_t j = 0; j < remaining.size(); ++j)
            sub.col(static_cast<long>(j)) = table.col(remaining[j]);
        int worst = -1;
        double worst_vif = cfg.vif_max;
        for (size_t j = 0; j < remaining.size(); ++j) {
            double vif = variance_inflation(sub, static_cast<int>(j));
            if (vif >= worst_vif && (worst < 0 || vif > worst_vif)) {
                worst_vif = vif;
                worst = static_cast<int>(j);
            } else if (worst >= 0 && vif == worst_vif) {
                worst = static_cast<int>(j);  // later column drops on ties
            }
        }
        if (worst < 0) break;
        remaining.erase(remaining.begin() + worst);
    }

    std::vector<std::string> out;
    for (int j : remaining) out.push_back(columns[static_cast<size_t>(j)]);
    return out;
}

namespace {

struct SkGroup {
    std::string name;
    const std::vector<double>* values;
    double median;
};

void sk_partition(std::vector<SkGroup>& ordered, size_t lo, size_t hi,
                  const ScottKnottConfig& cfg, int& next_rank,
                  std::map<std::string, int>& ranks) {
    size_t n = hi - lo;
    if (n <= 1) {
        for (size_t i = lo; i < hi; ++i) ranks[ordered[i].name] = next_rank;
        ++next_rank;
        return;
    }
    // best split by between-group sum of squares over pooled means
    std::vector<double> pooled;
    for (size_t i = lo; i < hi; ++i)
        pooled.insert(pooled.end(), ordered[i].values->begin(),
                      ordered[i].values->end());
    double mu = mean_of(pooled);

    double best_bss = -1;
    size_t best_k = lo;
    for (size_t k = lo + 1; k < hi; ++k) {
        std::vector<double> left, right;
        for (size_t i = lo; i < k; ++i)
            left.insert(left.end(), ordered[i].values->begin(),
                        ordered[i].values->end());
        for (size_t i = k; i < hi; ++i)
            right.insert(right.end(), ordered[i].values->begin(),
                         ordered[i].values->end());
        double bss =
            static_cast<double>(left.size()) * std::pow(mean_of(left) - mu, 2) +
            static_cast<double>(right.size()) * std::pow(mean_of(right) - mu, 2);
        if (bss > best_bss) {
            best_bss = bss;
            best_k = k;
        }
    }
    std::vector<double> left, right;
    for (size_t i = lo; i < best_k; ++i)
        left.insert(left.end(), ordered[i].values->begin(),
                    ordered[i].values->end());
    for (size_t i = best_k; i < hi; ++i)
        right.insert(right.end(), ordered[i].values->begin(),
                     ordered[i].values->end());

    bool split = false;
    if (!left.empty() && !right.empty()) {
        auto mw = mann_whitney_u(left, right);
        auto cd = cliffs_delta(left, right);
        split = mw.p < cfg.alpha && std::abs(cd.delta) > cfg.negligible_delta;
    }
    if (split) {
        sk_partition(ordered, lo, best_k, cfg, next_rank, ranks);
        sk_partition(ordered, best_k, hi, cfg, next_rank, ranks);
    } else {
        for (size_t i = lo; i < hi; ++i) ranks[ordered[i].name] = next_rank;
        ++next_rank;
    }
}

} // namespace

std::map<std::string, int> scott_knott_esd(
    const std::map<std::string, std::vector<double>>& groups,
    const ScottKnottConfig& cfg) {
    std::vector<SkGroup> ordered;
    for (const auto& [name, values] : groups) {
        if (values.empty()) throw Error("scott_knott_esd: empty group " + name);
        ordered.push_back({name, &values, median_of(values)});
    }
    std::sort(ordered.begin(), ordered.end(), [](const SkGroup& a, const SkGroup& b) {
        if (a.median != b.median) return a.median > b.median;
        return a.name < b.name;
    });
    std::map<std::string, int> ranks;
    int next_rank = 1;
    sk_partition(ordered, 0, ordered.size(), cfg, next_rank, ranks);
    return ranks;
}

PcaResult pca_reduce(const Eigen::MatrixXd& table, double variance_threshold) {
    const long n = table.rows();
    const long d = table.cols();
    PcaResult out;
    // standardize, dropping constant columns
    std::vector<int> kept;
    for (long j = 0; j < d; ++j) {
        double mean = table.col(j).mean();
        double var = (table.col(j).array() - mean).square().sum() /
                     std::max<double>(1.0, static_cast<double>(n - 1));
        if (var > 0) kept.push_back(static_cast<int>(j));
    }
    if (kept.empty()) throw Error("pca_reduce: all columns constant");
    Eigen::MatrixXd z(n, static_cast<long>(kept.size()));
    for (size_t j = 0; j < kept.size(); ++j) {
        Eigen::VectorXd c = table.col(kept[j]);
        double mean = c.mean();
        double sd = std::sqrt((c.array() - mean).square().sum() /
                              std::max<double>(1.0, static_cast<double>(n - 1)));
        z.col(static_cast<long>(j)) = (c.array() - mean) / sd;
    }
    Eigen::MatrixXd cov =
        z.transpose() * z / std::max<double>(1.0, static_cast<double>(n - 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    Eigen::VectorXd evals = eig.eigenvalues().reverse();
    Eigen::MatrixXd evecs = eig.eigenvectors().rowwise().reverse();

    double total = std::max(evals.sum(), 1e-300);
    double acc = 0;
    int k = 0;
    for (long i = 0; i < evals.size(); ++i) {
        acc += std::max(0.0, evals(i)) / total;
        ++k;
        if (acc >= variance_threshold - 1e-12) break;
    }
    // deterministic sign: the largest-|loading| entry of each component > 0
    for (int c = 0; c < k; ++c) {
        long arg = 0;
        evecs.col(c).cwiseAbs().maxCoeff(&arg);
        if (evecs(arg, c) < 0) evecs.col(c) = -evecs.col(c);
    }
    out.components = k;
    out.kept_columns = kept;
    out.loadings = evecs.leftCols(k);
    out.scores = z * out.loadings;
    for (int i = 0; i < k; ++i)
        out.explained.push_back(std::max(0.0, evals(i)) / total);
    return out;
}

namespace {

long distinct_rows(const Eigen::MatrixXd& points) {
    std::set<std::vector<double>> seen;
    for (long i = 0; i < points.rows(); ++i) {
        std::vector<double> row(static_cast<size_t>(points.cols()));
        for (long j = 0; j < points.cols(); ++j) row[static_cast<size_t>(j)] = points(i, j);
        seen.insert(std::move(row));
    }
    return static_cast<long>(seen.size());
}

Clustering lloyd_once(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng,
                      int max_iter) {
    const long n = points.rows();
    // k-means++ style greedy seeding
    Eigen::MatrixXd centroids(k, points.cols());
    std::uniform_int_distribution<long> first(0, n - 1);
    centroids.row(0) = points.row(first(rng));
    Eigen::VectorXd d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        double total = d2.sum();
        long pick = 0;
        if (total > 0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            double acc = 0;
            for (long i = 0; i < n; ++i) {
                acc += d2(i);
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = first(rng);
        }
        centroids.row(c) = points.row(pick);
        Eigen::VectorXd nd =
            (points.rowwise() - centroids.row(c)).rowwise().squaredNorm();
        d2 = d2.cwiseMin(nd);
    }

    std::vector<int> assign(static_cast<size_t>(n), 0);
#ifndef NDEBUG
    double prev_inertia = std::numeric_limits<double>::infinity();
#endif
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (long i = 0; i < n; ++i) {
            int best = 0;
            double bd = (points.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                double dd = (points.row(i) - centroids.row(c)).squaredNorm();
                if (dd < bd) {
                    bd = dd;
                    best = c;
                }
            }
            if (assign[static_cast<size_t>(i)] != best) {
                assign[static_cast<size_t>(i)] = best;
                changed = true;
            }
        }
        // recompute centroids; repopulate empties with the farthest point
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        std::vector<long> counts(static_cast<size_t>(k), 0);
        for (long i = 0; i < n; ++i) {
            sums.row(assign[static_cast<size_t>(i)]) += points.row(i);
            ++counts[static_cast<size_t>(assign[static_cast<size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<size_t>(c)] > 0) {
                centroids.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
            } else {
                long far = 0;
                double fd = -1;
                for (long i = 0; i < n; ++i) {
                    double dd = (points.row(i) -
                                 centroids.row(assign[static_cast<size_t>(i)]))
                                    .squaredNorm();
                    if (dd > fd) {
                        fd = dd;
                        far = i;
                    }
                }
                centroids.row(c) = points.row(far);
                assign[static_cast<size_t>(far)] = c;
                changed = true;
            }
        }
        if (!changed && it > 0) break;
#ifndef NDEBUG
        double inertia = 0;
        for (long i = 0; i < n; ++i)
            inertia += (points.row(i) -
                        centroids.row(assign[static_cast<size_t>(i)]))
                           .squaredNorm();
        assert(inertia <= prev_inertia + 1e-9);
        prev_inertia = inertia;
#endif
    }
    Clustering out;
    out.k = k;
    out.assignment = std::move(assign);
    out.centroids = std::move(centroids);
    out.inertia = 0;
    for (long i = 0; i < n; ++i)
        out.inertia +=
            (points.row(i) - out.centroids.row(out.assignment[static_cast<size_t>(i)]))
                .squaredNorm();
    return out;
}

} // namespace

Clustering kmeans_cluster(const Eigen::MatrixXd& points, int k, uint64_t seed,
                          int n_init, int max_iter) {
    if (k < 2) throw Error("kmeans_cluster: k must be >= 2");
    if (points.rows() < k) throw Error("kmeans_cluster: fewer rows than k");
    if (distinct_rows(points) < k)
        throw Error("kmeans_cluster: fewer distinct points than k");
    Clustering best;
    bool have = false;
    for (int r = 0; r < n_init; ++r) {
        auto rng = make_rng(seed, static_cast<uint64_t>(r));
        Clustering c = lloyd_once(points, k, rng, max_iter);
        if (!have || c.inertia < best.inertia) {
            best = std::move(c);
            have = true;
        }
    }
    // dense relabel by first appearance for stable ids
    std::map<int, int> relabel;
    for (int& a : best.assignment) {
        auto it = relabel.find(a);
        if (it == relabel.end()) {
            int id = static_cast<int>(relabel.size());
            relabel[a] = id;
            a = id;
        } else {
            a = it->second;
        }
    }
    Eigen::MatrixXd reordered(best.k, best.centroids.cols());
    for (const auto& [old_id, new_id] : relabel)
        reordered.row(new_id) = best.centroids.row(old_id);
    best.centroids = reordered;
    return best;
}

double mean_silhouette(const Clustering& clustering,
                       const Eigen::MatrixXd& points) {
    const long n = points.rows();
    const auto& a = clustering.assignment;
    int k = clustering.k;
    std::vector<long> counts(static_cast<size_t>(k), 0);
    for (int c : a) ++counts[static_cast<size_t>(c)];
    double total = 0;
    for (long i = 0; i < n; ++i) {
        int own = a[static_cast<size_t>(i)];
        if (counts[static_cast<size_t>(own)] <= 1) continue;  // contributes 0
        std::vector<double> sums(static_cast<size_t>(k), 0.0);
        for (long j = 0; j < n; ++j) {
            if (j == i) continue;
            double dist = (points.row(i) - points.row(j)).norm();
            sums[static_cast<size_t>(a[static_cast<size_t>(j)])] += dist;
        }
        double ai = sums[static_cast<size_t>(own)] /
                    static_cast<double>(counts[static_cast<size_t>(own)] - 1);
        double bi = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own || counts[static_cast<size_t>(c)] == 0) continue;
            bi = std::min(bi, sums[static_cast<size_t>(c)] /
                                   static_cast<double>(counts[static_cast<size_t>(c)]));
        }
        double denom = std::max(ai, bi);
        if (denom > 0) total += (bi - ai) / denom;
    }
    return total / static_cast<double>(n);
}

ChooseKResult choose_k(const Eigen::MatrixXd& points, uint64_t seed, int k_min,
                       int k_max) {
    if (points.rows() <= 2) throw Error("choose_k needs more than 2 rows");
    int upper = std::min<long>(k_max, points.rows() - 1);
    ChooseKResult out;
    for (int k = k_min; k <= upper; ++k) {
        Clustering c;
        try {
            c = kmeans_cluster(points, k, derive_seed(seed, static_cast<uint64_t>(k)));
        } catch (const Error&) {
            continue;  // fewer distinct points than k
        }
        double s = mean_silhouette(c, points);
        out.by_k[k] = s;
        if (out.k == 0 || s > out.silhouette + 1e-12) {
            out.k = k;
            out.silhouette = s;
        }
    }
    if (out.k == 0) throw Error("choose_k: no feasible k in range");
    return out;
}

double adjusted_rand_index(const Clustering& c1, const Clustering& c2) {
    if (c1.assignment.size() != c2.assignment.size())
        throw Error("adjusted_rand_index: row sets differ");
    const size_t n = c1.assignment.size();
    std::map<std::pair<int, int>, double> nij;
    std::map<int, double> ai, bj;
    for (size_t i = 0; i < n; ++i) {
        ++nij[{c1.assignment[i], c2.assignment[i]}];
        ++ai[c1.assignment[i]];
        ++bj[c2.assignment[i]];
    }
    auto choose2 = [](double m) { return m * (m - 1) / 2.0; };
    double sum_ij = 0, sum_a = 0, sum_b = 0;
    for (const auto& [k, v] : nij) sum_ij += choose2(v);
    for (const auto& [k, v] : ai) sum_a += choose2(v);
    for (const auto& [k, v] : bj) sum_b += choose2(v);
    double total = choose2(static_cast<double>(n));
    double expected = total > 0 ? sum_a * sum_b / total : 0;
    double maxi = (sum_a + sum_b) / 2.0;
    double denom = maxi - expected;
    if (denom == 0) return 1.0;  // both partitions trivial and equal
    return (sum_ij - expected) / denom;
}

ClusterOverlapReport cluster_overlap_report(const Clustering& ku_clusters,
                                            const Clustering& cm_clusters) {
    if (ku_clusters.assignment.size() != cm_clusters.assignment.size())
        throw Error("cluster_overlap_report: row sets differ");
    ClusterOverlapReport out;
    out.composition.resize(static_cast<size_t>(ku_clusters.k));
    std::vector<double> sizes(static_cast<size_t>(ku_clusters.k), 0.0);
    for (size_t i = 0; i < ku_clusters.assignment.size(); ++i) {
        int kc = ku_clusters.assignment[i];
        ++out.composition[static_cast<size_t>(kc)][cm_clusters.assignment[i]];
        ++sizes[static_cast<size_t>(kc)];
    }
    int not_overlapped = 0;
    for (size_t c = 0; c < out.composition.size(); ++c) {
        for (auto& [cm, count] : out.composition[c]) count /= sizes[c];
        bool single = out.composition[c].size() == 1;
        out.overlapped.push_back(single);
        if (!single) ++not_overlapped;
    }
    out.percent_not_overlapped =
        ku_clusters.k > 0
            ? 100.0 * static_cast<double>(not_overlapped) / ku_clusters.k
            : 0.0;
    return out;
}

} // namespace kupred::stats
