#include "vilab/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "vilab/common.hpp"

namespace vilab {

int EstimationResult::term_index(const std::string& name) const {
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (terms[i] == name) return static_cast<int>(i);
    return -1;
}

double pseudo_r2(double loglik_model, double loglik_null) {
    if (!std::isfinite(loglik_null) || loglik_null == 0.0)
        throw NumericalError("null model log-likelihood is degenerate");
    return 1.0 - loglik_model / loglik_null;
}

Eigen::MatrixXd cluster_covariance(const Eigen::MatrixXd& bread,
                                   const Eigen::MatrixXd& score_rows,
                                   const std::vector<int>& cluster_ids,
                                   int n_clusters) {
    const auto k = bread.rows();
    if (n_clusters < 2) throw DataError("clustered errors need >= 2 clusters");
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n_clusters, k);
    for (Eigen::Index i = 0; i < score_rows.rows(); ++i)
        sums.row(cluster_ids[static_cast<std::size_t>(i)]) += score_rows.row(i);
    const Eigen::MatrixXd meat = sums.transpose() * sums;
    const double factor =
        static_cast<double>(n_clusters) / static_cast<double>(n_clusters - 1);
    return bread * (factor * meat) * bread;
}

namespace {

struct Design {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;               // regressors, plus intercept when present
    std::vector<std::string> terms;  // column labels of x
    std::vector<std::vector<int>> fe;  // group id per row, one vector per dim
    std::vector<int> fe_sizes;
    std::vector<int> cluster;
    int n_clusters = 0;
    DropReport drop;
    std::size_t n_input = 0;
};

std::vector<int> group_ids(const ColumnTable& panel, const std::string& column,
                           const std::vector<std::size_t>& rows, int* count) {
    std::vector<int> ids(rows.size());
    if (panel.is_numeric(column)) {
        const auto& col = panel.num(column);
        std::map<double, int> seen;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const double key = col[rows[r]];
            auto [it, _] = seen.emplace(key, static_cast<int>(seen.size()));
            ids[r] = it->second;
        }
        *count = static_cast<int>(seen.size());
    } else {
        const auto& col = panel.str(column);
        std::map<std::string, int> seen;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            auto [it, _] =
                seen.emplace(col[rows[r]], static_cast<int>(seen.size()));
            ids[r] = it->second;
        }
        *count = static_cast<int>(seen.size());
    }
    return ids;
}

void compact_ids(std::vector<int>& ids, int* count) {
    std::map<int, int> remap;
    for (int& id : ids) {
        auto [it, _] = remap.emplace(id, static_cast<int>(remap.size()));
        id = it->second;
    }
    *count = static_cast<int>(remap.size());
}

// Rows whose outcome is constant at the boundary within some FE group carry
// no likelihood information (the group effect diverges); drop them to a
// fixpoint across dimensions before fitting.
void drop_boundary_groups(Design& design, bool binary, DropReport* report) {
    if (design.fe.empty()) return;
    std::vector<char> keep(static_cast<std::size_t>(design.y.size()), 1);
    bool changed = true;
    int iterations = 0;
    while (changed) {
        changed = false;
        ++iterations;
        for (std::size_t d = 0; d < design.fe.size(); ++d) {
            std::vector<double> sum(design.fe_sizes[d], 0.0);
            std::vector<int> count(design.fe_sizes[d], 0);
            for (Eigen::Index i = 0; i < design.y.size(); ++i) {
                if (!keep[i]) continue;
                sum[design.fe[d][i]] += design.y(i);
                ++count[design.fe[d][i]];
            }
            for (Eigen::Index i = 0; i < design.y.size(); ++i) {
                if (!keep[i]) continue;
                const int g = design.fe[d][i];
                const bool all_zero = sum[g] == 0.0;
                const bool all_one = binary && count[g] > 0 &&
                                     sum[g] == static_cast<double>(count[g]);
                if (all_zero || all_one) {
                    keep[i] = 0;
                    changed = true;
                }
            }
        }
    }
    report->iterations = iterations;

    std::vector<std::size_t> kept_rows;
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (keep[i]) kept_rows.push_back(i);
    report->separation = keep.size() - kept_rows.size();
    if (kept_rows.size() == keep.size()) return;
    if (kept_rows.empty())
        throw DataError("every observation sits in a boundary-outcome group");

    Eigen::VectorXd y(kept_rows.size());
    Eigen::MatrixXd x(kept_rows.size(), design.x.cols());
    for (std::size_t r = 0; r < kept_rows.size(); ++r) {
        y(r) = design.y(kept_rows[r]);
        x.row(r) = design.x.row(kept_rows[r]);
    }
    design.y = std::move(y);
    design.x = std::move(x);
    for (std::size_t d = 0; d < design.fe.size(); ++d) {
        std::vector<int> ids(kept_rows.size());
        for (std::size_t r = 0; r < kept_rows.size(); ++r)
            ids[r] = design.fe[d][kept_rows[r]];
        compact_ids(ids, &design.fe_sizes[d]);
        design.fe[d] = std::move(ids);
    }
    if (!design.cluster.empty()) {
        std::vector<int> ids(kept_rows.size());
        for (std::size_t r = 0; r < kept_rows.size(); ++r)
            ids[r] = design.cluster[kept_rows[r]];
        compact_ids(ids, &design.n_clusters);
        design.cluster = std::move(ids);
    }
}

Design build_design(const ColumnTable& panel, const EstimationSpec& spec,
                    bool want_intercept) {
    if (spec.outcome.empty()) throw ConfigError("estimation needs an outcome");
    Design design;
    design.n_input = panel.rows();

    std::vector<std::string> numeric_cols{spec.outcome};
    numeric_cols.insert(numeric_cols.end(), spec.regressors.begin(),
                        spec.regressors.end());
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < panel.rows(); ++i) {
        bool ok = true;
        for (const auto& col : numeric_cols) {
            if (std::isnan(panel.num(col)[i])) {
                ok = false;
                break;
            }
        }
        if (ok) rows.push_back(i);
    }
    design.drop.missing = panel.rows() - rows.size();
    if (rows.empty()) throw DataError("no usable rows after missing-value drop");

    design.y.resize(rows.size());
    const auto& outcome = panel.num(spec.outcome);
    for (std::size_t r = 0; r < rows.size(); ++r) design.y(r) = outcome[rows[r]];

    const std::size_t k = spec.regressors.size() + (want_intercept ? 1 : 0);
    design.x.resize(rows.size(), k);
    std::size_t col = 0;
    if (want_intercept) {
        design.x.col(0).setOnes();
        design.terms.push_back("const");
        col = 1;
    }
    for (const auto& name : spec.regressors) {
        const auto& src = panel.num(name);
        for (std::size_t r = 0; r < rows.size(); ++r)
            design.x(r, col) = src[rows[r]];
        design.terms.push_back(name);
        ++col;
    }

    for (const auto& fe_col : spec.fixed_effects) {
        int count = 0;
        design.fe.push_back(group_ids(panel, fe_col, rows, &count));
        design.fe_sizes.push_back(count);
    }
    if (!spec.cluster.empty()) {
        design.cluster = group_ids(panel, spec.cluster, rows, &design.n_clusters);
        if (design.n_clusters < 2)
            throw DataError("clustering column has a single cluster");
    }
    return design;
}

// Iterated (optionally weighted) demeaning across the FE dimensions,
// applied simultaneously to every column of m.
void absorb(Eigen::MatrixXd& m, const std::vector<std::vector<int>>& fe,
            const std::vector<int>& fe_sizes, const Eigen::VectorXd& w,
            double tol = 1e-10, int max_sweeps = 2000) {
    if (fe.empty()) return;
    const auto n = m.rows();
    std::vector<std::vector<double>> wsum(fe.size());
    for (std::size_t d = 0; d < fe.size(); ++d) {
        wsum[d].assign(fe_sizes[d], 0.0);
        for (Eigen::Index i = 0; i < n; ++i) wsum[d][fe[d][i]] += w(i);
    }
    Eigen::MatrixXd means;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double worst = 0.0;
        for (std::size_t d = 0; d < fe.size(); ++d) {
            means = Eigen::MatrixXd::Zero(fe_sizes[d], m.cols());
            for (Eigen::Index i = 0; i < n; ++i)
                means.row(fe[d][i]) += w(i) * m.row(i);
            for (int g = 0; g < fe_sizes[d]; ++g)
                means.row(g) /= wsum[d][g];
            for (Eigen::Index i = 0; i < n; ++i)
                m.row(i) -= means.row(fe[d][i]);
            worst = std::max(worst, means.cwiseAbs().maxCoeff());
        }
        if (worst < tol) return;
    }
    throw NumericalError("fixed-effect absorption did not converge");
}

struct GlmFit {
    Eigen::VectorXd coef;
    Eigen::MatrixXd bread;       // (X~' W X~)^{-1}
    Eigen::MatrixXd score_rows;  // per-row score contributions (y - mu) x~
    Eigen::VectorXd mu;
    int iterations = 0;
    double score_max_abs = 0.0;
};

GlmFit ppml_irls(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                 const std::vector<std::vector<int>>& fe,
                 const std::vector<int>& fe_sizes, double tol, int max_iter) {
    const auto n = y.size();
    const auto k = x.cols();
    const double ybar = std::max(y.mean(), 1e-8);
    Eigen::VectorXd eta(n);
    for (Eigen::Index i = 0; i < n; ++i)
        eta(i) = std::log(0.5 * (y(i) + ybar));
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);

    GlmFit fit;
    Eigen::MatrixXd work(n, k + 1);
    bool reached_tol = false;
    int polish_left = 15;
    for (int iter = 1; iter <= max_iter + 15; ++iter) {
        const Eigen::VectorXd mu = eta.array().exp().matrix();
        const Eigen::VectorXd z =
            eta.array() + (y - mu).array() / mu.array();
        work.col(0) = z;
        work.rightCols(k) = x;
        absorb(work, fe, fe_sizes, mu);
        const Eigen::VectorXd zt = work.col(0);
        const Eigen::MatrixXd xt = work.rightCols(k);

        const Eigen::MatrixXd xtw = xt.transpose() * mu.asDiagonal();
        const Eigen::MatrixXd hess = xtw * xt;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        if (ldlt.info() != Eigen::Success)
            throw NumericalError("singular weighted design after absorption");
        const Eigen::VectorXd beta_new = ldlt.solve(xtw * zt);
        if (!beta_new.allFinite())
            throw NumericalError("PPML coefficients diverged");

        eta = z - (zt - xt * beta_new);
        const double delta = (beta_new - beta).cwiseAbs().maxCoeff();
        beta = beta_new;
        fit.iterations = iter;
        if (delta < tol) reached_tol = true;
        if (reached_tol) {
            // a few extra steps push the score to the numerical fixpoint
            if (delta >= 1e-14 && polish_left-- > 0) continue;
            if (beta.cwiseAbs().maxCoeff() > 50.0)
                throw NumericalError(
                    "regressor separation suspected: coefficient magnitude "
                    "exceeds 50");
            const Eigen::VectorXd mu_fin = eta.array().exp().matrix();
            fit.coef = beta;
            fit.mu = mu_fin;
            Eigen::MatrixXd xfin = x;
            absorb(xfin, fe, fe_sizes, mu_fin);
            const Eigen::MatrixXd xtwf = xfin.transpose() * mu_fin.asDiagonal();
            Eigen::LDLT<Eigen::MatrixXd> ldlt_fin(xtwf * xfin);
            fit.bread = ldlt_fin.solve(Eigen::MatrixXd::Identity(k, k));
            fit.score_rows =
                xfin.array().colwise() * (y - mu_fin).array();
            fit.score_max_abs =
                fit.score_rows.colwise().sum().cwiseAbs().maxCoeff();
            return fit;
        }
    }
    throw NumericalError("PPML did not converge within max_iter");
}

double poisson_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double term = y(i) > 0.0 ? y(i) * std::log(mu(i)) : 0.0;
        ll += term - mu(i) - std::lgamma(y(i) + 1.0);
    }
    return ll;
}

// Explicit indicator columns for all FE dimensions, first level of each
// dimension dropped; intercept prepended.
Eigen::MatrixXd with_dummies(const Design& design,
                             std::vector<std::string>* terms) {
    int extra = 1;
    for (std::size_t d = 0; d < design.fe.size(); ++d)
        extra += design.fe_sizes[d] - 1;
    Eigen::MatrixXd x(design.x.rows(), design.x.cols() + extra);
    x.col(0).setOnes();
    x.middleCols(1, design.x.cols()) = design.x;
    terms->clear();
    terms->push_back("const");
    terms->insert(terms->end(), design.terms.begin(), design.terms.end());
    Eigen::Index col = 1 + design.x.cols();
    for (std::size_t d = 0; d < design.fe.size(); ++d) {
        for (int g = 1; g < design.fe_sizes[d]; ++g) {
            x.col(col).setZero();
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                if (design.fe[d][i] == g) x(i, col) = 1.0;
            terms->push_back("fe" + std::to_string(d) + "_" +
                             std::to_string(g));
            ++col;
        }
    }
    return x;
}

Eigen::VectorXd se_from_cov(const Eigen::MatrixXd& cov) {
    return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

// Order-preserving removal of collinear columns (modified Gram-Schmidt with
// re-orthogonalization). Keeps earlier columns, so named regressors survive
// and redundant indicator columns are the ones dropped, e.g. industry
// dummies nested inside firm dummies.
Eigen::MatrixXd prune_collinear(const Eigen::MatrixXd& x,
                                std::vector<std::string>& terms) {
    const auto n = x.rows();
    std::vector<Eigen::VectorXd> basis;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        Eigen::VectorXd r = x.col(j);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) r -= q.dot(r) * q;
        const double scale = x.col(j).norm();
        if (r.norm() > std::max(1e-8 * scale, 1e-12)) {
            basis.push_back(r / r.norm());
            keep.push_back(j);
        }
    }
    if (keep.size() == static_cast<std::size_t>(x.cols())) return x;
    Eigen::MatrixXd reduced(n, static_cast<Eigen::Index>(keep.size()));
    std::vector<std::string> kept_terms;
    for (std::size_t c = 0; c < keep.size(); ++c) {
        reduced.col(static_cast<Eigen::Index>(c)) = x.col(keep[c]);
        kept_terms.push_back(terms[static_cast<std::size_t>(keep[c])]);
    }
    terms = std::move(kept_terms);
    return reduced;
}

void attach_inference(EstimationResult& result, const GlmFit& fit,
                      const Design& design) {
    const auto k = fit.coef.size();
    Eigen::MatrixXd cov;
    if (!design.cluster.empty()) {
        cov = cluster_covariance(fit.bread, fit.score_rows, design.cluster,
                                 design.n_clusters);
        result.n_clusters = design.n_clusters;
    } else {
        // heteroskedasticity-robust fallback when no cluster column is given
        cov = fit.bread * (fit.score_rows.transpose() * fit.score_rows) *
              fit.bread;
    }
    result.coef = fit.coef;
    result.se = se_from_cov(cov);
    result.z.resize(k);
    for (Eigen::Index j = 0; j < k; ++j)
        result.z(j) = result.se(j) > 0.0 ? fit.coef(j) / result.se(j) : 0.0;
    result.iterations = fit.iterations;
    result.score_max_abs = fit.score_max_abs;
}

EstimationResult estimate_ppml(const ColumnTable& panel,
                               const EstimationSpec& spec) {
    const bool absorbing = spec.absorb && !spec.fixed_effects.empty();
    const bool intercept = spec.fixed_effects.empty();
    Design design = build_design(panel, spec, intercept);
    if ((design.y.array() < 0.0).any())
        throw DataError("PPML outcome must be nonnegative");
    drop_boundary_groups(design, /*binary=*/false, &design.drop);

    EstimationResult result;
    result.n_input = design.n_input;
    result.dropped = design.drop;
    result.n_used = static_cast<std::size_t>(design.y.size());

    GlmFit fit;
    if (absorbing || spec.fixed_effects.empty()) {
        fit = ppml_irls(design.y, design.x, design.fe, design.fe_sizes,
                        spec.tol, spec.max_iter);
        result.terms = design.terms;
    } else {
        std::vector<std::string> terms;
        const Eigen::MatrixXd x = with_dummies(design, &terms);
        fit = ppml_irls(design.y, x, {}, {}, spec.tol, spec.max_iter);
        result.terms = terms;
    }
    attach_inference(result, fit, design);
    result.loglik = poisson_loglik(design.y, fit.mu);

    // null model on the same estimation sample
    if (spec.null_model == "fe" && !spec.fixed_effects.empty()) {
        const GlmFit null_fit =
            ppml_irls(design.y, Eigen::MatrixXd::Ones(design.y.size(), 1),
                      design.fe, design.fe_sizes, spec.tol, spec.max_iter);
        result.loglik_null = poisson_loglik(design.y, null_fit.mu);
    } else {
        const double mean = design.y.mean();
        const Eigen::VectorXd mu_null =
            Eigen::VectorXd::Constant(design.y.size(), std::max(mean, 1e-300));
        result.loglik_null = poisson_loglik(design.y, mu_null);
    }
    result.pseudo_r2 = pseudo_r2(result.loglik, result.loglik_null);
    return result;
}

EstimationResult estimate_ols(const ColumnTable& panel,
                              const EstimationSpec& spec) {
    const bool intercept = spec.fixed_effects.empty();
    Design design = build_design(panel, spec, intercept);

    EstimationResult result;
    result.n_input = design.n_input;
    result.dropped = design.drop;
    result.n_used = static_cast<std::size_t>(design.y.size());

    const auto n = design.y.size();
    const auto k = design.x.cols();
    Eigen::MatrixXd work(n, k + 1);
    work.col(0) = design.y;
    work.rightCols(k) = design.x;
    absorb(work, design.fe, design.fe_sizes, Eigen::VectorXd::Ones(n));
    const Eigen::VectorXd yt = work.col(0);
    const Eigen::MatrixXd xt = work.rightCols(k);

    Eigen::LDLT<Eigen::MatrixXd> ldlt(xt.transpose() * xt);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("collinear design after within-transformation");
    GlmFit fit;
    fit.coef = ldlt.solve(xt.transpose() * yt);
    fit.bread = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::VectorXd resid = yt - xt * fit.coef;
    fit.score_rows = xt.array().colwise() * resid.array();
    fit.score_max_abs = fit.score_rows.colwise().sum().cwiseAbs().maxCoeff();
    fit.iterations = 1;
    fit.mu = design.y - resid;

    result.terms = design.terms;
    attach_inference(result, fit, design);
    result.loglik = std::numeric_limits<double>::quiet_NaN();
    result.loglik_null = std::numeric_limits<double>::quiet_NaN();
    result.pseudo_r2 = std::numeric_limits<double>::quiet_NaN();
    return result;
}

EstimationResult estimate_logit(const ColumnTable& panel,
                                const EstimationSpec& spec) {
    Design design = build_design(panel, spec, /*want_intercept=*/false);
    for (Eigen::Index i = 0; i < design.y.size(); ++i)
        design.y(i) = design.y(i) > 0.0 ? 1.0 : 0.0;
    drop_boundary_groups(design, /*binary=*/true, &design.drop);

    EstimationResult result;
    result.n_input = design.n_input;
    result.dropped = design.drop;
    result.n_used = static_cast<std::size_t>(design.y.size());

    std::vector<std::string> terms;
    const Eigen::MatrixXd x = with_dummies(design, &terms);
    const auto n = design.y.size();
    const auto k = x.cols();

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    GlmFit fit;
    for (int iter = 1; iter <= spec.max_iter; ++iter) {
        const Eigen::VectorXd eta = x * beta;
        if (eta.cwiseAbs().maxCoeff() > 30.0)
            throw NumericalError("perfect prediction in the logit fit");
        const Eigen::VectorXd mu =
            (1.0 / (1.0 + (-eta.array()).exp())).matrix();
        const Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
        const Eigen::MatrixXd hess =
            x.transpose() * w.asDiagonal() * x +
            1e-10 * Eigen::MatrixXd::Identity(k, k);
        const Eigen::VectorXd grad = x.transpose() * (design.y - mu);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        const Eigen::VectorXd step = ldlt.solve(grad);
        beta += step;
        fit.iterations = iter;
        if (step.cwiseAbs().maxCoeff() < spec.tol) {
            fit.coef = beta;
            fit.mu = (1.0 / (1.0 + (-(x * beta).array()).exp())).matrix();
            fit.bread = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
            fit.score_rows =
                x.array().colwise() * (design.y - fit.mu).array();
            fit.score_max_abs =
                fit.score_rows.colwise().sum().cwiseAbs().maxCoeff();
            result.terms = terms;
            attach_inference(result, fit, design);
            double ll = 0.0, ll0 = 0.0;
            const double p0 = design.y.mean();
            for (Eigen::Index i = 0; i < n; ++i) {
                const double mu_i = std::clamp(fit.mu(i), 1e-12, 1.0 - 1e-12);
                ll += design.y(i) * std::log(mu_i) +
                      (1.0 - design.y(i)) * std::log(1.0 - mu_i);
                ll0 += design.y(i) * std::log(p0) +
                       (1.0 - design.y(i)) * std::log(1.0 - p0);
            }
            result.loglik = ll;
            result.loglik_null = ll0;
            result.pseudo_r2 = pseudo_r2(ll, ll0);
            return result;
        }
    }
    throw NumericalError("logit did not converge within max_iter");
}

}  // namespace

EstimationResult estimate(const ColumnTable& panel, const EstimationSpec& spec) {
    switch (spec.estimator) {
        case Estimator::Ppml:
            return estimate_ppml(panel, spec);
        case Estimator::Ols:
            return estimate_ols(panel, spec);
        case Estimator::Logit:
            return estimate_logit(panel, spec);
    }
    throw ConfigError("unknown estimator");
}

}  // namespace vilab
