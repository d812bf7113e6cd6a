#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vilab/panel.hpp"

namespace vilab {

enum class Estimator { Ppml, Ols, Logit };

struct EstimationSpec {
    std::string outcome;
    std::vector<std::string> regressors;
    std::vector<std::string> fixed_effects;  // column names; may be empty
    std::string cluster;                     // empty: heteroskedasticity-robust
    Estimator estimator = Estimator::Ppml;
    double tol = 1e-8;       // max absolute coefficient change
    int max_iter = 100;
    // Absorb fixed effects by iterated weighted demeaning (default). When
    // false, fixed effects enter as explicit indicator columns; only sensible
    // at desk scale, kept as a cross-validation path.
    bool absorb = true;
    // Null model for the pseudo R^2: intercept-only by default, fixed-effects
    // only when set to "fe".
    std::string null_model = "intercept";
};

struct DropReport {
    std::size_t missing = 0;     // rows with missing values in used columns
    std::size_t separation = 0;  // rows in all-zero (or all-one) outcome groups
    int iterations = 0;          // passes of the group-drop fixpoint

    std::size_t total() const { return missing + separation; }
};

struct EstimationResult {
    std::vector<std::string> terms;
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::VectorXd z;
    double loglik = 0.0;
    double loglik_null = 0.0;
    double pseudo_r2 = 0.0;
    std::size_t n_input = 0;
    std::size_t n_used = 0;
    DropReport dropped;
    int iterations = 0;
    int n_clusters = 0;
    double score_max_abs = 0.0;  // max |sum (y - mu) x~| at convergence

    int term_index(const std::string& name) const;
};

EstimationResult estimate(const ColumnTable& panel, const EstimationSpec& spec);

// Cluster-robust sandwich: bread * (G/(G-1) * sum_g S_g S_g') * bread, where
// S_g stacks the per-cluster sums of the score rows and bread is the inverse
// expected Hessian. With every row its own cluster this reduces to the
// heteroskedasticity-robust covariance scaled by n/(n-1).
Eigen::MatrixXd cluster_covariance(const Eigen::MatrixXd& bread,
                                   const Eigen::MatrixXd& score_rows,
                                   const std::vector<int>& cluster_ids,
                                   int n_clusters);

// 1 - loglik_model / loglik_null. Throws NumericalError when the null
// likelihood is degenerate.
double pseudo_r2(double loglik_model, double loglik_null);

}  // namespace vilab
