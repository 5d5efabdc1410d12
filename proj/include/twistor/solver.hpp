#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "model.hpp"

namespace twistor {

/// Analysis tolerances. Each threshold sits about two orders of magnitude
/// away from its neighbours.
struct Tolerances {
    double membership = 1e-9;  // relative: |residual| <= tol * (1 + |p|^2)
    double rank = kRankRelTol; // singular value cutoff relative to sigma_max
    double newton = 1e-12;     // residual for Newton convergence
    int newtonMaxIter = 50;
    double dedup = 1e-6;       // radius for merging solutions
};

/// Real system plus affine-linear constraints L x = c (incidence conditions,
/// continuation hyperplanes).
struct AugmentedSystem {
    const RealEquationSystem* base = nullptr;
    Eigen::MatrixXd linear;
    Eigen::VectorXd rhs;

    int nvars() const { return base->nvars(); }
    int rows() const { return base->size() + static_cast<int>(linear.rows()); }

    void addLinear(const Eigen::MatrixXd& L, const Eigen::VectorXd& c) {
        Eigen::MatrixXd L2(linear.rows() + L.rows(), base->nvars());
        Eigen::VectorXd c2(rhs.size() + c.size());
        if (linear.rows() > 0) {
            L2.topRows(linear.rows()) = linear;
            c2.head(rhs.size()) = rhs;
        }
        L2.bottomRows(L.rows()) = L;
        c2.tail(c.size()) = c;
        linear = std::move(L2);
        rhs = std::move(c2);
    }

    Eigen::VectorXd residuals(const std::vector<double>& x) const {
        Eigen::VectorXd r(rows());
        r.head(base->size()) = base->residuals(x);
        if (linear.rows() > 0) {
            Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
            r.tail(linear.rows()) = linear * xv - rhs;
        }
        return r;
    }
    Eigen::MatrixXd jacobian(const std::vector<double>& x) const {
        Eigen::MatrixXd J(rows(), nvars());
        J.topRows(base->size()) = base->jacobian(x);
        if (linear.rows() > 0) J.bottomRows(linear.rows()) = linear;
        return J;
    }
};

struct NewtonResult {
    std::vector<double> x;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

inline double scaleOf(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return std::max(1.0, s * s);
}

/// Gauss-Newton with minimum-norm steps; works for square, over- and
/// under-determined systems (the latter converge to a nearby solution).
template <class Sys>
NewtonResult gaussNewton(const Sys& sys, std::vector<double> x, const Tolerances& tol) {
    NewtonResult res;
    for (int it = 0; it <= tol.newtonMaxIter; ++it) {
        Eigen::VectorXd F = sys.residuals(x);
        res.residual = F.size() ? F.cwiseAbs().maxCoeff() : 0.0;
        res.iterations = it;
        if (res.residual <= tol.newton * scaleOf(x)) {
            res.converged = true;
            break;
        }
        if (it == tol.newtonMaxIter) break;
        Eigen::MatrixXd J = sys.jacobian(x);
        Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(F);
        if (!step.allFinite()) break;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step(static_cast<Eigen::Index>(i));
    }
    res.x = std::move(x);
    return res;
}

inline double distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// Adds x to the list unless a point within radius * (1 + |x|) is present.
inline bool insertDistinct(std::vector<std::vector<double>>& pts, const std::vector<double>& x, double radius) {
    double nx = 0.0;
    for (double v : x) nx += v * v;
    const double r = radius * (1.0 + std::sqrt(nx));
    for (const auto& p : pts)
        if (distance(p, x) <= r) return false;
    pts.push_back(x);
    return true;
}

} // namespace twistor
