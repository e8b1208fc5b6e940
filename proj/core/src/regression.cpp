#include "hsadp/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "hsadp/errors.hpp"

namespace hsadp {

namespace {

constexpr double kRidge = 1e-8;

struct Solved {
    Eigen::VectorXd beta;
    int rank = 0;
    bool ridge = false;
};

Solved solve_weighted(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
    const Eigen::VectorXd sw = w.array().sqrt();
    const Eigen::MatrixXd a = sw.asDiagonal() * z;
    const Eigen::VectorXd b = sw.cwiseProduct(y);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    Solved out;
    out.rank = static_cast<int>(qr.rank());
    if (out.rank == z.cols()) {
        out.beta = qr.solve(b);
        return out;
    }
    Eigen::MatrixXd normal = a.transpose() * a;
    for (Eigen::Index k = 1; k < normal.rows(); ++k) normal(k, k) += kRidge;
    out.beta = normal.ldlt().solve(a.transpose() * b);
    out.ridge = true;
    return out;
}

}  // namespace

LinearFit fit_linear(std::span<const double> x, int rows, int cols, std::span<const double> y,
                     std::span<const double> weights, Loss loss) {
    if (rows < 1 || cols < 1) throw InputError("regression needs at least one row and column");
    if (static_cast<int>(x.size()) != rows * cols || static_cast<int>(y.size()) != rows)
        throw InputError("design and response sizes disagree");
    if (!weights.empty() && static_cast<int>(weights.size()) != rows) throw InputError("weight count mismatch");

    Eigen::VectorXd w(rows);
    for (int r = 0; r < rows; ++r) w[r] = weights.empty() ? 1.0 / rows : weights[r];
    const double wsum = w.sum();
    if (!(wsum > 0.0)) throw InputError("weights must have positive mass");

    // standardize every non-intercept column; drop constant ones
    std::vector<int> kept;
    std::vector<double> mean(cols, 0.0), sd(cols, 1.0);
    for (int c = 1; c < cols; ++c) {
        double m = 0.0;
        for (int r = 0; r < rows; ++r) m += w[r] * x[r * cols + c];
        m /= wsum;
        double v = 0.0;
        for (int r = 0; r < rows; ++r) v += w[r] * (x[r * cols + c] - m) * (x[r * cols + c] - m);
        v /= wsum;
        mean[c] = m;
        sd[c] = std::sqrt(v);
        if (sd[c] > 1e-12 * (1.0 + std::abs(m))) kept.push_back(c);
    }
    const int k = static_cast<int>(kept.size()) + 1;
    Eigen::MatrixXd z(rows, k);
    for (int r = 0; r < rows; ++r) {
        z(r, 0) = 1.0;
        for (int j = 1; j < k; ++j) {
            const int c = kept[j - 1];
            z(r, j) = (x[r * cols + c] - mean[c]) / sd[c];
        }
    }
    const Eigen::VectorXd yy = Eigen::Map<const Eigen::VectorXd>(y.data(), rows);

    Solved s = solve_weighted(z, yy, w);
    if (loss == Loss::Absolute) {
        const double scale = std::max(1e-12, (yy.array() - yy.mean()).abs().mean());
        for (int iter = 0; iter < 100; ++iter) {
            const Eigen::VectorXd resid = (yy - z * s.beta).cwiseAbs();
            Eigen::VectorXd wl(rows);
            for (int r = 0; r < rows; ++r) wl[r] = w[r] / std::max(resid[r], 1e-9 * scale);
            Solved next = solve_weighted(z, yy, wl);
            const double change = (next.beta - s.beta).norm();
            s = std::move(next);
            if (change <= 1e-12 * (1.0 + s.beta.norm())) break;
        }
    }

    LinearFit out;
    out.rank = s.rank;
    out.ridge = s.ridge;
    out.theta.assign(cols, 0.0);
    double intercept = s.beta[0];
    for (int j = 1; j < k; ++j) {
        const int c = kept[j - 1];
        out.theta[c] = s.beta[j] / sd[c];
        intercept -= s.beta[j] * mean[c] / sd[c];
    }
    out.theta[0] = intercept;
    return out;
}

}  // namespace hsadp
