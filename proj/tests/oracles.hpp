#pragma once

// Reference computations that share no code path with the library: plain
// Taylor series, composite Simpson quadrature, truncated Lyapunov series and
// dense brute-force spectral evaluation. Only used by tests.

#include "tslift/model.hpp"

#include <cmath>
#include <random>

namespace oracle {

using tslift::Matrix;

/// e^{F t} by Taylor series in long double, stopping when the term norm
/// falls below 1e-30 relative.
inline Matrix taylor_expm(const Matrix& f, double t) {
    using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const LMatrix ft = f.cast<long double>() * static_cast<long double>(t);
    LMatrix sum = LMatrix::Identity(f.rows(), f.cols());
    LMatrix term = sum;
    for (int k = 1; k < 500; ++k) {
        term = (term * ft) / static_cast<long double>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() <= 1e-30L * sum.cwiseAbs().maxCoeff()) break;
    }
    return sum.cast<double>();
}

/// int_0^h e^{F s} G G' e^{F' s} ds by composite Simpson with `intervals` (even) panels.
inline Matrix simpson_gramian(const Matrix& f, const Matrix& g, double h, int intervals = 4000) {
    const Matrix gg = g * g.transpose();
    const double dt = h / intervals;
    Matrix acc = Matrix::Zero(f.rows(), f.rows());
    for (int i = 0; i <= intervals; ++i) {
        const Matrix e = taylor_expm(f, i * dt);
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * e * gg * e.transpose();
    }
    return acc * (dt / 3.0);
}

/// sum_k A^k W A'^k, truncated once terms are negligible.
inline Matrix series_dlyap(const Matrix& a, const Matrix& w) {
    Matrix sum = Matrix::Zero(a.rows(), a.cols());
    Matrix term = w;
    for (int k = 0; k < 200000; ++k) {
        sum += term;
        term = a * term * a.transpose();
        if (term.cwiseAbs().maxCoeff() <= 1e-18 * sum.cwiseAbs().maxCoeff()) break;
    }
    return sum;
}

/// Psi(e^{i theta}) evaluated from scratch with an explicit inverse.
inline tslift::CMatrix dt_density(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d, double theta) {
    using tslift::CMatrix;
    using tslift::Complex;
    const Complex z = std::polar(1.0, theta);
    CMatrix res = z * CMatrix::Identity(a.rows(), a.cols()) - a.cast<Complex>();
    const CMatrix w = c.cast<Complex>() * res.inverse() * b.cast<Complex>() + d.cast<Complex>();
    return w * w.adjoint();
}

// ------------------------------------------------------------- generators

inline Matrix randn(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> nd;
    Matrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j) {
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = nd(rng);
    }
    return m;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Hurwitz matrix with spectral abscissa in [-1, -0.3] and moderate
/// imaginary parts (|Im| < ~1.5).
inline Matrix random_stable_ct(std::mt19937_64& rng, Eigen::Index n) {
    const Matrix x = randn(rng, n, n) / std::sqrt(static_cast<double>(n));
    Eigen::EigenSolver<Matrix> es(x, false);
    double abscissa = -1e300;
    for (const auto& l : es.eigenvalues()) abscissa = std::max(abscissa, l.real());
    return x - (abscissa + uniform(rng, 0.3, 1.0)) * Matrix::Identity(n, n);
}

inline double max_imag(const Matrix& f) {
    Eigen::EigenSolver<Matrix> es(f, false);
    double out = 0.0;
    for (const auto& l : es.eigenvalues()) out = std::max(out, std::abs(l.imag()));
    return out;
}

/// Valid continuous model (stable, controllable, observable, rank HG = m).
/// Needs m <= n and m <= p, otherwise no draw can pass validation.
inline tslift::CtModel random_ct(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p) {
    for (;;) {
        tslift::CtModel model{random_stable_ct(rng, n), randn(rng, n, m), randn(rng, p, n)};
        if (tslift::validate_ct(model).empty()) return model;
    }
}

}  // namespace oracle
