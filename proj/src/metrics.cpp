#include "vna/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace vna::metrics {

namespace {

void check_same_algebra(const State& a, const State& b) {
    if (a.algebra().num_blocks() != b.algebra().num_blocks())
        throw states::AlgebraMismatch("metrics: block count mismatch");
    for (int k = 0; k < a.algebra().num_blocks(); ++k)
        if (a.algebra().block(k).dim != b.algebra().block(k).dim)
            throw states::AlgebraMismatch("metrics: block dim mismatch");
}

}  // namespace

double root_fidelity(const CMatrix& a, const CMatrix& b, double tol) {
    CMatrix sa = linalg::psd_sqrt(a, tol);
    CMatrix inner = sa * b * sa;
    // Hermitize against rounding before the second root.
    CMatrix herm = inner;
    for (int i = 0; i < herm.rows(); ++i)
        for (int j = 0; j < herm.cols(); ++j)
            herm(i, j) = 0.5 * (inner(i, j) + std::conj(inner(j, i)));
    CMatrix root = linalg::psd_sqrt(herm, std::max(tol, 1e-8));
    return root.trace().real();
}

double fidelity(const State& omega, const State& sigma) {
    check_same_algebra(omega, sigma);
    double rf = 0;
    for (int k = 0; k < omega.algebra().num_blocks(); ++k)
        rf += root_fidelity(omega.density(k), sigma.density(k));
    return rf * rf;
}

double generalized_fidelity(const State& omega, const State& sigma) {
    check_same_algebra(omega, sigma);
    double rf = 0;
    for (int k = 0; k < omega.algebra().num_blocks(); ++k)
        rf += root_fidelity(omega.density(k), sigma.density(k));
    double a = std::max(0.0, 1.0 - omega.weight());
    double b = std::max(0.0, 1.0 - sigma.weight());
    double r = rf + std::sqrt(a * b);
    return r * r;
}

double purified_distance(const State& omega, const State& sigma) {
    double f = generalized_fidelity(omega, sigma);
    return std::sqrt(std::max(0.0, 1.0 - std::min(1.0, f)));
}

double norm_distance(const State& omega, const State& sigma) {
    check_same_algebra(omega, sigma);
    double s = 0;
    for (int k = 0; k < omega.algebra().num_blocks(); ++k)
        s += linalg::trace_norm(omega.density(k) - sigma.density(k));
    return s;
}

double fidelity(const states::CqState& omega, const states::CqState& sigma) {
    return fidelity(omega.assemble(), sigma.assemble());
}
double generalized_fidelity(const states::CqState& omega, const states::CqState& sigma) {
    return generalized_fidelity(omega.assemble(), sigma.assemble());
}
double purified_distance(const states::CqState& omega, const states::CqState& sigma) {
    return purified_distance(omega.assemble(), sigma.assemble());
}
double norm_distance(const states::CqState& omega, const states::CqState& sigma) {
    return norm_distance(omega.assemble(), sigma.assemble());
}

}  // namespace vna::metrics
