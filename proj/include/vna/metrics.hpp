#pragma once

#include "vna/states.hpp"

// Fidelity, generalized fidelity, purified distance and norm distance on
// (sub)normalized states. The representation supremum in the fidelity
// definition is evaluated through the closed Uhlmann form per block.

namespace vna::metrics {

using linalg::CMatrix;
using states::State;

/// Tr sqrt(sqrt(a) b sqrt(a)) for PSD matrices; the root fidelity.
double root_fidelity(const CMatrix& a, const CMatrix& b, double tol = 1e-9);

/// F(omega, sigma) = (sum_k root_fidelity(rho_k, tau_k))^2.
double fidelity(const State& omega, const State& sigma);

/// F_hat = (sqrt(F) + sqrt((1 - omega(1))(1 - sigma(1))))^2, clamped weights.
double generalized_fidelity(const State& omega, const State& sigma);

/// P = sqrt(1 - F_hat), clamped to [0, 1].
double purified_distance(const State& omega, const State& sigma);

/// sum_k || rho_k - tau_k ||_1.
double norm_distance(const State& omega, const State& sigma);

double fidelity(const states::CqState& omega, const states::CqState& sigma);
double generalized_fidelity(const states::CqState& omega, const states::CqState& sigma);
double purified_distance(const states::CqState& omega, const states::CqState& sigma);
double norm_distance(const states::CqState& omega, const states::CqState& sigma);

}  // namespace vna::metrics
