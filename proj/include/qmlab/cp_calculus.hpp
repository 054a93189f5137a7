#pragma once

#include "qmlab/maps.hpp"
#include "qmlab/report.hpp"

namespace qmlab {

// F_T(A, B) = T(A^dagger B) - T(A)^dagger T(B).
Element cs_form(const CPMap& t, const Element& a, const Element& b);

// Square root of a PSD element by spectral calculus. Eigenvalues down to
// -clip are clipped to zero; anything more negative is a DomainError.
Element psd_sqrt(const Element& p, double clip = 1e-9);

// ||B||_T = ||sqrt(F_T(B, B))||.
double t_norm(const CPMap& t, const Element& b);

// The state rho viewed as a unital CP map into the one-dimensional algebra.
CPMap state_functional(const State& rho);

// slack = min eigenvalue of ||F(B,B)|| F(A,A) - F(A,B) F(B,A),
// scale = ||A||^2 ||B||^2. Also requires F(B,B) >= -1e-9 ||B||^2.
BoundReport check_cs_inequality(const CPMap& t, const Element& a, const Element& b);

// cov(A,B)^2 <= var(A) var(B).
BoundReport covariance_inequality_check(const State& rho, const Element& a, const Element& b);
// |rho([A,B]/2i)|^2 <= var(A) var(B).
BoundReport heisenberg_uncertainty_check(const State& rho, const Element& a, const Element& b);

// ||F_T(A,B)|| <= ||A|| ||B||_T; when ||B||_T vanishes also F(A,B) = F(B,A) = 0.
BoundReport almost_multiplication_bound(const CPMap& t, const Element& a, const Element& b);

}  // namespace qmlab
