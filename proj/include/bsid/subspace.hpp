#pragma once

// Classical subspace identification: Hankel data blocks, the least-squares
// estimate of [H_fp H_f], weighted SVD truncation, the horizon and weighting
// rules, and recovery of (A, B, C, D, K) from Gamma_f and L_p.

#include <vector>

#include "bsid/structops.hpp"
#include "bsid/sysmodel.hpp"

namespace bsid {

// Future horizon f (= i), past horizon p, width j = T - f - p + 1.
// Column n of Y_f starts at sample p + n; column n of U_p at sample n.
struct HankelDataset {
  Matrix yf, uf, up, yp, zp;
  Index f = 0;
  Index p = 0;
  Index j = 0;
  Index ni = 0;
  Index no = 0;
  TimeSeries source;
};

HankelDataset assemble(const TimeSeries& data, Index f, Index p);

struct LsEstimate {
  Matrix hfp;  // f*no x p*(ni+no)
  Matrix hf;   // f*no x f*ni
  Index regressor_rank = 0;
  bool rank_deficient = false;
};

// [H_fp H_f] = Y_f [U_p; Y_p; U_f]^+ (minimum norm when rank deficient).
LsEstimate ls_markov(const HankelDataset& ds);

// Left weight W1 (nonsingular, f*no square) and right weight W2 (applied on
// the right of H_fp, so it has p*(ni+no) rows). w2_pinv caches W2^+.
struct WeightPair {
  Matrix w1;
  Matrix w2;
  Matrix w2_pinv;
};

WeightPair make_weights(Matrix w1, Matrix w2);

// W1 = I_f (x) diag(Sigma_y)^{-1/2}, W2 = Z_p.
WeightPair default_weights(const HankelDataset& ds, const Matrix& sigma_y);

// Identity weights of the right sizes.
WeightPair identity_weights(const HankelDataset& ds);

// W1^{-1} U_r S_r V_r^T W2^+ from the SVD of W1 H_fp W2.
Matrix weighted_truncate(const Matrix& hfp, const WeightPair& weights, Index rank);

struct RowLength {
  Index rows = 0;
  bool clamped = false;
};

// i = min{15, floor(N / (10 (no + ni)))}, clamped to at least 2.
RowLength row_length(Index n, Index no, Index ni);

// Largest r with sigma_r / sigma_1 > threshold (0 for an all-zero profile).
Index select_rank(const Vector& singular_values, double threshold = 1e-3);

// Model from Gamma_f (f*no x nx), L_p (nx x p*(ni+no)) and the training data.
// C is the first block row of Gamma_f, A solves the shift equation, B-KD and K
// are the last block columns of the two halves of L_p, D comes from a
// secondary least-squares fit of the predictor residual on u.
StateSpaceModel recover_system(const Matrix& gamma, const Matrix& lp, const Matrix& hf, const HankelDataset& ds,
                               Index nx);

// Factor W1 H_fp W2 at rank nx (Gamma = W1^{-1} U S^{1/2}, L_p = S^{1/2} V^T W2^+)
// and call recover_system.
StateSpaceModel recover_from_markov(const Matrix& hfp, const Matrix& hf, const HankelDataset& ds,
                                    const WeightPair& weights, Index nx);

}  // namespace bsid
