#pragma once

#include "unplab/adversary.hpp"
#include "unplab/qcore.hpp"

namespace unplab {

double trace_distance(const DensityOperator& a, const DensityOperator& b);
// (tr sqrt(sqrt(a) b sqrt(a)))^2, computed as || sqrt(a) sqrt(b) ||_1^2.
double fidelity(const DensityOperator& a, const DensityOperator& b);
double generalized_fidelity(const DensityOperator& a, const DensityOperator& b);
double purified_distance(const DensityOperator& a, const DensityOperator& b);

// Matrix-level forms shared by the cq variants and the protocol engine.
double trace_distance(const Matrix& a, const Matrix& b);
double root_fidelity(const Matrix& a, const Matrix& b);
double generalized_fidelity(const Matrix& a, const Matrix& b);
double purified_distance(const Matrix& a, const Matrix& b);

// Block-diagonal (cq) forms; alphabets are padded with zero blocks.
double trace_distance(const CqState& a, const CqState& b);
double generalized_fidelity(const CqState& a, const CqState& b);
double purified_distance(const CqState& a, const CqState& b);

struct DistanceInterval {
  double lower = 0.0;  // best family advantage
  double upper = 0.0;  // trace distance
  std::string witness; // name of the maximizing strategy
};

DistanceInterval computational_distance(const DensityOperator& a, const DensityOperator& b,
                                        const AdversaryFamily& family);

struct OrderCheck {
  bool holds = false;
  double min_eigenvalue = 0.0;  // of b - a
};

// a <= b in the PSD order, up to -tolerance on the smallest eigenvalue of b - a.
OrderCheck operator_leq(const Matrix& a, const Matrix& b, double tolerance);

}  // namespace unplab
