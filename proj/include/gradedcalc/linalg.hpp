#pragma once

// Exact linear algebra over Q and over polynomial rings with unit determinant.

#include "gradedcalc/poly.hpp"

#include <vector>

namespace gradedcalc {

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;
using PolyVec = std::vector<Polynomial>;
using PolyMat = std::vector<PolyVec>;

/// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(RatMat& m);
std::size_t rank(RatMat m);
/// Basis (in echelon form) of the row span.
RatMat row_space(RatMat m);
bool in_span(const RatMat& basis, const RatVec& v);

/// Inverse of a square polynomial matrix whose determinant is a nonzero
/// constant; throws std::domain_error otherwise.
PolyMat inverse_unimodular(const PolyMat& m);
PolyVec mat_vec(const PolyMat& m, const PolyVec& v);

}  // namespace gradedcalc
