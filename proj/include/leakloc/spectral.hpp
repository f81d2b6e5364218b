#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "leakloc/bisection.hpp"
#include "leakloc/network.hpp"

namespace leakloc {

/// How edge costs enter the relaxation's incidence matrix: entries of +/-w
/// (so cuts are weighted by w^2) or +/-sqrt(w) (weighted by w).
enum class WeightRule { Literal, SqrtWeights };

enum class Rounding { PureSign, SizeConstrained, ZeroCostComponents };

std::string_view to_string(Rounding rounding);

struct SpectralOptions {
  WeightRule rule = WeightRule::Literal;
  std::size_t dense_limit = 512;   // dense eigendecomposition up to this n
  double tolerance = 1e-10;        // iterative: residual relative to lambda_max
  std::size_t max_iterations = 0;  // iterative operator applications; 0 means 10 n
};

struct FiedlerPair {
  double lambda2 = 0.0;
  Eigen::VectorXd vector;   // unit norm, orthogonal to 1, first nonzero entry positive
  double lambda_max = 0.0;  // largest eigenvalue, or an upper bound on it (iterative path)
  double residual = 0.0;    // ||L u - lambda2 u||
};

/// Second-smallest eigenpair of the Laplacian built from `column_scale`
/// (one entry per edge). Throws DisconnectedInput when lambda2 vanishes.
FiedlerPair fiedler_vector(const Network& net, std::span<const double> column_scale,
                           const SpectralOptions& options = {});
/// Unit-weight Laplacian.
FiedlerPair fiedler_vector(const Network& net, const SpectralOptions& options = {});

struct SpectralSolution {
  Eigen::VectorXd fiedler;
  double lambda2 = 0.0;
  Partition partition;
  Rounding rounding = Rounding::PureSign;
};

/// Sign rounding of the Fiedler vector, falling back to a sorted threshold
/// when a side would fall below the window. When zero-weight edges already
/// disconnect the network the split is made along components at no cost.
SpectralSolution spectral_bisect(const BisectionProblem& problem, const SpectralOptions& options = {});

}  // namespace leakloc
