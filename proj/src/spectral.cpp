#include "leakloc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/SparseCholesky>

#include "leakloc/error.hpp"
#include "leakloc/matrices.hpp"

namespace leakloc {

std::string_view to_string(Rounding rounding) {
  switch (rounding) {
    case Rounding::PureSign: return "pure-sign";
    case Rounding::SizeConstrained: return "size-constrained";
    case Rounding::ZeroCostComponents: return "zero-cost-components";
  }
  return "pure-sign";
}

namespace {

void project_out_ones(Eigen::VectorXd& v) { v.array() -= v.mean(); }

void normalize_sign(Eigen::VectorXd& u) {
  const double scale = u.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) > 1e-10 * scale) {
      if (u(i) < 0.0) u = -u;
      return;
    }
  }
}

bool positive_weight_connected(const Network& net, std::span<const double> scale) {
  std::vector<bool> mask(net.m());
  for (std::size_t k = 0; k < net.m(); ++k) mask[k] = scale[k] != 0.0;
  const auto label = component_labels(net, mask);
  return std::all_of(label.begin(), label.end(), [](std::size_t l) { return l == 0; });
}

FiedlerPair dense_fiedler(const RealSparse& lap) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(lap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) throw Error("dense eigendecomposition failed");
  FiedlerPair out;
  const auto& evals = solver.eigenvalues();
  out.lambda_max = evals(evals.size() - 1);
  out.lambda2 = evals(1);
  out.vector = solver.eigenvectors().col(1);
  return out;
}

// Lanczos on the pseudo-inverse of L restricted to the complement of 1. The
// pseudo-inverse is applied through a factorization of L with its last row
// and column removed, which is positive definite for a connected graph.
FiedlerPair iterative_fiedler(const RealSparse& lap, const SpectralOptions& options) {
  const Eigen::Index n = lap.rows();
  const RealSparse grounded = lap.topLeftCorner(n - 1, n - 1);
  Eigen::SimplicialLDLT<RealSparse> factor(grounded);
  if (factor.info() != Eigen::Success) throw DisconnectedInput("grounded Laplacian is singular");

  double gershgorin = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) gershgorin = std::max(gershgorin, 2.0 * lap.coeff(c, c));

  auto apply_pinv = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    y.head(n - 1) = factor.solve(x.head(n - 1));
    project_out_ones(y);
    return y;
  };

  const std::size_t budget = options.max_iterations ? options.max_iterations : 10 * static_cast<std::size_t>(n);
  const Eigen::Index krylov = std::min<Eigen::Index>(n - 1, 200);

  std::mt19937_64 rng(0x5eed);
  Eigen::VectorXd start(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;

  std::size_t applied = 0;
  FiedlerPair best;
  best.lambda_max = gershgorin;
  best.residual = std::numeric_limits<double>::infinity();
  while (true) {
    project_out_ones(start);
    start.normalize();
    Eigen::MatrixXd basis(n, krylov);
    std::vector<double> alpha, beta;
    basis.col(0) = start;
    Eigen::Index dim = 0;
    for (Eigen::Index k = 0; k < krylov; ++k) {
      Eigen::VectorXd w = apply_pinv(basis.col(k));
      ++applied;
      const double a = basis.col(k).dot(w);
      alpha.push_back(a);
      // Full reorthogonalization, twice for stability.
      for (int pass = 0; pass < 2; ++pass) {
        w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
        project_out_ones(w);
      }
      dim = k + 1;
      const double b = w.norm();
      if (k + 1 == krylov || b < 1e-14 || applied >= budget) break;
      beta.push_back(b);
      basis.col(k + 1) = w / b;
    }
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      tri(k, k) = alpha[static_cast<std::size_t>(k)];
      if (k + 1 < dim) tri(k, k + 1) = tri(k + 1, k) = beta[static_cast<std::size_t>(k)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(tri);
    Eigen::VectorXd u = basis.leftCols(dim) * ritz.eigenvectors().col(dim - 1);
    project_out_ones(u);
    u.normalize();
    const double lambda = (lap * u).dot(u);
    const double residual = (lap * u - lambda * u).norm();
    if (residual < best.residual) {
      best.lambda2 = lambda;
      best.vector = u;
      best.residual = residual;
    }
    if (residual <= options.tolerance * std::max(gershgorin, 1.0) || applied >= budget) break;
    start = u;
  }
  return best;
}

}  // namespace

FiedlerPair fiedler_vector(const Network& net, std::span<const double> column_scale,
                           const SpectralOptions& options) {
  if (net.n() < 2) throw std::invalid_argument("fiedler vector needs n >= 2");
  if (!positive_weight_connected(net, column_scale))
    throw DisconnectedInput("fiedler vector: network is disconnected");

  const RealSparse lap = weighted_incidence_laplacian(net, column_scale);
  FiedlerPair out = net.n() <= options.dense_limit ? dense_fiedler(lap) : iterative_fiedler(lap, options);
  if (out.lambda2 <= 1e-8 * std::max(out.lambda_max, 1.0))
    throw DisconnectedInput("fiedler vector: second eigenvalue is zero");
  project_out_ones(out.vector);
  out.vector.normalize();
  normalize_sign(out.vector);
  out.residual = (lap * out.vector - out.lambda2 * out.vector).norm();
  return out;
}

FiedlerPair fiedler_vector(const Network& net, const SpectralOptions& options) {
  const std::vector<double> ones(net.m(), 1.0);
  return fiedler_vector(net, ones, options);
}

SpectralSolution spectral_bisect(const BisectionProblem& problem, const SpectralOptions& options) {
  const Network& net = *problem.net;
  const std::size_t n = net.n();
  if (n < 2) throw std::invalid_argument("spectral bisection needs n >= 2");
  if (connected_components(net).size() > 1) throw DisconnectedInput("spectral bisection: network is disconnected");

  std::vector<double> scale(problem.weights);
  if (options.rule == WeightRule::SqrtWeights)
    for (double& s : scale) s = std::sqrt(s);

  SpectralSolution out;
  const SizeWindow window = problem.window();
  if (!positive_weight_connected(net, scale)) {
    out.partition = group_components(net, problem.weights, window);
    out.rounding = Rounding::ZeroCostComponents;
    return out;
  }

  const FiedlerPair pair = fiedler_vector(net, scale, options);
  out.fiedler = pair.vector;
  out.lambda2 = pair.lambda2;

  const Eigen::VectorXd& u = pair.vector;
  const double zero = 1e-12;
  std::size_t positive = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (u(i) > zero) ++positive;

  const std::size_t lo = window.min;
  const std::size_t hi = n - window.min;
  const std::size_t k = std::clamp(positive, lo, hi);
  out.rounding = k == positive ? Rounding::PureSign : Rounding::SizeConstrained;

  // Sorted threshold: the k largest entries form the +1 side, so any sign
  // mismatch falls on the entries of least magnitude.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double ua = u(static_cast<Eigen::Index>(a)), ub = u(static_cast<Eigen::Index>(b));
    if (std::abs(ua) <= zero) ua = 0.0;
    if (std::abs(ub) <= zero) ub = 0.0;
    return ua > ub;
  });
  std::vector<std::uint8_t> x(n, 0);
  for (std::size_t r = 0; r < k; ++r) x[order[r]] = 1;
  out.partition = make_partition(net, problem.weights, x);
  return out;
}

}  // namespace leakloc
