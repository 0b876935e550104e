#include "lagsync/topology.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lagsync {

namespace {

constexpr double kRelTol = 1e-9;

void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

}  // namespace

Gains Gains::uniform(int n, double k1, double k2, double lambda) {
  Gains g;
  g.k1 = Vec::Constant(n, k1);
  g.k2 = Vec::Constant(n, k2);
  g.lambda = Vec::Constant(n, lambda);
  return g;
}

void Gains::validate(int n) const {
  require(k1.size() == n && k2.size() == n && lambda.size() == n,
          "Gains: K1/K2/Lambda must have one entry per joint");
  require((k1.array() > 0.0).all(), "Gains: K1 must be positive definite");
  require((lambda.array() >= 0.0).all(), "Gains: Lambda must be nonnegative");
  if (has_gamma()) {
    require(gamma.rows() == gamma.cols(), "Gains: Gamma must be square");
    require(gamma.isApprox(gamma.transpose(), 1e-12),
            "Gains: Gamma must be symmetric");
    Eigen::LLT<Mat> llt(gamma);
    require(llt.info() == Eigen::Success,
            "Gains: Gamma must be positive definite");
  }
  if (has_inhibition()) {
    require(k_inhib.size() == n,
            "Gains: K_inhib must have one entry per joint");
    require((k_inhib.array() > 0.0).all(),
            "Gains: K_inhib must be positive definite");
  }
}

int CouplingGraph::in_degree() const {
  return in_edges.empty() ? 0 : static_cast<int>(in_edges.front().size());
}

bool CouplingGraph::is_inline_endpoint(int i) const {
  return kind == GraphKind::Inline && (i == 0 || i == p - 1);
}

CouplingGraph build_graph(GraphKind kind, int p, const GraphOptions& options) {
  require(p >= 2, "build_graph: p must be at least 2");
  CouplingGraph g;
  g.kind = kind;
  g.p = p;
  g.in_edges.assign(p, {});
  g.self_coupling.assign(p, 0.0);
  g.directed = options.directed;

  switch (kind) {
    case GraphKind::Ring:
      if (p == 2) {
        // Two-robot network: one bidirectional link, coupling K2*s_j,
        // so D1 = K1 - K2 as in the two-robot spectral fixture.
        g.in_edges[0] = {{1, 1.0}};
        g.in_edges[1] = {{0, 1.0}};
      } else {
        for (int i = 0; i < p; ++i) {
          g.in_edges[i] = {{(i + p - 1) % p, 1.0}, {(i + 1) % p, 1.0}};
        }
      }
      g.directed = false;
      break;
    case GraphKind::Inline:
      for (int i = 0; i < p; ++i) {
        if (i > 0) g.in_edges[i].push_back({i - 1, 1.0});
        if (i < p - 1) g.in_edges[i].push_back({i + 1, 1.0});
      }
      // Endpoints connect the K2 gain back to themselves, keeping the row
      // block sum at K1 - 2K2.
      g.self_coupling[0] = 1.0;
      g.self_coupling[p - 1] = 1.0;
      g.directed = false;
      break;
    case GraphKind::RegularDigraph:
    case GraphKind::CustomRegular: {
      require(static_cast<int>(options.edges.size()) == p,
              "build_graph: explicit graphs need one in-neighbor list per "
              "member");
      const int m = static_cast<int>(options.edges.front().size());
      require(m >= 1, "build_graph: members need at least one in-neighbor");
      for (int i = 0; i < p; ++i) {
        require(static_cast<int>(options.edges[i].size()) == m,
                "build_graph: non-regular graph rejected (member " +
                    std::to_string(i) + " has in-degree " +
                    std::to_string(options.edges[i].size()) +
                    ", expected " + std::to_string(m) +
                    "); wrap non-regular structures in a concurrent "
                    "hierarchy instead");
        for (int j : options.edges[i]) {
          require(j >= 0 && j < p && j != i,
                  "build_graph: edge index out of range");
          g.in_edges[i].push_back({j, 2.0 / m});
        }
      }
      break;
    }
  }

  if (options.partial_mask.size() > 0) {
    require((options.partial_mask.array() == 0.0 ||
             options.partial_mask.array() == 1.0)
                .all(),
            "build_graph: partial selector entries must be 0 or 1");
    g.partial_mask = options.partial_mask;
  }
  if (options.inhibitory_link) {
    auto [a, b] = *options.inhibitory_link;
    require(a >= 0 && a < p && b >= 0 && b < p && a != b,
            "build_graph: inhibitory link indices out of range");
    g.inhibitory_link = options.inhibitory_link;
  }
  return g;
}

ModifiedLaplacian modified_laplacian(const CouplingGraph& graph,
                                     const Gains& gains, int n) {
  gains.validate(n);
  require(graph.p >= 2, "modified_laplacian: invalid graph");
  if (graph.partial_mask.size() > 0) {
    require(graph.partial_mask.size() == n,
            "modified_laplacian: partial selector length mismatch");
  }

  const int p = graph.p;
  const Vec mask = graph.partial_mask.size() > 0 ? graph.partial_mask
                                                 : Vec::Ones(n);
  const Vec k2_masked = gains.k2.cwiseProduct(mask);

  ModifiedLaplacian out;
  out.p = p;
  out.n = n;
  out.L = Mat::Zero(p * n, p * n);
  out.U = Mat::Zero(p * n, p * n);

  for (int i = 0; i < p; ++i) {
    out.L.block(i * n, i * n, n, n) =
        Mat((gains.k1 - graph.self_coupling[i] * k2_masked).asDiagonal());
    for (const auto& e : graph.in_edges[i]) {
      out.L.block(i * n, e.from * n, n, n) -=
          Mat((e.weight * k2_masked).asDiagonal());
    }
    for (int j = 0; j < p; ++j) {
      out.U.block(i * n, j * n, n, n) = Mat(gains.k2.asDiagonal());
    }
  }

  if (graph.inhibitory_link && gains.has_inhibition()) {
    auto [a, b] = *graph.inhibitory_link;
    const Mat K = Mat(gains.k_inhib.asDiagonal());
    out.L.block(a * n, a * n, n, n) += K;
    out.L.block(a * n, b * n, n, n) += K;
    out.L.block(b * n, b * n, n, n) += K;
    out.L.block(b * n, a * n, n, n) += K;
  }

  out.symmetric = out.L.isApprox(out.L.transpose(), 1e-12);
  return out;
}

namespace {

// Orthonormal complement of (1,...,1)/sqrt(p) in R^p, ordered so the p = 3
// columns reproduce the worked three-robot eigenvector matrix.
Mat helmert_complement(int p) {
  Mat u = Mat::Zero(p, p - 1);
  for (int k = 0; k < p - 1; ++k) {
    const double tail = static_cast<double>(p - 1 - k);
    const double norm = std::sqrt(tail * (tail + 1.0));
    u(k, k) = -tail / norm;
    for (int i = k + 1; i < p; ++i) u(i, k) = 1.0 / norm;
  }
  return u;
}

Mat kron_identity(const Mat& a, int n) {
  Mat out = Mat::Zero(a.rows() * n, a.cols() * n);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * n, j * n, n, n) = a(i, j) * Mat::Identity(n, n);
    }
  }
  return out;
}

// Replace each block of eigenvectors sharing a (numerically) repeated
// eigenvalue with the Gram-Schmidt projection of the coordinate axes onto
// that eigenspace. Repeated eigenvalues make eigenvector columns arbitrary
// within their subspace; this pins a deterministic representative.
void align_degenerate_clusters(Mat& vectors, const Vec& values) {
  const int dim = static_cast<int>(values.size());
  const double tol =
      1e-8 * std::max(1.0, values.cwiseAbs().maxCoeff());
  int start = 0;
  while (start < dim) {
    int end = start + 1;
    while (end < dim && std::abs(values[end] - values[start]) <= tol) ++end;
    const int size = end - start;
    if (size > 1) {
      const Mat basis = vectors.middleCols(start, size);
      Mat aligned(vectors.rows(), size);
      int found = 0;
      for (int axis = 0; axis < vectors.rows() && found < size; ++axis) {
        Vec v = basis * basis.row(axis).transpose();
        for (int k = 0; k < found; ++k) {
          v -= aligned.col(k).dot(v) * aligned.col(k);
        }
        const double norm = v.norm();
        if (norm > 1e-6) {
          aligned.col(found++) = v / norm;
        }
      }
      if (found == size) {
        vectors.middleCols(start, size) = aligned;
      }
    }
    start = end;
  }
}

void fix_column_signs(Mat& m) {
  for (int c = 0; c < m.cols(); ++c) {
    const double threshold = 1e-9 * m.col(c).cwiseAbs().maxCoeff();
    for (int r = 0; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > threshold) {
        if (m(r, c) < 0.0) m.col(c) = -m.col(c);
        break;
      }
    }
  }
}

}  // namespace

SyncBasis sync_basis(const ModifiedLaplacian& laplacian) {
  require(laplacian.symmetric,
          "sync_basis: L must be symmetric; pass (L + L')/2 for digraphs");
  const int p = laplacian.p;
  const int n = laplacian.n;

  SyncBasis basis;
  basis.p = p;
  basis.n = n;
  basis.one_block = Mat::Zero(p * n, n);
  for (int i = 0; i < p; ++i) {
    basis.one_block.block(i * n, 0, n, n) =
        Mat::Identity(n, n) / std::sqrt(static_cast<double>(p));
  }

  const Mat w = kron_identity(helmert_complement(p), n);
  const Mat s = w.transpose() * laplacian.L * w;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s + s.transpose()));
  require(es.info() == Eigen::Success, "sync_basis: eigensolver failed");

  // Reorder descending, then pin the representative inside repeated
  // eigenvalue clusters.
  const int dim = (p - 1) * n;
  Vec values(dim);
  Mat vectors(dim, dim);
  for (int i = 0; i < dim; ++i) {
    values[i] = es.eigenvalues()[dim - 1 - i];
    vectors.col(i) = es.eigenvectors().col(dim - 1 - i);
  }
  align_degenerate_clusters(vectors, values);

  basis.v_sync = w * vectors;
  fix_column_signs(basis.v_sync);
  basis.d1 = basis.one_block.transpose() * laplacian.L * basis.one_block;
  basis.d2 = values;
  return basis;
}

ConditionReport check_conditions(const ModifiedLaplacian& laplacian,
                                 const SyncBasis& basis) {
  require(basis.p == laplacian.p && basis.n == laplacian.n,
          "check_conditions: basis/Laplacian dimension mismatch");

  ConditionReport report;
  Mat l_sym = laplacian.L;
  if (!laplacian.symmetric) {
    l_sym = 0.5 * (laplacian.L + laplacian.L.transpose());
    report.symmetrized = true;
  }

  const double tol = kRelTol * std::max(1.0, l_sym.cwiseAbs().maxCoeff());

  Eigen::SelfAdjointEigenSolver<Mat> es_l(l_sym);
  report.spectrum = es_l.eigenvalues();
  report.tracking_ok = report.spectrum.minCoeff() > tol;

  Eigen::SelfAdjointEigenSolver<Mat> es_sync(
      Mat(l_sym + 0.5 * (laplacian.U + laplacian.U.transpose())));
  report.sync_ok = es_sync.eigenvalues().minCoeff() > tol;

  report.d1 = report.symmetrized
                  ? Mat(basis.one_block.transpose() * l_sym * basis.one_block)
                  : basis.d1;
  report.d2 = basis.d2;

  Eigen::SelfAdjointEigenSolver<Mat> es_d1(
      Mat(0.5 * (report.d1 + report.d1.transpose())));
  report.rate_tracking = es_d1.eigenvalues().minCoeff();
  report.rate_sync = basis.d2.minCoeff();
  report.indifferent = report.d1.cwiseAbs().maxCoeff() < tol &&
                       report.rate_sync > tol;
  return report;
}

}  // namespace lagsync
