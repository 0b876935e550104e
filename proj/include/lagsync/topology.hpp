#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lagsync/dynamics.hpp"

namespace lagsync {

/// Diagonal control gains (entries of the diagonal matrices) plus the
/// adaptation gain Gamma and the optional inhibitory gain.
struct Gains {
  Vec k1;      // feedback gain, > 0
  Vec k2;      // coupling gain
  Vec lambda;  // composite-variable slope, >= 0 (laws that need it check > 0)
  Mat gamma;   // adaptation gain, SPD; 0x0 when absent
  Vec k_inhib; // inhibitory link gain; empty when absent

  static Gains uniform(int n, double k1, double k2, double lambda);

  bool has_gamma() const { return gamma.size() > 0; }
  bool has_inhibition() const { return k_inhib.size() > 0; }

  /// Sanity checks shared by every law: sizes, K1 > 0, Lambda >= 0,
  /// Gamma symmetric positive definite when present.
  void validate(int n) const;
};

enum class GraphKind { Ring, Inline, RegularDigraph, CustomRegular };

/// In-edges of the coupling network. `weight` multiplies K2 in the control
/// law (1 for each ring/inline link, 2/m for m-regular digraphs).
/// `self_coupling[i]` is the K2 multiple an inline endpoint feeds back to
/// itself; it is subtracted from the K1 diagonal of the modified Laplacian.
struct CouplingGraph {
  GraphKind kind = GraphKind::Ring;
  int p = 0;
  struct Edge {
    int from;
    double weight;
  };
  std::vector<std::vector<Edge>> in_edges;
  std::vector<double> self_coupling;
  Vec partial_mask;  // diagonal 0/1 selector; empty = full coupling
  std::optional<std::pair<int, int>> inhibitory_link;
  bool directed = false;

  int in_degree() const;  // m, identical for every member (regular)
  bool is_inline_endpoint(int i) const;
};

struct GraphOptions {
  /// Explicit in-neighbor lists for RegularDigraph / CustomRegular.
  std::vector<std::vector<int>> edges;
  Vec partial_mask;
  std::optional<std::pair<int, int>> inhibitory_link;
  bool directed = false;
};

/// Build a coupling graph, enforcing regularity. For p = 2 the ring
/// degenerates to a single bidirectional link with unit weight (the
/// two-robot network of the spectral fixtures, D1 = K1 - K2).
CouplingGraph build_graph(GraphKind kind, int p,
                          const GraphOptions& options = {});

struct ModifiedLaplacian {
  Mat L;  // pn x pn block matrix [L^p_{K1,-K2}]
  Mat U;  // pn x pn block matrix [U^p_{K2}]
  bool symmetric = true;
  int p = 0;
  int n = 0;
};

/// Assemble [L^p_{K1,-K2}] and [U^p_{K2}] for an n-DOF member model.
/// The inhibitory link, when present in both graph and gains, augments the
/// (a,a), (a,b), (b,a), (b,b) blocks by K.
ModifiedLaplacian modified_laplacian(const CouplingGraph& graph,
                                     const Gains& gains, int n);

/// Spectral split of a symmetric modified Laplacian: the consensus eigenblock
/// [1], its orthonormal complement V_sync, the tracking gain D1 = [1]'L[1]
/// and the synchronization spectrum D2 (descending).
struct SyncBasis {
  Mat one_block;  // pn x n, (1/sqrt(p)) [I; ...; I]
  Mat v_sync;     // pn x (p-1)n, orthonormal complement
  Mat d1;         // n x n
  Vec d2;         // (p-1)n eigenvalues, descending
  int p = 0;
  int n = 0;

  Mat d2_matrix() const { return Mat(d2.asDiagonal()); }
};

/// Requires a symmetric L (symmetrize digraphs with (L + L')/2 first).
/// Eigenvalues in D2 are ordered descending; each column's first nonzero
/// component is made positive so results are deterministic.
SyncBasis sync_basis(const ModifiedLaplacian& laplacian);

struct ConditionReport {
  bool tracking_ok = false;   // sym(L) > 0
  bool sync_ok = false;       // sym(L) + U > 0
  bool indifferent = false;   // D1 = 0 with D2 > 0
  bool symmetrized = false;   // report computed on (L + L')/2
  double rate_tracking = 0.0; // eigmin(D1)
  double rate_sync = 0.0;     // eigmin(D2)
  Vec spectrum;               // eigenvalues of sym(L), ascending
  Mat d1;
  Vec d2;
};

ConditionReport check_conditions(const ModifiedLaplacian& laplacian,
                                 const SyncBasis& basis);

}  // namespace lagsync
