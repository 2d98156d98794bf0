#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ssperk {

/// Extended Butcher tableau of an explicit Runge-Kutta pair.
///
/// `b` advances the solution (order `order`); `b_hat`, when present, is the
/// embedded weight vector of order `embedded_order` used only for the local
/// error estimate.
struct EmbeddedTableau {
  std::string id;
  int stages = 0;
  int order = 0;
  int embedded_order = 0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::optional<Eigen::VectorXd> b_hat;
  Eigen::VectorXd c;
  /// Catalog value of the SSP coefficient of the advancing method.
  std::optional<double> ssp_claimed;
  /// Whether the catalog claims nonnegative coefficients for A, b and b_hat.
  bool claims_nonnegative = false;

  [[nodiscard]] bool has_embedded() const noexcept { return b_hat.has_value(); }
  [[nodiscard]] const Eigen::VectorXd& embedded() const;
};

enum class Family { ssp2, ssp3, ssp4, literature };

enum class PairKind {
  none,       ///< family default (uniform weights for SSPERK(n^2,3), n >= 3)
  catalog,    ///< b_k from the published list
  optimized,  ///< numerically optimized weights
};

/// Identifies a catalog pair. Canonical text form:
///   ssp<s>,<p>        ssp<s>,<p>-b<k>        ssp<s>,<p>-w        bs32        dp54
struct MethodId {
  Family family = Family::ssp2;
  int stages = 0;
  PairKind pair = PairKind::none;
  int index = 0;  ///< k of b_k when pair == catalog

  [[nodiscard]] int order() const noexcept;

  friend bool operator==(const MethodId&, const MethodId&) = default;
};

/// Case-insensitive parse; throws Error(parse_error) on malformed input and
/// Error(unsupported_variant) when the text is well formed but names no pair.
[[nodiscard]] MethodId parse_method_id(std::string_view text);
[[nodiscard]] std::string to_string(const MethodId& id);

enum class N23Variant { b1, b2, uniform };
enum class LiteraturePair { bs32, dp54 };

/// SSPERK(s,2) with embedded pair b1 or b2 (variant in {1, 2}).
[[nodiscard]] EmbeddedTableau ssperk_s2(int stages, int variant);

/// SSPERK(n^2,3). b1/b2 only exist for n = 2; n >= 3 uses uniform weights.
[[nodiscard]] EmbeddedTableau ssperk_n2_3(int n, N23Variant variant);

/// SSPERK(10,4) with one of the eight embedded pairs (variant in 1..8).
[[nodiscard]] EmbeddedTableau ssperk_10_4(int variant);

/// Three-stage third-order SSP method (Shu-Osher). No embedded weights; its
/// pair comes from the optimizer.
[[nodiscard]] EmbeddedTableau ssperk_3_3();

[[nodiscard]] EmbeddedTableau literature_pair(LiteraturePair which);

/// Advancing method (A, b, c) for a method id, without embedded weights.
[[nodiscard]] EmbeddedTableau base_method(const MethodId& id);

/// Catalog entry for ids with a published embedded pair. Optimized ids
/// (PairKind::optimized) need the optimizer; see catalog.hpp.
[[nodiscard]] EmbeddedTableau catalog_tableau(const MethodId& id);

/// All published pairs: SSPERK(s,2) s = 2..12 with b1/b2, SSPERK(4,3) b1/b2,
/// SSPERK(n^2,3) n = 3..6, SSPERK(10,4) b1..b8, plus bs32 and dp54.
[[nodiscard]] std::vector<MethodId> catalog_ids();

enum class Violation {
  shape,
  not_explicit,
  row_sum,
  consistency,
  embedded_consistency,
  negative_entry,
  order_gap,
};

[[nodiscard]] std::string_view to_string(Violation v) noexcept;

/// Checks the structural invariants of a tableau; empty when valid.
[[nodiscard]] std::vector<Violation> validate(const EmbeddedTableau& t, double tol = 1e-13);

}  // namespace ssperk
