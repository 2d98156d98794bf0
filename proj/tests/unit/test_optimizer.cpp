#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ssperk/analysis.hpp"
#include "ssperk/catalog.hpp"
#include "ssperk/error.hpp"
#include "ssperk/optimizer.hpp"

using namespace ssperk;
using Eigen::VectorXd;

namespace {

OptimizationSpec spec_for(const char* id, int seeds = 20, std::int64_t budget = 40000) {
  OptimizationSpec s;
  s.tableau = base_method(parse_method_id(id));
  s.target_order = s.tableau.order - 1;
  s.seeds = seeds;
  s.budget = budget;
  return s;
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("Nelder-Mead minimizes the Rosenbrock function") {
    auto rosen = [](const VectorXd& x) {
      return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
    };
    VectorXd x0(2);
    x0 << -1.2, 1.0;
    const auto r = nelder_mead(rosen, x0, 0.5, 20000, 1e-20);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.evaluations <= 20000);
  }

  TEST_CASE("objective of catalog pairs") {
    const auto t = catalog_tableau(parse_method_id("ssp3,2-b2"));
    const double f = objective(t.A, t.b, t.embedded(), t.order);
    const auto m = error_measures(t);
    const double ref = std::max({m.A2_emb, m.Ainf_emb, std::abs(m.B2 - 1.0), std::abs(m.Binf - 1.0),
                                 std::abs(m.C2 - 1.0), std::abs(m.Cinf - 1.0)});
    CHECK(f == doctest::Approx(ref));
    VectorXd off = t.embedded();
    off(0) += 1e-3;
    CHECK(std::isinf(objective(t.A, t.b, off, t.order)));
  }

  TEST_CASE("SSP screen agrees with the oracle") {
    const auto t = catalog_tableau(parse_method_id("ssp4,3-b2"));
    for (double r : {0.0, 1.0, 1.9, 2.1, 3.0}) {
      CHECK(ssp_feasible(t.A, t.embedded(), r) == oracle::ssp_holds(t.A, t.embedded(), r));
    }
    VectorXd neg = t.embedded();
    neg(0) = -0.01;
    CHECK_FALSE(ssp_feasible(t.A, neg, 0.0));
  }

  TEST_CASE("optimized weights for SSPERK(3,2) meet every constraint") {
    auto s = spec_for("ssp3,2");
    const auto r = optimize_embedded(s);
    REQUIRE(r.found);
    const auto& A = s.tableau.A;
    CHECK(std::abs(r.w.sum() - 1.0) < 1e-10);
    CHECK(r.w.minCoeff() >= -1e-12);
    CHECK(r.w.maxCoeff() <= 1.0 + 1e-12);
    CHECK(oracle::order_of(A, r.w, 1e-10) == 1);
    CHECK(r.non_defective);
    for (const auto& [name, value] : r.residuals) CHECK(std::abs(value) <= 1e-10);
    const auto base = catalog_tableau(parse_method_id("ssp3,2-b2"));
    CHECK(r.objective <= objective(base.A, base.b, base.embedded(), 2) + 1e-12);
    CHECK(r.objective == doctest::Approx(objective(A, s.tableau.b, r.w, 2)));
  }

  TEST_CASE("SSP requirement is honoured") {
    auto s = spec_for("ssp4,2");
    s.require_ssp_at = 2.0;
    const auto r = optimize_embedded(s);
    REQUIRE(r.found);
    CHECK(r.ssp_feasible);
    CHECK(oracle::ssp_holds(s.tableau.A, r.w, 2.0));
  }

  TEST_CASE("no embedded SSPERK(9,3) pair at r = 6") {
    auto s = spec_for("ssp9,3");
    s.require_ssp_at = 6.0;
    const auto r = optimize_embedded(s);
    CHECK_FALSE(r.found);
    CHECK(r.w.size() == 0);
    CHECK_FALSE(r.message.empty());
  }

  TEST_CASE("results are deterministic in the seed and thread count") {
    auto s = spec_for("ssp4,3", 12, 24000);
    s.seed = 42;
    s.threads = 1;
    const auto a = optimize_embedded(s);
    s.threads = 4;
    const auto b = optimize_embedded(s);
    REQUIRE(a.found);
    REQUIRE(b.found);
    CHECK(a.w == b.w);
    CHECK(a.objective == b.objective);
    CHECK(a.evaluations == b.evaluations);
  }

  TEST_CASE("invalid specifications") {
    auto s = spec_for("ssp3,2");
    s.target_order = 2;
    CHECK_THROWS_AS((void)optimize_embedded(s), Error);
    s = spec_for("ssp3,2");
    s.seeds = 0;
    CHECK_THROWS_AS((void)optimize_embedded(s), Error);
  }

  TEST_CASE("optimized ids resolve through the catalog") {
    const auto t = resolve_method("ssp3,3-w");
    CHECK(t.id == "ssp3,3-w");
    REQUIRE(t.has_embedded());
    CHECK(classify_order(t.A, t.embedded(), 1e-10) == 2);
    CHECK(is_non_defective(t).non_defective);
    const auto again = resolve_method("ssp3,3");
    CHECK(again.embedded() == t.embedded());
  }
}
