#include <cmath>
#include <functional>

#include "doctest.h"
#include "oracles.hpp"
#include "ssperk/error.hpp"
#include "ssperk/integrator.hpp"
#include "ssperk/tableau.hpp"

using namespace ssperk;
using Eigen::VectorXd;

namespace {

// Mildly nonlinear test system used to compare one-step maps.
void nonlinear_rhs(double t, const VectorXd& u, VectorXd& du) {
  du(0) = -u(1) + 0.3 * std::sin(u(0)) + 0.1 * t;
  du(1) = u(0) - 0.2 * u(1) * u(1);
  du(2) = std::cos(u(0) * u(2)) - u(2);
}

using Step = std::function<VectorXd(double, const VectorXd&, double)>;

VectorXd F(double t, const VectorXd& u) {
  VectorXd du(u.size());
  nonlinear_rhs(t, u, du);
  return du;
}

// Low-storage forms of the SSP methods, written stage by stage.
VectorXd shu_osher_s2(int s, double t, const VectorXd& u, double dt) {
  const double r = s - 1;
  VectorXd q = u;
  double tq = t;
  for (int i = 0; i < s - 1; ++i) {
    q = q + dt / r * F(tq, q);
    tq += dt / r;
  }
  return u / s + (s - 1.0) / s * (q + dt / r * F(tq, q));
}

VectorXd shu_osher_n2_3(int n, double t, const VectorXd& u, double dt) {
  const double r = n * n - n;
  VectorXd q1 = u;
  double tq = t;
  auto euler = [&] {
    q1 = q1 + dt / r * F(tq, q1);
    tq += dt / r;
  };
  for (int i = 1; i <= (n - 1) * (n - 2) / 2; ++i) euler();
  VectorXd q2 = q1;
  const double t2 = tq;
  for (int i = (n - 1) * (n - 2) / 2 + 1; i <= n * (n + 1) / 2 - 1; ++i) euler();
  euler();
  q1 = (n * q2 + (n - 1.0) * q1) / (2.0 * n - 1.0);
  tq = (n * t2 + (n - 1.0) * tq) / (2.0 * n - 1.0);
  for (int i = n * (n + 1) / 2 + 1; i <= n * n; ++i) euler();
  return q1;
}

VectorXd low_storage_10_4(double t, const VectorXd& u, double dt) {
  VectorXd q1 = u;
  VectorXd q2 = u;
  double tq = t;
  for (int i = 0; i < 5; ++i) {
    q1 = q1 + dt / 6.0 * F(tq, q1);
    tq += dt / 6.0;
  }
  q2 = q2 / 25.0 + 9.0 / 25.0 * q1;
  q1 = 15.0 * q2 - 5.0 * q1;
  tq = t + dt / 3.0;
  for (int i = 0; i < 4; ++i) {
    q1 = q1 + dt / 6.0 * F(tq, q1);
    tq += dt / 6.0;
  }
  return q2 + 0.6 * q1 + dt / 10.0 * F(tq, q1);
}

VectorXd shu_osher_3_3(double t, const VectorXd& u, double dt) {
  const VectorXd u1 = u + dt * F(t, u);
  const VectorXd u2 = 0.75 * u + 0.25 * (u1 + dt * F(t + dt, u1));
  return u / 3.0 + 2.0 / 3.0 * (u2 + dt * F(t + 0.5 * dt, u2));
}

VectorXd library_step(const EmbeddedTableau& tab, double t, const VectorXd& u, double dt) {
  StepWorkspace ws;
  VectorXd next(u.size());
  rk_step(tab.A, tab.b, RhsFn(nonlinear_rhs), t, u, dt, next, ws);
  return next;
}

VectorXd state() {
  VectorXd u(3);
  u << 0.7, -0.4, 1.3;
  return u;
}

}  // namespace

TEST_SUITE("tableau") {
  TEST_CASE("method ids round-trip through text") {
    for (const auto& id : catalog_ids()) {
      CHECK(parse_method_id(to_string(id)) == id);
    }
    CHECK(to_string(parse_method_id("SSP10,4-B3")) == "ssp10,4-b3");
    CHECK(to_string(parse_method_id("ssp3,3-w")) == "ssp3,3-w");
    CHECK(to_string(parse_method_id("DP54")) == "dp54");
  }

  TEST_CASE("malformed and unknown ids are rejected") {
    auto code_of = [](const char* text) {
      try {
        (void)parse_method_id(text);
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::io_error;
    };
    CHECK(code_of("nosuch") == ErrorCode::parse_error);
    CHECK(code_of("ssp2-2") == ErrorCode::parse_error);
    CHECK(code_of("ssp") == ErrorCode::parse_error);
    CHECK(code_of("ssp4,5") == ErrorCode::unsupported_variant);
    CHECK(code_of("ssp2,2-b3") == ErrorCode::unsupported_variant);
    CHECK(code_of("ssp5,3") == ErrorCode::unsupported_variant);
    CHECK(code_of("ssp9,3-b1") == ErrorCode::unsupported_variant);
    CHECK(code_of("ssp10,4-b9") == ErrorCode::unsupported_variant);
    CHECK(code_of("ssp6,4") == ErrorCode::unsupported_variant);
    CHECK(code_of("ssp1,2") == ErrorCode::unsupported_variant);
  }

  TEST_CASE("constructors validate their arguments") {
    CHECK_THROWS_AS((void)ssperk_s2(1, 1), Error);
    CHECK_THROWS_AS((void)ssperk_s2(3, 3), Error);
    CHECK_THROWS_AS((void)ssperk_n2_3(3, N23Variant::b1), Error);
    CHECK_THROWS_AS((void)ssperk_10_4(0), Error);
    CHECK_THROWS_AS((void)ssperk_10_4(9), Error);
    CHECK_THROWS_AS((void)catalog_tableau(parse_method_id("ssp3,3-w")), Error);
    CHECK_THROWS_AS((void)ssperk_3_3().embedded(), Error);
  }

  TEST_CASE("catalog entries satisfy the structural invariants") {
    for (const auto& id : catalog_ids()) {
      const auto t = catalog_tableau(id);
      INFO(t.id);
      CHECK(validate(t).empty());
      CHECK(t.stages == t.A.rows());
      CHECK(t.has_embedded());
      CHECK(t.embedded_order == t.order - 1);
      CHECK(std::abs(t.b.sum() - 1.0) < 1e-14);
      CHECK(std::abs(t.embedded().sum() - 1.0) < 1e-14);
      CHECK((t.c - t.A.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-15);
      if (t.claims_nonnegative) {
        CHECK(t.A.minCoeff() >= 0.0);
        CHECK(t.b.minCoeff() >= 0.0);
        CHECK(t.embedded().minCoeff() >= 0.0);
      }
    }
  }

  TEST_CASE("validate reports broken tableaus") {
    auto t = ssperk_s2(3, 2);
    t.c(1) += 1e-6;
    CHECK(validate(t) == std::vector<Violation>{Violation::row_sum});
    t = ssperk_s2(3, 2);
    t.b(0) += 1e-6;
    CHECK(validate(t) == std::vector<Violation>{Violation::consistency});
    t = ssperk_s2(3, 2);
    t.A(0, 2) = 0.1;
    t.c = t.A.rowwise().sum();
    const auto v = validate(t);
    CHECK(std::find(v.begin(), v.end(), Violation::not_explicit) != v.end());
    t = ssperk_s2(3, 2);
    t.embedded_order = 2;
    CHECK(validate(t) == std::vector<Violation>{Violation::order_gap});
    CHECK(!to_string(Violation::row_sum).empty());
  }

  TEST_CASE("advancing methods match their low-storage forms") {
    const VectorXd u = state();
    const double t0 = 0.3;
    const double dt = 0.17;
    for (int s = 2; s <= 12; ++s) {
      INFO("s = " << s);
      const VectorXd ref = shu_osher_s2(s, t0, u, dt);
      CHECK((library_step(ssperk_s2(s, 1), t0, u, dt) - ref).cwiseAbs().maxCoeff() < 1e-14);
    }
    for (int n = 2; n <= 6; ++n) {
      INFO("n = " << n);
      const VectorXd ref = shu_osher_n2_3(n, t0, u, dt);
      const auto v = n == 2 ? N23Variant::b2 : N23Variant::uniform;
      CHECK((library_step(ssperk_n2_3(n, v), t0, u, dt) - ref).cwiseAbs().maxCoeff() < 1e-13);
    }
    CHECK((library_step(ssperk_10_4(1), t0, u, dt) - low_storage_10_4(t0, u, dt))
              .cwiseAbs()
              .maxCoeff() < 1e-13);
    CHECK((library_step(ssperk_3_3(), t0, u, dt) - shu_osher_3_3(t0, u, dt)).cwiseAbs().maxCoeff() <
          1e-14);
  }

  TEST_CASE("catalog orders agree with a direct tree evaluation") {
    for (const auto& id : catalog_ids()) {
      const auto t = catalog_tableau(id);
      INFO(t.id);
      CHECK(oracle::order_of(t.A, t.b) == t.order);
      CHECK(oracle::order_of(t.A, t.embedded()) == t.embedded_order);
    }
  }

  TEST_CASE("base methods carry no embedded weights") {
    const auto t = base_method(parse_method_id("ssp10,4-b5"));
    CHECK(!t.has_embedded());
    CHECK(t.id == "ssp10,4");
    CHECK(base_method(parse_method_id("ssp3,3")).ssp_claimed == doctest::Approx(1.0));
  }
}
