#include "ssperk/tableau.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>

#include "ssperk/error.hpp"

namespace ssperk {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_stage_count: return "invalid-stage-count";
    case ErrorCode::unsupported_variant: return "unsupported-variant";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_spec: return "invalid-spec";
    case ErrorCode::order_too_high: return "order-too-high";
    case ErrorCode::startup_failure: return "startup-failure";
    case ErrorCode::state_invalid: return "state-invalid";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

namespace {

// Coefficients are written as integer ratios; the division is correctly rounded.
constexpr double ratio(long long num, long long den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

Eigen::VectorXd row_sums(const Eigen::MatrixXd& A) { return A.rowwise().sum(); }

Eigen::VectorXd from_ratios(std::initializer_list<std::pair<long long, long long>> entries) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (const auto& [num, den] : entries) v(i++) = ratio(num, den);
  return v;
}

bool is_perfect_square(int s, int& root) {
  root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(s))));
  return root * root == s;
}

}  // namespace

const Eigen::VectorXd& EmbeddedTableau::embedded() const {
  if (!b_hat) throw Error(ErrorCode::invalid_argument, id + " has no embedded weights");
  return *b_hat;
}

int MethodId::order() const noexcept {
  switch (family) {
    case Family::ssp2: return 2;
    case Family::ssp3: return 3;
    case Family::ssp4: return 4;
    case Family::literature: return stages == 4 ? 3 : 5;
  }
  return 0;
}

EmbeddedTableau ssperk_s2(int stages, int variant) {
  if (stages < 2) throw Error(ErrorCode::invalid_stage_count, "SSPERK(s,2) needs s >= 2");
  if (variant != 1 && variant != 2) {
    throw Error(ErrorCode::unsupported_variant, "SSPERK(s,2) pairs are b1 and b2");
  }
  const int s = stages;
  EmbeddedTableau t;
  t.id = "ssp" + std::to_string(s) + ",2-b" + std::to_string(variant);
  t.stages = s;
  t.order = 2;
  t.embedded_order = 1;
  t.A = Eigen::MatrixXd::Zero(s, s);
  for (int i = 1; i < s; ++i)
    for (int j = 0; j < i; ++j) t.A(i, j) = ratio(1, s - 1);
  t.b = Eigen::VectorXd::Constant(s, ratio(1, s));
  Eigen::VectorXd w(s);
  if (variant == 1) {
    w.setConstant(ratio(1, s - 1));
    w(s - 1) = 0.0;
  } else {
    w.setConstant(ratio(1, s));
    w(0) = ratio(s + 1, static_cast<long long>(s) * s);
    w(s - 1) = ratio(s - 1, static_cast<long long>(s) * s);
  }
  t.b_hat = std::move(w);
  t.c = row_sums(t.A);
  t.ssp_claimed = static_cast<double>(s - 1);
  t.claims_nonnegative = true;
  return t;
}

EmbeddedTableau ssperk_n2_3(int n, N23Variant variant) {
  if (n < 2) throw Error(ErrorCode::invalid_stage_count, "SSPERK(n^2,3) needs n >= 2");
  if (n >= 3 && variant != N23Variant::uniform) {
    throw Error(ErrorCode::unsupported_variant, "pairs b1/b2 exist only for SSPERK(4,3)");
  }
  const int s = n * n;
  const long long r = static_cast<long long>(n) * (n - 1);
  const long long r_block = static_cast<long long>(n) * (2 * n - 1);
  // Columns [block_begin, block_end) carry the convex-combination stage; the
  // rows below them use the smaller weight there.
  const int block_begin = (n - 1) * (n - 2) / 2;
  const int block_end = n * (n + 1) / 2;

  EmbeddedTableau t;
  t.stages = s;
  t.order = 3;
  t.embedded_order = 2;
  t.A = Eigen::MatrixXd::Zero(s, s);
  for (int i = 1; i < s; ++i) {
    for (int j = 0; j < i; ++j) {
      const bool in_block = i >= block_end && j >= block_begin && j < block_end;
      t.A(i, j) = in_block ? ratio(1, r_block) : ratio(1, r);
    }
  }
  t.b.resize(s);
  for (int j = 0; j < s; ++j) {
    t.b(j) = (j >= block_begin && j < block_end) ? ratio(1, r_block) : ratio(1, r);
  }
  Eigen::VectorXd w(s);
  std::string suffix;
  switch (variant) {
    case N23Variant::b1:
      w << ratio(1, 3), ratio(1, 3), ratio(1, 3), 0.0;
      suffix = "-b1";
      break;
    case N23Variant::b2:
      w.setConstant(ratio(1, 4));
      suffix = "-b2";
      break;
    case N23Variant::uniform:
      w.setConstant(ratio(1, s));
      break;
  }
  t.id = "ssp" + std::to_string(s) + ",3" + suffix;
  t.b_hat = std::move(w);
  t.c = row_sums(t.A);
  t.ssp_claimed = static_cast<double>(r);
  t.claims_nonnegative = true;
  return t;
}

EmbeddedTableau ssperk_10_4(int variant) {
  using R = std::pair<long long, long long>;
  static const std::vector<std::vector<R>> pairs = {
      {{0, 1}, {3, 8}, {0, 1}, {1, 8}, {0, 1}, {0, 1}, {0, 1}, {3, 8}, {0, 1}, {1, 8}},
      {{3, 14}, {0, 1}, {0, 1}, {2, 7}, {0, 1}, {0, 1}, {0, 1}, {3, 7}, {0, 1}, {1, 14}},
      {{0, 1}, {2, 9}, {0, 1}, {0, 1}, {5, 18}, {1, 3}, {0, 1}, {0, 1}, {0, 1}, {1, 6}},
      {{1, 5}, {0, 1}, {0, 1}, {3, 10}, {0, 1}, {0, 1}, {1, 5}, {0, 1}, {3, 10}, {0, 1}},
      {{1, 10}, {0, 1}, {0, 1}, {2, 5}, {0, 1}, {3, 10}, {0, 1}, {0, 1}, {0, 1}, {1, 5}},
      {{1, 6}, {0, 1}, {0, 1}, {0, 1}, {1, 3}, {5, 18}, {0, 1}, {0, 1}, {2, 9}, {0, 1}},
      {{0, 1}, {2, 5}, {0, 1}, {1, 10}, {0, 1}, {0, 1}, {0, 1}, {1, 5}, {3, 10}, {0, 1}},
      {{1, 7}, {0, 1}, {5, 14}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {3, 14}, {2, 7}, {0, 1}},
  };
  if (variant < 1 || variant > 8) {
    throw Error(ErrorCode::unsupported_variant, "SSPERK(10,4) pairs are b1..b8");
  }
  EmbeddedTableau t = base_method(MethodId{Family::ssp4, 10, PairKind::none, 0});
  t.id = "ssp10,4-b" + std::to_string(variant);
  t.embedded_order = 3;
  Eigen::VectorXd w(10);
  const auto& row = pairs[static_cast<std::size_t>(variant - 1)];
  for (int j = 0; j < 10; ++j) w(j) = ratio(row[j].first, row[j].second);
  t.b_hat = std::move(w);
  return t;
}

EmbeddedTableau ssperk_3_3() {
  EmbeddedTableau t;
  t.id = "ssp3,3";
  t.stages = 3;
  t.order = 3;
  t.embedded_order = 2;
  t.A = Eigen::MatrixXd::Zero(3, 3);
  t.A(1, 0) = 1.0;
  t.A(2, 0) = ratio(1, 4);
  t.A(2, 1) = ratio(1, 4);
  t.b = from_ratios({{1, 6}, {1, 6}, {2, 3}});
  t.c = row_sums(t.A);
  t.ssp_claimed = 1.0;
  t.claims_nonnegative = true;
  return t;
}

EmbeddedTableau literature_pair(LiteraturePair which) {
  EmbeddedTableau t;
  if (which == LiteraturePair::bs32) {
    t.id = "bs32";
    t.stages = 4;
    t.order = 3;
    t.embedded_order = 2;
    t.A = Eigen::MatrixXd::Zero(4, 4);
    t.A(1, 0) = ratio(1, 2);
    t.A(2, 1) = ratio(3, 4);
    t.A(3, 0) = ratio(2, 9);
    t.A(3, 1) = ratio(1, 3);
    t.A(3, 2) = ratio(4, 9);
    t.b = from_ratios({{2, 9}, {1, 3}, {4, 9}, {0, 1}});
    t.b_hat = from_ratios({{7, 24}, {1, 4}, {1, 3}, {1, 8}});
  } else {
    t.id = "dp54";
    t.stages = 7;
    t.order = 5;
    t.embedded_order = 4;
    t.A = Eigen::MatrixXd::Zero(7, 7);
    t.A.row(1).head(1) = from_ratios({{1, 5}});
    t.A.row(2).head(2) = from_ratios({{3, 40}, {9, 40}});
    t.A.row(3).head(3) = from_ratios({{44, 45}, {-56, 15}, {32, 9}});
    t.A.row(4).head(4) = from_ratios({{19372, 6561}, {-25360, 2187}, {64448, 6561}, {-212, 729}});
    t.A.row(5).head(5) =
        from_ratios({{9017, 3168}, {-355, 33}, {46732, 5247}, {49, 176}, {-5103, 18656}});
    t.A.row(6).head(6) =
        from_ratios({{35, 384}, {0, 1}, {500, 1113}, {125, 192}, {-2187, 6784}, {11, 84}});
    t.b = from_ratios({{35, 384}, {0, 1}, {500, 1113}, {125, 192}, {-2187, 6784}, {11, 84}, {0, 1}});
    t.b_hat = from_ratios({{5179, 57600},
                           {0, 1},
                           {7571, 16695},
                           {393, 640},
                           {-92097, 339200},
                           {187, 2100},
                           {1, 40}});
  }
  t.c = row_sums(t.A);
  return t;
}

EmbeddedTableau base_method(const MethodId& id) {
  EmbeddedTableau t;
  switch (id.family) {
    case Family::ssp2:
      t = ssperk_s2(id.stages, 1);
      break;
    case Family::ssp3: {
      int n = 0;
      if (id.stages == 3) {
        t = ssperk_3_3();
      } else if (is_perfect_square(id.stages, n) && n >= 2) {
        t = ssperk_n2_3(n, N23Variant::uniform);
      } else {
        throw Error(ErrorCode::unsupported_variant,
                    "third-order SSP methods exist here for s = 3 and s = n^2");
      }
      break;
    }
    case Family::ssp4: {
      if (id.stages != 10) {
        throw Error(ErrorCode::unsupported_variant, "only SSPERK(10,4) is available");
      }
      t.stages = 10;
      t.order = 4;
      t.embedded_order = 3;
      t.A = Eigen::MatrixXd::Zero(10, 10);
      for (int i = 1; i < 5; ++i)
        for (int j = 0; j < i; ++j) t.A(i, j) = ratio(1, 6);
      for (int i = 5; i < 10; ++i) {
        for (int j = 0; j < 5; ++j) t.A(i, j) = ratio(1, 15);
        for (int j = 5; j < i; ++j) t.A(i, j) = ratio(1, 6);
      }
      t.b = Eigen::VectorXd::Constant(10, ratio(1, 10));
      t.c = row_sums(t.A);
      t.ssp_claimed = 6.0;
      t.claims_nonnegative = true;
      break;
    }
    case Family::literature:
      t = literature_pair(id.stages == 4 ? LiteraturePair::bs32 : LiteraturePair::dp54);
      break;
  }
  t.b_hat.reset();
  t.id = to_string(MethodId{id.family, id.stages, PairKind::none, 0});
  return t;
}

EmbeddedTableau catalog_tableau(const MethodId& id) {
  EmbeddedTableau t;
  const bool defaulted = id.pair == PairKind::none;
  switch (id.family) {
    case Family::ssp2:
      if (id.pair == PairKind::optimized) break;
      t = ssperk_s2(id.stages, defaulted ? 2 : id.index);
      break;
    case Family::ssp3: {
      int n = 0;
      if (id.pair == PairKind::optimized || id.stages == 3) break;
      if (!is_perfect_square(id.stages, n) || n < 2) {
        throw Error(ErrorCode::unsupported_variant, to_string(id));
      }
      N23Variant v = N23Variant::uniform;
      if (n == 2) {
        if (!defaulted && id.index != 1 && id.index != 2) {
          throw Error(ErrorCode::unsupported_variant, "SSPERK(4,3) pairs are b1 and b2");
        }
        v = (defaulted || id.index == 2) ? N23Variant::b2 : N23Variant::b1;
      } else if (!defaulted) {
        throw Error(ErrorCode::unsupported_variant, "pairs b1/b2 exist only for SSPERK(4,3)");
      }
      t = ssperk_n2_3(n, v);
      break;
    }
    case Family::ssp4:
      if (id.pair == PairKind::optimized) break;
      if (id.stages != 10) throw Error(ErrorCode::unsupported_variant, to_string(id));
      t = ssperk_10_4(defaulted ? 3 : id.index);
      break;
    case Family::literature:
      t = literature_pair(id.stages == 4 ? LiteraturePair::bs32 : LiteraturePair::dp54);
      break;
  }
  if (t.stages == 0) {
    throw Error(ErrorCode::unsupported_variant,
                to_string(id) + " has no published pair; optimize its weights instead");
  }
  t.id = to_string(id);
  return t;
}

std::vector<MethodId> catalog_ids() {
  std::vector<MethodId> ids;
  for (int s = 2; s <= 12; ++s) {
    ids.push_back({Family::ssp2, s, PairKind::catalog, 1});
    ids.push_back({Family::ssp2, s, PairKind::catalog, 2});
  }
  ids.push_back({Family::ssp3, 4, PairKind::catalog, 1});
  ids.push_back({Family::ssp3, 4, PairKind::catalog, 2});
  for (int n = 3; n <= 6; ++n) ids.push_back({Family::ssp3, n * n, PairKind::none, 0});
  for (int k = 1; k <= 8; ++k) ids.push_back({Family::ssp4, 10, PairKind::catalog, k});
  ids.push_back({Family::literature, 4, PairKind::none, 0});
  ids.push_back({Family::literature, 7, PairKind::none, 0});
  return ids;
}

MethodId parse_method_id(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "bs32") return {Family::literature, 4, PairKind::none, 0};
  if (s == "dp54") return {Family::literature, 7, PairKind::none, 0};

  static const std::regex grammar(R"(ssp(\d{1,3}),(\d)(?:-(?:b(\d{1,2})|(w)))?)");
  std::smatch m;
  if (!std::regex_match(s, m, grammar)) {
    throw Error(ErrorCode::parse_error, "unrecognized method id '" + std::string(text) + "'");
  }
  MethodId id;
  id.stages = std::stoi(m[1].str());
  const int order = std::stoi(m[2].str());
  switch (order) {
    case 2: id.family = Family::ssp2; break;
    case 3: id.family = Family::ssp3; break;
    case 4: id.family = Family::ssp4; break;
    default:
      throw Error(ErrorCode::unsupported_variant, "SSP orders 2..4 only: " + std::string(text));
  }
  if (m[3].matched) {
    id.pair = PairKind::catalog;
    id.index = std::stoi(m[3].str());
  } else if (m[4].matched) {
    id.pair = PairKind::optimized;
  }

  // Reject ids that name no method.
  int n = 0;
  const bool ok = [&] {
    switch (id.family) {
      case Family::ssp2:
        return id.stages >= 2 && (id.pair != PairKind::catalog || id.index == 1 || id.index == 2);
      case Family::ssp3:
        if (id.stages == 3) return id.pair != PairKind::catalog;
        if (!is_perfect_square(id.stages, n) || n < 2) return false;
        if (id.pair == PairKind::catalog) return n == 2 && (id.index == 1 || id.index == 2);
        return true;
      case Family::ssp4:
        return id.stages == 10 &&
               (id.pair != PairKind::catalog || (id.index >= 1 && id.index <= 8));
      case Family::literature:
        return true;
    }
    return false;
  }();
  if (!ok) throw Error(ErrorCode::unsupported_variant, "no such pair: " + std::string(text));
  return id;
}

std::string to_string(const MethodId& id) {
  if (id.family == Family::literature) return id.stages == 4 ? "bs32" : "dp54";
  std::string out = "ssp" + std::to_string(id.stages) + "," + std::to_string(id.order());
  switch (id.pair) {
    case PairKind::none: break;
    case PairKind::catalog: out += "-b" + std::to_string(id.index); break;
    case PairKind::optimized: out += "-w"; break;
  }
  return out;
}

std::string_view to_string(Violation v) noexcept {
  switch (v) {
    case Violation::shape: return "shape mismatch";
    case Violation::not_explicit: return "A not strictly lower triangular";
    case Violation::row_sum: return "row-sum violation (c != A e)";
    case Violation::consistency: return "consistency violation (sum(b) != 1)";
    case Violation::embedded_consistency: return "consistency violation (sum(b_hat) != 1)";
    case Violation::negative_entry: return "negative coefficient in nonnegative method";
    case Violation::order_gap: return "embedded order is not order - 1";
  }
  return "unknown";
}

std::vector<Violation> validate(const EmbeddedTableau& t, double tol) {
  std::vector<Violation> out;
  const Eigen::Index s = t.stages;
  if (s <= 0 || t.A.rows() != s || t.A.cols() != s || t.b.size() != s || t.c.size() != s ||
      (t.b_hat && t.b_hat->size() != s)) {
    out.push_back(Violation::shape);
    return out;
  }
  for (Eigen::Index i = 0; i < s; ++i) {
    for (Eigen::Index j = i; j < s; ++j) {
      if (std::abs(t.A(i, j)) > tol) {
        out.push_back(Violation::not_explicit);
        i = s;
        break;
      }
    }
  }
  if ((t.c - row_sums(t.A)).cwiseAbs().maxCoeff() > tol) out.push_back(Violation::row_sum);
  if (std::abs(t.b.sum() - 1.0) > tol) out.push_back(Violation::consistency);
  if (t.b_hat && std::abs(t.b_hat->sum() - 1.0) > tol) {
    out.push_back(Violation::embedded_consistency);
  }
  if (t.claims_nonnegative) {
    const bool negative = t.A.minCoeff() < -tol || t.b.minCoeff() < -tol ||
                          (t.b_hat && t.b_hat->minCoeff() < -tol);
    if (negative) out.push_back(Violation::negative_entry);
  }
  if (t.b_hat && t.embedded_order != t.order - 1) out.push_back(Violation::order_gap);
  return out;
}

}  // namespace ssperk
