#pragma once

// Reference implementations used to cross-check the library. They are written
// from textbook definitions and share no code with ssperk.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Rooted tree as a list of child subtrees.
struct Tree {
  std::vector<Tree> children;

  [[nodiscard]] int order() const {
    int n = 1;
    for (const auto& c : children) n += c.order();
    return n;
  }

  [[nodiscard]] std::string key() const {
    std::vector<std::string> keys;
    for (const auto& c : children) keys.push_back(c.key());
    std::sort(keys.begin(), keys.end());
    std::string s = "(";
    for (const auto& k : keys) s += k;
    return s + ")";
  }

  [[nodiscard]] long density() const {
    long g = order();
    for (const auto& c : children) g *= c.density();
    return g;
  }

  [[nodiscard]] long symmetry() const {
    std::map<std::string, std::pair<int, long>> groups;
    for (const auto& c : children) {
      auto& [m, s] = groups[c.key()];
      ++m;
      s = c.symmetry();
    }
    long sigma = 1;
    for (const auto& [k, g] : groups) {
      long fact = 1;
      for (int i = 2; i <= g.first; ++i) fact *= i;
      long pw = 1;
      for (int i = 0; i < g.first; ++i) pw *= g.second;
      sigma *= fact * pw;
    }
    return sigma;
  }

  /// Internal weight vector: prod_j (A Phi(child_j)), e for a leaf.
  [[nodiscard]] Eigen::VectorXd phi(const Eigen::MatrixXd& A) const {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(A.rows());
    for (const auto& c : children) v = v.cwiseProduct(A * c.phi(A));
    return v;
  }
};

inline void grow(const Tree& t, std::vector<Tree>& out) {
  Tree leaf_added = t;
  leaf_added.children.push_back(Tree{});
  out.push_back(leaf_added);
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    std::vector<Tree> grown;
    grow(t.children[i], grown);
    for (auto& g : grown) {
      Tree copy = t;
      copy.children[i] = std::move(g);
      out.push_back(std::move(copy));
    }
  }
}

/// All rooted trees of order 1..max_order, deduplicated.
inline std::vector<Tree> trees_up_to(int max_order) {
  std::vector<Tree> all{Tree{}};
  std::vector<Tree> frontier{Tree{}};
  for (int n = 2; n <= max_order; ++n) {
    std::set<std::string> seen;
    std::vector<Tree> next;
    for (const auto& t : frontier) {
      std::vector<Tree> grown;
      grow(t, grown);
      for (auto& g : grown) {
        if (seen.insert(g.key()).second) next.push_back(std::move(g));
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return all;
}

/// Order by direct tree-condition evaluation.
inline int order_of(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, double tol = 1e-12) {
  int q = 0;
  const auto trees = trees_up_to(5);
  for (int n = 1; n <= 5; ++n) {
    for (const auto& t : trees) {
      if (t.order() != n) continue;
      if (std::abs(w.dot(t.phi(A)) - 1.0 / static_cast<double>(t.density())) > tol) return q;
    }
    q = n;
  }
  return q;
}

/// SSP conditions through a dense solve with the bordered
/// matrix K = [A 0; w^T 0].
inline bool ssp_holds(const Eigen::MatrixXd& A, const Eigen::VectorXd& w, double r) {
  const auto s = A.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(s + 1, s + 1);
  K.topLeftCorner(s, s) = A;
  K.block(s, 0, 1, s) = w.transpose();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(s + 1, s + 1);
  const Eigen::MatrixXd inv = (I + r * K).partialPivLu().solve(I);
  const Eigen::MatrixXd M = K * inv;
  if (M.minCoeff() < -1e-10) return false;
  const Eigen::VectorXd row = r * M * Eigen::VectorXd::Ones(s + 1);
  return row.maxCoeff() <= 1.0 + 1e-10;
}

inline double ssp_coefficient(const Eigen::MatrixXd& A, const Eigen::VectorXd& w) {
  if (!ssp_holds(A, w, 0.0)) return 0.0;
  double lo = 0.0;
  double hi = 2.0 * static_cast<double>(A.rows());
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (ssp_holds(A, w, mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Random strictly lower-triangular s x s matrix with entries in [0, 1).
inline Eigen::MatrixXd random_explicit(int s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(s, s);
  for (int i = 1; i < s; ++i)
    for (int j = 0; j < i; ++j) A(i, j) = u(rng);
  return A;
}

/// Classical four-stage fourth-order method.
inline Eigen::MatrixXd rk4_A() {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
  A(1, 0) = 0.5;
  A(2, 1) = 0.5;
  A(3, 2) = 1.0;
  return A;
}

inline Eigen::VectorXd rk4_b() {
  Eigen::VectorXd b(4);
  b << 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0;
  return b;
}

/// Real-axis stability limit of the s-stage second-order SSP method, whose
/// stability function is 1/s + (s-1)/s (1 + z/(s-1))^s.
inline double ssp_s2_delta_R(int s) {
  const double m = s - 1.0;
  if (s % 2 == 0) return 2.0 * m;
  return m * (1.0 + std::pow((s + 1.0) / m, 1.0 / s));
}

}  // namespace oracle
