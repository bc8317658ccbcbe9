#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "g2flow/errors.hpp"

namespace g2flow {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Sorted multi-index stored as a bitmask; bit (i-1) set means index i present.
using Mask = std::uint8_t;

constexpr int kMaxDim = 7;

/// Basis monomials of Λ^k(R^n) in lexicographic order of their index tuples.
const std::vector<Mask>& basis_masks(int n, int k);
/// Position of a mask inside basis_masks(n, popcount(mask)).
int mask_rank(int n, Mask m);
int binomial(int n, int k);

std::vector<int> mask_indices(Mask m);
Mask mask_from_indices(const std::vector<int>& idx);
std::string mask_string(Mask m);
/// Parses "127" into a mask; rejects repeats, unsorted input is sorted with its sign.
std::pair<Mask, int> mask_parse(std::string_view digits, int n);

/// Sign of e^I ∧ e^J relative to e^{I∪J}; zero when I and J overlap.
int wedge_sign(Mask a, Mask b);

/// Alternating k-form on R^n with dense coefficients ordered like basis_masks(n, k).
class KForm {
 public:
  KForm() = default;
  KForm(int dim, int degree);
  KForm(int dim, int degree, Vec coeffs);

  static KForm monomial(int dim, const std::vector<int>& indices, double c = 1.0);
  /// Parses sums like "e127 + e347 - 2*e146" or "-0.5e12".
  static KForm parse(int dim, std::string_view expr);
  static KForm scalar(int dim, double c);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(c_.size()); }

  double coeff(Mask m) const;
  double coeff(std::string_view digits) const;
  void set(Mask m, double v);
  void add(Mask m, double v);

  const Vec& coeffs() const { return c_; }
  Vec& coeffs() { return c_; }
  Mask mask_at(int rank) const { return basis_masks(dim_, degree_)[rank]; }

  /// Non-zero terms in lexicographic order.
  std::vector<std::pair<Mask, double>> terms() const;
  /// Coefficient of e^{1..n}; only meaningful when degree == dim.
  double top() const;
  double max_abs() const;
  double norm() const { return c_.norm(); }
  bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }
  std::string to_string() const;

  KForm& operator+=(const KForm& o);
  KForm& operator-=(const KForm& o);
  KForm& operator*=(double s);

 private:
  int dim_ = 0;
  int degree_ = 0;
  Vec c_;
};

KForm operator+(KForm a, const KForm& b);
KForm operator-(KForm a, const KForm& b);
KForm operator-(KForm a);
KForm operator*(double s, KForm a);
KForm operator*(KForm a, double s);

KForm wedge(const KForm& a, const KForm& b);
/// Interior product into the first slot.
KForm contract(const Vec& v, const KForm& a);
KForm contract_basis(int i, const KForm& a);
/// ϑ(A): minus-transpose on 1-forms, extended as a derivation.
KForm theta_action(const Mat& A, const KForm& a);
/// Matrix of ϑ(A) on Λ^k in basis_masks order.
Mat theta_matrix(const Mat& A, int k);
/// (P*a)(x1..xk) = a(Px1..Pxk).
KForm pullback(const Mat& P, const KForm& a);
/// k-th compound matrix: entry (I,J) = det P[I,J].
Mat compound(const Mat& P, int k);
/// Gram matrix of Λ^k under the metric g.
Mat gram(const Mat& g, int k);
double form_inner_product(const Mat& g, const KForm& a, const KForm& b);
/// Defined by b ∧ ⋆a = <a,b> vol; vol must have unit g-norm.
KForm hodge_star(const Mat& g, const KForm& vol, const KForm& a);
KForm volume_form(const Mat& g, int orientation = 1);

/// Dimension change helpers between R^6 (h) and R^7 = h ⊕ R e7.
KForm lift7(const KForm& a6);
KForm restrict6(const KForm& a7);
KForm eta7();

void require_positive_definite(const Mat& g, double rel_tol = 1e-9);
/// Commutator AB - BA.
inline Mat bracket(const Mat& A, const Mat& B) { return A * B - B * A; }

}  // namespace g2flow
