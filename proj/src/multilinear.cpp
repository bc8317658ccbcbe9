#include "g2flow/multilinear.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace g2flow {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegreeError: return "DegreeError";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::VolumeMismatch: return "VolumeMismatch";
    case ErrorCode::NotStable: return "NotStable";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::NotNegative: return "NotNegative";
    case ErrorCode::NotCompatible: return "NotCompatible";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::DegenerateOmega: return "DegenerateOmega";
    case ErrorCode::FrameNotAdapted: return "FrameNotAdapted";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::NotInSp: return "NotInSp";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::IdentityViolation: return "IdentityViolation";
    case ErrorCode::ZeroBracket: return "ZeroBracket";
    case ErrorCode::Parse: return "ParseError";
  }
  return "Error";
}

namespace {

struct Tables {
  // masks[n][k], rank[n][mask]
  std::array<std::array<std::vector<Mask>, kMaxDim + 1>, kMaxDim + 1> masks;
  std::array<std::array<int, 1 << kMaxDim>, kMaxDim + 1> rank{};

  Tables() {
    for (int n = 0; n <= kMaxDim; ++n) {
      for (int k = 0; k <= n; ++k) {
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i + 1;
        while (true) {
          masks[n][k].push_back(mask_from_indices(idx));
          int p = k - 1;
          while (p >= 0 && idx[p] == n - k + p + 1) --p;
          if (p < 0) break;
          ++idx[p];
          for (int q = p + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
        }
        for (std::size_t r = 0; r < masks[n][k].size(); ++r) rank[n][masks[n][k][r]] = static_cast<int>(r);
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

void check_dim(int n) {
  if (n < 0 || n > kMaxDim) throw Error(ErrorCode::DimensionMismatch, "dimension out of range");
}

// number of set bits of m strictly between positions lo and hi (1-based, exclusive)
int bits_between(Mask m, int lo, int hi) {
  if (lo > hi) std::swap(lo, hi);
  if (hi - lo <= 1) return 0;
  unsigned window = ((1u << (hi - 1)) - 1u) & ~((1u << lo) - 1u);
  return std::popcount(static_cast<unsigned>(m) & window);
}

}  // namespace

const std::vector<Mask>& basis_masks(int n, int k) {
  check_dim(n);
  if (k < 0 || k > n) throw Error(ErrorCode::DegreeError, "degree out of range");
  return tables().masks[n][k];
}

int mask_rank(int n, Mask m) {
  check_dim(n);
  return tables().rank[n][m];
}

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  return static_cast<int>(basis_masks(n, k).size());
}

std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  for (int i = 0; i < kMaxDim; ++i)
    if (m & (1u << i)) out.push_back(i + 1);
  return out;
}

Mask mask_from_indices(const std::vector<int>& idx) {
  unsigned m = 0;
  for (int i : idx) m |= 1u << (i - 1);
  return static_cast<Mask>(m);
}

std::string mask_string(Mask m) {
  std::string s;
  for (int i : mask_indices(m)) s += static_cast<char>('0' + i);
  return s;
}

std::pair<Mask, int> mask_parse(std::string_view digits, int n) {
  unsigned m = 0;
  int sign = 1;
  for (char ch : digits) {
    if (ch < '1' || ch > '0' + n) throw Error(ErrorCode::Parse, "bad index digit in '" + std::string(digits) + "'");
    int i = ch - '0';
    if (m & (1u << (i - 1))) throw Error(ErrorCode::Parse, "repeated index in '" + std::string(digits) + "'");
    // moving i left past larger indices already present
    if (std::popcount(m >> i) % 2) sign = -sign;
    m |= 1u << (i - 1);
  }
  return {static_cast<Mask>(m), sign};
}

int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int swaps = 0;
  for (int j = 0; j < kMaxDim; ++j)
    if (b & (1u << j)) swaps += std::popcount(static_cast<unsigned>(a) >> (j + 1));
  return swaps % 2 ? -1 : 1;
}

KForm::KForm(int dim, int degree) : dim_(dim), degree_(degree) {
  check_dim(dim);
  c_ = Vec::Zero(binomial(dim, degree));
  if (degree < 0 || degree > dim) throw Error(ErrorCode::DegreeError, "degree out of range");
}

KForm::KForm(int dim, int degree, Vec coeffs) : KForm(dim, degree) {
  if (coeffs.size() != c_.size()) throw Error(ErrorCode::DimensionMismatch, "coefficient vector size");
  c_ = std::move(coeffs);
}

KForm KForm::monomial(int dim, const std::vector<int>& indices, double c) {
  KForm f(dim, static_cast<int>(indices.size()));
  std::string digits;
  for (int i : indices) {
    if (i < 1 || i > dim) throw Error(ErrorCode::DimensionMismatch, "index out of range");
    digits += static_cast<char>('0' + i);
  }
  auto [m, sign] = mask_parse(digits, dim);
  f.set(m, sign * c);
  return f;
}

KForm KForm::scalar(int dim, double c) {
  KForm f(dim, 0);
  f.c_[0] = c;
  return f;
}

KForm KForm::parse(int dim, std::string_view expr) {
  std::size_t i = 0;
  auto skip = [&] {
    while (i < expr.size() && std::isspace(static_cast<unsigned char>(expr[i]))) ++i;
  };
  KForm out;
  bool have = false;
  skip();
  while (i < expr.size()) {
    double sign = 1.0;
    if (expr[i] == '+' || expr[i] == '-') {
      if (expr[i] == '-') sign = -1.0;
      ++i;
      skip();
    } else if (have) {
      throw Error(ErrorCode::Parse, "expected + or - in '" + std::string(expr) + "'");
    }
    double coef = 1.0;
    if (i < expr.size() && (std::isdigit(static_cast<unsigned char>(expr[i])) || expr[i] == '.')) {
      std::string num;
      while (i < expr.size() && (std::isdigit(static_cast<unsigned char>(expr[i])) || expr[i] == '.' ||
                                 expr[i] == '/'))
        num += expr[i++];
      auto slash = num.find('/');
      if (slash == std::string::npos) {
        coef = std::strtod(num.c_str(), nullptr);
      } else {
        coef = std::strtod(num.substr(0, slash).c_str(), nullptr) / std::strtod(num.substr(slash + 1).c_str(), nullptr);
      }
      skip();
      if (i < expr.size() && expr[i] == '*') ++i;
      skip();
    }
    if (i >= expr.size() || expr[i] != 'e') throw Error(ErrorCode::Parse, "expected monomial in '" + std::string(expr) + "'");
    ++i;
    std::size_t start = i;
    while (i < expr.size() && std::isdigit(static_cast<unsigned char>(expr[i]))) ++i;
    auto [m, s] = mask_parse(expr.substr(start, i - start), dim);
    int deg = std::popcount(static_cast<unsigned>(m));
    if (!have) {
      out = KForm(dim, deg);
      have = true;
    } else if (deg != out.degree()) {
      throw Error(ErrorCode::Parse, "mixed degrees in '" + std::string(expr) + "'");
    }
    out.add(m, sign * coef * s);
    skip();
  }
  if (!have) throw Error(ErrorCode::Parse, "empty form expression");
  return out;
}

double KForm::coeff(Mask m) const {
  if (std::popcount(static_cast<unsigned>(m)) != degree_) return 0.0;
  return c_[mask_rank(dim_, m)];
}

double KForm::coeff(std::string_view digits) const {
  auto [m, s] = mask_parse(digits, dim_);
  return s * coeff(m);
}

void KForm::set(Mask m, double v) {
  if (std::popcount(static_cast<unsigned>(m)) != degree_ || (m >> dim_))
    throw Error(ErrorCode::DegreeError, "mask does not match form");
  c_[mask_rank(dim_, m)] = v;
}

void KForm::add(Mask m, double v) { set(m, coeff(m) + v); }

std::vector<std::pair<Mask, double>> KForm::terms() const {
  std::vector<std::pair<Mask, double>> out;
  const auto& ms = basis_masks(dim_, degree_);
  for (int r = 0; r < size(); ++r)
    if (c_[r] != 0.0) out.emplace_back(ms[r], c_[r]);
  return out;
}

double KForm::top() const {
  if (degree_ != dim_) throw Error(ErrorCode::DegreeError, "top() needs a form of top degree");
  return c_[0];
}

double KForm::max_abs() const { return c_.size() ? c_.cwiseAbs().maxCoeff() : 0.0; }

std::string KForm::to_string() const {
  std::string s;
  char buf[64];
  for (auto [m, v] : terms()) {
    std::snprintf(buf, sizeof buf, "%s%.17g*e%s", v < 0 ? " - " : (s.empty() ? "" : " + "), std::fabs(v),
                  mask_string(m).c_str());
    s += buf;
  }
  return s.empty() ? "0" : s;
}

static void same_shape(const KForm& a, const KForm& b) {
  if (a.dim() != b.dim() || a.degree() != b.degree())
    throw Error(ErrorCode::DimensionMismatch, "forms of different shape");
}

KForm& KForm::operator+=(const KForm& o) {
  same_shape(*this, o);
  c_ += o.c_;
  return *this;
}

KForm& KForm::operator-=(const KForm& o) {
  same_shape(*this, o);
  c_ -= o.c_;
  return *this;
}

KForm& KForm::operator*=(double s) {
  c_ *= s;
  return *this;
}

KForm operator+(KForm a, const KForm& b) { return a += b; }
KForm operator-(KForm a, const KForm& b) { return a -= b; }
KForm operator-(KForm a) { return a *= -1.0; }
KForm operator*(double s, KForm a) { return a *= s; }
KForm operator*(KForm a, double s) { return a *= s; }

KForm wedge(const KForm& a, const KForm& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "wedge of forms on different spaces");
  int n = a.dim();
  int k = a.degree() + b.degree();
  if (k > n) return KForm(n, n);  // zero top form stands in for the overflow
  KForm out(n, k);
  for (auto [ma, va] : a.terms())
    for (auto [mb, vb] : b.terms()) {
      int s = wedge_sign(ma, mb);
      if (s) out.coeffs()[mask_rank(n, ma | mb)] += s * va * vb;
    }
  return out;
}

KForm contract(const Vec& v, const KForm& a) {
  if (v.size() != a.dim()) throw Error(ErrorCode::DimensionMismatch, "vector and form dimensions differ");
  if (a.degree() < 1) throw Error(ErrorCode::DegreeError, "contraction of a 0-form");
  int n = a.dim();
  KForm out(n, a.degree() - 1);
  for (auto [m, c] : a.terms()) {
    int p = 0;
    for (int i : mask_indices(m)) {
      double s = (p % 2) ? -1.0 : 1.0;
      out.coeffs()[mask_rank(n, m & ~(1u << (i - 1)))] += s * v[i - 1] * c;
      ++p;
    }
  }
  return out;
}

KForm contract_basis(int i, const KForm& a) {
  Vec v = Vec::Zero(a.dim());
  v[i - 1] = 1.0;
  return contract(v, a);
}

KForm theta_action(const Mat& A, const KForm& a) {
  int n = a.dim();
  if (A.rows() != n || A.cols() != n) throw Error(ErrorCode::DimensionMismatch, "endomorphism and form dimensions differ");
  KForm out(n, a.degree());
  for (auto [m, c] : a.terms()) {
    for (int i : mask_indices(m)) {
      Mask rest = m & ~(1u << (i - 1));
      for (int l = 1; l <= n; ++l) {
        double x = A(i - 1, l - 1);
        if (x == 0.0 || (rest & (1u << (l - 1)))) continue;
        double s = bits_between(rest, i, l) % 2 ? -1.0 : 1.0;
        out.coeffs()[mask_rank(n, rest | (1u << (l - 1)))] -= s * x * c;
      }
    }
  }
  return out;
}

Mat theta_matrix(const Mat& A, int k) {
  int n = static_cast<int>(A.rows());
  int N = binomial(n, k);
  Mat T(N, N);
  for (int r = 0; r < N; ++r) {
    KForm e(n, k);
    e.coeffs()[r] = 1.0;
    T.col(r) = theta_action(A, e).coeffs();
  }
  return T;
}

Mat compound(const Mat& P, int k) {
  int n = static_cast<int>(P.rows());
  if (P.cols() != n) throw Error(ErrorCode::DimensionMismatch, "compound of a non-square matrix");
  const auto& ms = basis_masks(n, k);
  int N = static_cast<int>(ms.size());
  Mat C(N, N);
  if (k == 0) {
    C(0, 0) = 1.0;
    return C;
  }
  std::vector<std::vector<int>> idx(N);
  for (int r = 0; r < N; ++r) idx[r] = mask_indices(ms[r]);
  Mat sub(k, k);
  for (int I = 0; I < N; ++I)
    for (int J = 0; J < N; ++J) {
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) sub(a, b) = P(idx[I][a] - 1, idx[J][b] - 1);
      C(I, J) = k == 1 ? sub(0, 0) : sub.determinant();
    }
  return C;
}

KForm pullback(const Mat& P, const KForm& a) {
  int n = a.dim();
  if (P.rows() != n || P.cols() != n) throw Error(ErrorCode::DimensionMismatch, "pullback matrix dimension");
  // compare against the Hadamard bound so badly scaled but invertible P pass
  double hadamard = 1.0;
  for (int j = 0; j < n; ++j) hadamard *= P.col(j).norm();
  if (!(std::fabs(P.determinant()) > 1e-14 * hadamard)) throw Error(ErrorCode::SingularMatrix, "pullback by a singular matrix");
  return KForm(n, a.degree(), compound(P, a.degree()).transpose() * a.coeffs());
}

void require_positive_definite(const Mat& g, double rel_tol) {
  if (g.rows() != g.cols()) throw Error(ErrorCode::DimensionMismatch, "metric is not square");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::NotPositiveDefinite, "metric is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  Vec ev = es.eigenvalues();
  if (!(ev.maxCoeff() > 0.0) || ev.minCoeff() <= rel_tol * ev.maxCoeff())
    throw Error(ErrorCode::NotPositiveDefinite, "metric has a non-positive eigenvalue");
}

Mat gram(const Mat& g, int k) {
  require_positive_definite(g);
  return compound(g.inverse(), k);
}

double form_inner_product(const Mat& g, const KForm& a, const KForm& b) {
  same_shape(a, b);
  if (g.rows() != a.dim()) throw Error(ErrorCode::DimensionMismatch, "metric dimension");
  return a.coeffs().dot(gram(g, a.degree()) * b.coeffs());
}

KForm volume_form(const Mat& g, int orientation) {
  require_positive_definite(g);
  int n = static_cast<int>(g.rows());
  return KForm(n, n, Vec::Constant(1, orientation * std::sqrt(g.determinant())));
}

KForm hodge_star(const Mat& g, const KForm& vol, const KForm& a) {
  int n = a.dim();
  if (vol.dim() != n || vol.degree() != n || g.rows() != n) throw Error(ErrorCode::DimensionMismatch, "hodge star inputs");
  Mat G = gram(g, a.degree());
  double v = vol.top();
  double vn = v * v * g.inverse().determinant();
  if (std::fabs(vn - 1.0) > 1e-9) throw Error(ErrorCode::VolumeMismatch, "volume form does not have unit norm");
  Vec Ga = G * a.coeffs();
  KForm out(n, n - a.degree());
  const auto& ms = basis_masks(n, a.degree());
  Mask full = static_cast<Mask>((1u << n) - 1u);
  for (std::size_t r = 0; r < ms.size(); ++r) {
    Mask comp = full & ~ms[r];
    out.coeffs()[mask_rank(n, comp)] = v * wedge_sign(ms[r], comp) * Ga[r];
  }
  return out;
}

KForm lift7(const KForm& a6) {
  if (a6.dim() != 6) throw Error(ErrorCode::DimensionMismatch, "lift7 expects a form on R^6");
  KForm out(7, a6.degree());
  for (auto [m, c] : a6.terms()) out.set(m, c);
  return out;
}

KForm restrict6(const KForm& a7) {
  if (a7.dim() != 7) throw Error(ErrorCode::DimensionMismatch, "restrict6 expects a form on R^7");
  if (a7.degree() > 6) throw Error(ErrorCode::DegreeError, "no degree-7 forms on R^6");
  KForm out(6, a7.degree());
  for (auto [m, c] : a7.terms())
    if (!(m & 0x40)) out.set(m, c);
  return out;
}

KForm eta7() { return KForm::monomial(7, {7}); }

}  // namespace g2flow
