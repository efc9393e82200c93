#ifndef SOSALMOST_POLY_HPP
#define SOSALMOST_POLY_HPP

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosalmost {

// A monomial x^alpha is its exponent multi-index.
using Monomial = std::vector<int>;

int total_degree(const Monomial& alpha);

// Graded order: lower total degree first; within a degree, lexicographically
// larger exponent vector first, so that for n=2 the degree-2 block reads
// x1^2, x1*x2, x2^2.
struct GradedOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

std::int64_t binomial(int n, int k);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Sparse real polynomial in n variables. Exact-zero coefficients are never
// stored, so term counts and equality are canonical. Values are immutable
// after construction; all operations return new polynomials.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GradedOrder>;

  explicit Polynomial(int dimension);
  Polynomial(int dimension, TermMap terms);

  static Polynomial zero(int dimension) { return Polynomial(dimension); }
  static Polynomial constant(int dimension, double c);
  static Polynomial variable(int dimension, int index);  // 1-based index
  static Polynomial monomial(int dimension, Monomial alpha, double coeff);

  // Grammar: term ::= [sign] [coeff '*'] factor*, factor ::= 'x'INT['^'INT],
  // whitespace ignored. Throws ParseError with a byte position.
  static Polynomial parse(const std::string& text, int dimension);
  std::string format() const;

  int dimension() const { return dimension_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  double coefficient(const Monomial& alpha) const;
  double evaluate(std::span<const double> x) const;
  double l1_norm() const;

  Polynomial operator+(const Polynomial& rhs) const;
  Polynomial operator-(const Polynomial& rhs) const;
  Polynomial operator*(const Polynomial& rhs) const;
  Polynomial operator*(double c) const;
  Polynomial operator-() const;
  Polynomial squared() const { return (*this) * (*this); }

  // Formal partial derivative with respect to x_i (1-based).
  Polynomial partial(int i) const;

  bool operator==(const Polynomial& rhs) const;

 private:
  void check_same_dimension(const Polynomial& rhs) const;

  int dimension_;
  TermMap terms_;
};

inline Polynomial operator*(double c, const Polynomial& p) { return p * c; }

// Ordered canonical basis of all monomials with |alpha| <= r.
class MonomialBasis {
 public:
  MonomialBasis(int dimension, int order);

  int dimension() const { return dimension_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(monomials_.size()); }
  const Monomial& operator[](int i) const { return monomials_[i]; }
  const std::vector<Monomial>& monomials() const { return monomials_; }

  // Position of alpha in the basis; -1 if |alpha| > order.
  int index_of(const Monomial& alpha) const;

  // Polynomial for the i-th basis element with unit coefficient.
  Polynomial element(int i) const;

 private:
  int dimension_;
  int order_;
  std::vector<Monomial> monomials_;
};

// 1/k! as a double; single shared definition so every user of the
// perturbation weights agrees bitwise.
double inv_factorial(int k);

// Theta_r(x) = sum_{k=0..r} sum_{j=1..n} x_j^{2k}/k!; the k=0 term is the
// constant n. r is capped at 20 to keep 1/k! well above underflow.
Polynomial perturbation_series(int dimension, int r);

inline constexpr int kMaxPerturbationOrder = 20;

}  // namespace sosalmost

#endif  // SOSALMOST_POLY_HPP
