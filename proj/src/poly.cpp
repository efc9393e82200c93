#include "poly.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

namespace sosalmost {

int total_degree(const Monomial& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

bool GradedOrder::operator()(const Monomial& a, const Monomial& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

ParseError::ParseError(std::string message, std::size_t position)
    : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
      position_(position) {}

Polynomial::Polynomial(int dimension) : dimension_(dimension) {
  if (dimension < 1) throw std::invalid_argument("polynomial dimension must be >= 1");
}

Polynomial::Polynomial(int dimension, TermMap terms) : Polynomial(dimension) {
  for (auto it = terms.begin(); it != terms.end();) {
    if (static_cast<int>(it->first.size()) != dimension_) {
      throw std::invalid_argument("monomial length does not match dimension");
    }
    for (int e : it->first) {
      if (e < 0) throw std::invalid_argument("negative exponent");
    }
    if (it->second == 0.0) {
      it = terms.erase(it);
    } else {
      ++it;
    }
  }
  terms_ = std::move(terms);
}

Polynomial Polynomial::constant(int dimension, double c) {
  TermMap terms;
  if (c != 0.0) terms.emplace(Monomial(dimension, 0), c);
  return Polynomial(dimension, std::move(terms));
}

Polynomial Polynomial::variable(int dimension, int index) {
  Monomial alpha(dimension, 0);
  if (index < 1 || index > dimension) throw std::invalid_argument("variable index out of range");
  alpha[index - 1] = 1;
  return monomial(dimension, std::move(alpha), 1.0);
}

Polynomial Polynomial::monomial(int dimension, Monomial alpha, double coeff) {
  TermMap terms;
  if (coeff != 0.0) terms.emplace(std::move(alpha), coeff);
  return Polynomial(dimension, std::move(terms));
}

int Polynomial::degree() const {
  if (terms_.empty()) return 0;
  return total_degree(terms_.rbegin()->first);
}

double Polynomial::coefficient(const Monomial& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension_) {
    throw std::invalid_argument("evaluation point has wrong dimension");
  }
  double sum = 0.0;
  for (const auto& [alpha, coeff] : terms_) {
    double mono = 1.0;
    for (int i = 0; i < dimension_; ++i) {
      for (int e = 0; e < alpha[i]; ++e) mono *= x[i];
    }
    sum += coeff * mono;
  }
  return sum;
}

double Polynomial::l1_norm() const {
  double sum = 0.0;
  for (const auto& [alpha, coeff] : terms_) sum += std::abs(coeff);
  return sum;
}

void Polynomial::check_same_dimension(const Polynomial& rhs) const {
  if (dimension_ != rhs.dimension_) throw std::invalid_argument("polynomial dimension mismatch");
}

Polynomial Polynomial::operator+(const Polynomial& rhs) const {
  check_same_dimension(rhs);
  TermMap terms = terms_;
  for (const auto& [alpha, coeff] : rhs.terms_) {
    auto [it, inserted] = terms.emplace(alpha, coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second == 0.0) terms.erase(it);
    }
  }
  return Polynomial(dimension_, std::move(terms));
}

Polynomial Polynomial::operator-(const Polynomial& rhs) const { return *this + (-rhs); }

Polynomial Polynomial::operator-() const { return (*this) * -1.0; }

Polynomial Polynomial::operator*(double c) const {
  TermMap terms;
  if (c != 0.0) {
    for (const auto& [alpha, coeff] : terms_) terms.emplace(alpha, coeff * c);
  }
  return Polynomial(dimension_, std::move(terms));
}

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
  check_same_dimension(rhs);
  TermMap terms;
  for (const auto& [a, ca] : terms_) {
    for (const auto& [b, cb] : rhs.terms_) {
      Monomial sum(dimension_);
      for (int i = 0; i < dimension_; ++i) sum[i] = a[i] + b[i];
      auto [it, inserted] = terms.emplace(std::move(sum), ca * cb);
      if (!inserted) {
        it->second += ca * cb;
        if (it->second == 0.0) terms.erase(it);
      }
    }
  }
  return Polynomial(dimension_, std::move(terms));
}

Polynomial Polynomial::partial(int i) const {
  if (i < 1 || i > dimension_) throw std::invalid_argument("variable index out of range");
  TermMap terms;
  for (const auto& [alpha, coeff] : terms_) {
    const int e = alpha[i - 1];
    if (e == 0) continue;
    Monomial reduced = alpha;
    reduced[i - 1] = e - 1;
    terms.emplace(std::move(reduced), coeff * e);
  }
  return Polynomial(dimension_, std::move(terms));
}

bool Polynomial::operator==(const Polynomial& rhs) const {
  return dimension_ == rhs.dimension_ && terms_ == rhs.terms_;
}

namespace {

std::string format_coefficient(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
  }
  return std::string(buf, ptr);
}

class Scanner {
 public:
  explicit Scanner(const std::string& text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  void advance() { ++pos_; }
  std::size_t pos() const { return pos_; }

  int read_int() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start) throw ParseError("expected integer", start);
    int value = 0;
    auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc()) throw ParseError("integer out of range", start);
    return value;
  }

  double read_number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // bare 'e' is not an exponent
      }
    }
    if (pos_ == start) throw ParseError("expected number", start);
    double value = 0;
    std::string slice = text_.substr(start, pos_ - start);
    try {
      value = std::stod(slice);
    } catch (const std::exception&) {
      throw ParseError("malformed number '" + slice + "'", start);
    }
    return value;
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial Polynomial::parse(const std::string& text, int dimension) {
  if (dimension < 1) throw std::invalid_argument("polynomial dimension must be >= 1");
  Scanner scan(text);
  TermMap terms;
  bool first_term = true;

  while (!scan.done()) {
    double sign = 1.0;
    char c = scan.peek();
    if (c == '+' || c == '-') {
      sign = (c == '-') ? -1.0 : 1.0;
      scan.advance();
    } else if (!first_term) {
      throw ParseError("expected '+' or '-' between terms", scan.pos());
    }
    first_term = false;

    double coeff = sign;
    Monomial alpha(dimension, 0);
    bool saw_element = false;
    bool expect_element = true;  // after '*' another factor/number must follow

    while (true) {
      c = scan.peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        coeff *= scan.read_number();
        saw_element = true;
        expect_element = false;
      } else if (c == 'x' || c == 'X') {
        std::size_t at = scan.pos();
        scan.advance();
        int index = scan.read_int();
        if (index < 1 || index > dimension) {
          throw ParseError("variable index x" + std::to_string(index) + " out of range 1.." +
                               std::to_string(dimension),
                           at);
        }
        int exponent = 1;
        if (scan.peek() == '^') {
          scan.advance();
          exponent = scan.read_int();
        }
        alpha[index - 1] += exponent;
        saw_element = true;
        expect_element = false;
      } else if (c == '*') {
        if (!saw_element) throw ParseError("unexpected '*'", scan.pos());
        scan.advance();
        expect_element = true;
      } else {
        break;
      }
    }
    if (!saw_element) throw ParseError("empty term", scan.pos());
    if (expect_element) throw ParseError("dangling '*'", scan.pos());

    auto [it, inserted] = terms.emplace(std::move(alpha), coeff);
    if (!inserted) it->second += coeff;
  }

  for (auto it = terms.begin(); it != terms.end();) {
    it = (it->second == 0.0) ? terms.erase(it) : std::next(it);
  }
  return Polynomial(dimension, std::move(terms));
}

std::string Polynomial::format() const {
  if (terms_.empty()) return "0";
  std::string out;
  // Highest grade first, matching the usual way polynomials are written.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [alpha, coeff] = *it;
    const bool negative = coeff < 0;
    const double mag = std::abs(coeff);
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    const bool is_const = total_degree(alpha) == 0;
    if (mag != 1.0 || is_const) {
      out += format_coefficient(mag);
      if (!is_const) out += "*";
    }
    bool first_factor = true;
    for (int i = 0; i < dimension_; ++i) {
      if (alpha[i] == 0) continue;
      if (!first_factor) out += "*";
      first_factor = false;
      out += "x" + std::to_string(i + 1);
      if (alpha[i] > 1) out += "^" + std::to_string(alpha[i]);
    }
  }
  return out;
}

MonomialBasis::MonomialBasis(int dimension, int order) : dimension_(dimension), order_(order) {
  if (dimension < 1) throw std::invalid_argument("basis dimension must be >= 1");
  if (order < 0) throw std::invalid_argument("basis order must be >= 0");
  monomials_.reserve(static_cast<std::size_t>(binomial(dimension + order, dimension)));
  Monomial current(dimension, 0);
  std::function<void(int, int)> enumerate = [&](int var, int remaining) {
    if (var == dimension - 1) {
      for (int e = 0; e <= remaining; ++e) {
        current[var] = e;
        monomials_.push_back(current);
      }
      current[var] = 0;
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      current[var] = e;
      enumerate(var + 1, remaining - e);
    }
    current[var] = 0;
  };
  enumerate(0, order);
  std::sort(monomials_.begin(), monomials_.end(), GradedOrder{});
}

int MonomialBasis::index_of(const Monomial& alpha) const {
  auto it = std::lower_bound(monomials_.begin(), monomials_.end(), alpha, GradedOrder{});
  if (it == monomials_.end() || *it != alpha) return -1;
  return static_cast<int>(it - monomials_.begin());
}

Polynomial MonomialBasis::element(int i) const {
  return Polynomial::monomial(dimension_, monomials_.at(i), 1.0);
}

double inv_factorial(int k) {
  double value = 1.0;
  for (int i = 2; i <= k; ++i) value /= i;
  return value;
}

Polynomial perturbation_series(int dimension, int r) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  if (r < 0) throw std::invalid_argument("order must be >= 0");
  if (r > kMaxPerturbationOrder) {
    throw std::invalid_argument("perturbation order capped at " +
                                std::to_string(kMaxPerturbationOrder));
  }
  Polynomial::TermMap terms;
  terms.emplace(Monomial(dimension, 0), static_cast<double>(dimension));
  for (int k = 1; k <= r; ++k) {
    const double w = inv_factorial(k);
    for (int j = 0; j < dimension; ++j) {
      Monomial alpha(dimension, 0);
      alpha[j] = 2 * k;
      terms.emplace(std::move(alpha), w);
    }
  }
  return Polynomial(dimension, std::move(terms));
}

}  // namespace sosalmost
