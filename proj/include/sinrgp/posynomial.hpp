#pragma once

// Monomials and posynomials over strictly positive real variables.
//
// A monomial is c * prod_k x_k^{a_k} with c > 0 and real exponents a_k.
// A posynomial is a non-empty sum of monomials. Both are immutable values;
// every constructor canonicalizes (exponents sorted by variable id, zero
// exponents dropped, like terms merged).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sinrgp {

/// Dense integer handle of a GP variable.
struct VarId {
  std::uint32_t index = 0;

  constexpr auto operator<=>(const VarId&) const = default;
};

/// Thrown when an evaluation point is missing a variable or has a
/// non-positive entry.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when a posynomial product would exceed the configured term cap.
class TermCapExceeded : public std::length_error {
 public:
  TermCapExceeded(std::size_t requested, std::size_t cap);

  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

inline constexpr std::size_t kDefaultTermCap = std::size_t{1} << 20;

class Monomial {
 public:
  using Exponent = std::pair<VarId, double>;

  /// Constant monomial 1.
  Monomial() = default;
  Monomial(double coefficient, std::vector<Exponent> exponents);
  Monomial(double coefficient, std::initializer_list<Exponent> exponents)
      : Monomial(coefficient, std::vector<Exponent>(exponents)) {}

  /// c * x^power
  static Monomial variable(VarId var, double power = 1.0, double coefficient = 1.0);
  static Monomial constant(double coefficient) { return Monomial(coefficient, {}); }

  double coefficient() const noexcept { return coefficient_; }
  /// Sorted by variable id, no zero entries.
  std::span<const Exponent> exponents() const noexcept { return exponents_; }
  double exponent_of(VarId var) const noexcept;
  bool is_constant() const noexcept { return exponents_.empty(); }

  /// c * prod x_k^{a_k}; `x` is indexed by VarId::index.
  double eval(std::span<const double> x) const;
  /// log c + sum a_k log x_k, computed without forming the product.
  double log_eval(std::span<const double> x) const;

  Monomial pow(double power) const;
  Monomial scaled(double factor) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend Monomial operator/(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial&, const Monomial&) = default;

  /// True when both monomials carry bitwise-equal exponent lists.
  bool same_powers(const Monomial& other) const noexcept { return exponents_ == other.exponents_; }

 private:
  double coefficient_ = 1.0;
  std::vector<Exponent> exponents_;
};

class Posynomial {
 public:
  explicit Posynomial(Monomial term);
  explicit Posynomial(std::vector<Monomial> terms);
  Posynomial(std::initializer_list<Monomial> terms)
      : Posynomial(std::vector<Monomial>(terms)) {}

  std::span<const Monomial> terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_monomial() const noexcept { return terms_.size() == 1; }

  double eval(std::span<const double> x) const;

  /// Returns a canonical copy; idempotent. The constructor already produces
  /// canonical form, so this is mostly useful in tests.
  Posynomial canonical() const { return Posynomial(terms_); }

  /// Largest variable index referenced plus one (0 for a constant).
  std::uint32_t var_span() const noexcept;

  friend Posynomial operator+(const Posynomial& a, const Posynomial& b);
  friend Posynomial operator*(const Posynomial& p, const Monomial& m);
  friend bool operator==(const Posynomial&, const Posynomial&) = default;

 private:
  std::vector<Monomial> terms_;
};

double mono_eval(const Monomial& m, std::span<const double> x);
double posy_eval(const Posynomial& p, std::span<const double> x);

/// Distributed product with like-term merging. Throws TermCapExceeded when
/// |p| * |q| exceeds `term_cap`, before any term is formed.
Posynomial posy_mul(const Posynomial& p, const Posynomial& q,
                    std::size_t term_cap = kDefaultTermCap);

/// Product of all factors. The pre-merge term count (product of factor sizes)
/// is checked against `term_cap` up front.
Posynomial posy_product(std::span<const Posynomial> factors,
                        std::size_t term_cap = kDefaultTermCap);

std::string to_string(const Monomial& m);
std::string to_string(const Posynomial& p);

}  // namespace sinrgp
