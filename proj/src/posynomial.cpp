#include "sinrgp/posynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sinrgp {

namespace {

void canonicalize(std::vector<Monomial::Exponent>& exps) {
  std::sort(exps.begin(), exps.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Monomial::Exponent> merged;
  merged.reserve(exps.size());
  for (const auto& e : exps) {
    if (!merged.empty() && merged.back().first == e.first) {
      merged.back().second += e.second;
    } else {
      merged.push_back(e);
    }
  }
  std::erase_if(merged, [](const auto& e) { return e.second == 0.0; });
  exps = std::move(merged);
}

double checked_entry(std::span<const double> x, VarId var) {
  if (var.index >= x.size()) {
    throw DomainError("variable x" + std::to_string(var.index) +
                      " has no entry in the evaluation point");
  }
  const double v = x[var.index];
  if (!(v > 0.0)) {
    throw DomainError("variable x" + std::to_string(var.index) +
                      " must be strictly positive");
  }
  return v;
}

bool powers_less(const Monomial& a, const Monomial& b) {
  const auto ea = a.exponents();
  const auto eb = b.exponents();
  return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
}

std::vector<Monomial> merge_like_terms(std::vector<Monomial> terms) {
  std::stable_sort(terms.begin(), terms.end(), powers_less);
  std::vector<Monomial> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && out.back().same_powers(t)) {
      out.back() = Monomial(out.back().coefficient() + t.coefficient(),
                            {out.back().exponents().begin(), out.back().exponents().end()});
    } else {
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace

TermCapExceeded::TermCapExceeded(std::size_t requested, std::size_t cap)
    : std::length_error("posynomial product needs " + std::to_string(requested) +
                        " terms, cap is " + std::to_string(cap)),
      requested_(requested),
      cap_(cap) {}

Monomial::Monomial(double coefficient, std::vector<Exponent> exponents)
    : coefficient_(coefficient), exponents_(std::move(exponents)) {
  if (!(coefficient_ > 0.0) || !std::isfinite(coefficient_)) {
    throw std::invalid_argument("monomial coefficient must be positive and finite");
  }
  for (const auto& e : exponents_) {
    if (!std::isfinite(e.second)) {
      throw std::invalid_argument("monomial exponent must be finite");
    }
  }
  canonicalize(exponents_);
}

Monomial Monomial::variable(VarId var, double power, double coefficient) {
  return Monomial(coefficient, {{var, power}});
}

double Monomial::exponent_of(VarId var) const noexcept {
  auto it = std::lower_bound(exponents_.begin(), exponents_.end(), var,
                             [](const Exponent& e, VarId v) { return e.first < v; });
  return (it != exponents_.end() && it->first == var) ? it->second : 0.0;
}

double Monomial::eval(std::span<const double> x) const {
  double value = coefficient_;
  for (const auto& [var, power] : exponents_) {
    value *= std::pow(checked_entry(x, var), power);
  }
  return value;
}

double Monomial::log_eval(std::span<const double> x) const {
  double value = std::log(coefficient_);
  for (const auto& [var, power] : exponents_) {
    value += power * std::log(checked_entry(x, var));
  }
  return value;
}

Monomial Monomial::pow(double power) const {
  std::vector<Exponent> exps(exponents_);
  for (auto& e : exps) e.second *= power;
  return Monomial(std::pow(coefficient_, power), std::move(exps));
}

Monomial Monomial::scaled(double factor) const {
  return Monomial(coefficient_ * factor, exponents_);
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  std::vector<Monomial::Exponent> exps(a.exponents_);
  exps.insert(exps.end(), b.exponents_.begin(), b.exponents_.end());
  return Monomial(a.coefficient_ * b.coefficient_, std::move(exps));
}

Monomial operator/(const Monomial& a, const Monomial& b) { return a * b.pow(-1.0); }

Posynomial::Posynomial(Monomial term) : terms_{std::move(term)} {}

Posynomial::Posynomial(std::vector<Monomial> terms) : terms_(merge_like_terms(std::move(terms))) {
  if (terms_.empty()) {
    throw std::invalid_argument("posynomial needs at least one term");
  }
}

double Posynomial::eval(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.eval(x);
  return sum;
}

std::uint32_t Posynomial::var_span() const noexcept {
  std::uint32_t span = 0;
  for (const auto& t : terms_) {
    if (!t.is_constant()) span = std::max(span, t.exponents().back().first.index + 1);
  }
  return span;
}

Posynomial operator+(const Posynomial& a, const Posynomial& b) {
  std::vector<Monomial> terms(a.terms_);
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return Posynomial(std::move(terms));
}

Posynomial operator*(const Posynomial& p, const Monomial& m) {
  std::vector<Monomial> terms;
  terms.reserve(p.size());
  for (const auto& t : p.terms_) terms.push_back(t * m);
  return Posynomial(std::move(terms));
}

double mono_eval(const Monomial& m, std::span<const double> x) { return m.eval(x); }

double posy_eval(const Posynomial& p, std::span<const double> x) { return p.eval(x); }

Posynomial posy_mul(const Posynomial& p, const Posynomial& q, std::size_t term_cap) {
  const Posynomial factors[] = {p, q};
  return posy_product(factors, term_cap);
}

Posynomial posy_product(std::span<const Posynomial> factors, std::size_t term_cap) {
  if (factors.empty()) return Posynomial(Monomial{});
  std::size_t bound = 1;
  for (const auto& f : factors) {
    if (f.size() > term_cap / bound) {
      // Saturate rather than overflow; the exact figure is not meaningful past the cap.
      const std::size_t requested =
          bound > SIZE_MAX / f.size() ? SIZE_MAX : bound * f.size();
      throw TermCapExceeded(requested, term_cap);
    }
    bound *= f.size();
  }
  std::vector<Monomial> acc(factors.front().terms().begin(), factors.front().terms().end());
  for (std::size_t k = 1; k < factors.size(); ++k) {
    std::vector<Monomial> next;
    next.reserve(acc.size() * factors[k].size());
    for (const auto& a : acc) {
      for (const auto& b : factors[k].terms()) next.push_back(a * b);
    }
    acc = merge_like_terms(std::move(next));
  }
  return Posynomial(std::move(acc));
}

std::string to_string(const Monomial& m) {
  std::ostringstream os;
  os.precision(17);
  os << m.coefficient();
  for (const auto& [var, power] : m.exponents()) {
    os << "*x" << var.index;
    if (power != 1.0) os << "^" << power;
  }
  return os.str();
}

std::string to_string(const Posynomial& p) {
  std::string out;
  for (const auto& t : p.terms()) {
    if (!out.empty()) out += " + ";
    out += to_string(t);
  }
  return out;
}

}  // namespace sinrgp
