#include "bhq/fockspace/operators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "bhq/common.hpp"

namespace bhq {
namespace {

using Triplet = SparseOperator::Triplet;

std::vector<std::pair<int, int>> bonds(int sites, bool periodic) {
  std::vector<std::pair<int, int>> out;
  for (int j = 0; j + 1 < sites; ++j) out.emplace_back(j, j + 1);
  if (periodic && sites > 2) out.emplace_back(sites - 1, 0);
  return out;
}

// Appends amplitude * a_to^+ a_from |state i> to the triplet list.
void add_hop(const FockBasis& basis, std::size_t i, int to, int from, Complex amplitude,
             std::vector<Occupation>& scratch, std::vector<Triplet>& triplets) {
  const auto state = basis.state(i);
  if (state[from] == 0) return;
  scratch.assign(state.begin(), state.end());
  const std::uint64_t product = static_cast<std::uint64_t>(scratch[to] + 1) * scratch[from];
  scratch[to] += 1;
  scratch[from] -= 1;
  const auto target = basis.index(scratch);
  triplets.emplace_back(static_cast<std::ptrdiff_t>(*target), static_cast<std::ptrdiff_t>(i),
                        amplitude * std::sqrt(static_cast<double>(product)));
}

SparseOperator diagonal_from(const FockBasis& basis,
                             const std::function<double(std::span<const Occupation>)>& f) {
  std::vector<double> values(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) values[i] = f(basis.state(i));
  return SparseOperator::diagonal(values);
}

void check_mode(const FockBasis& basis, int mode) {
  if (mode < 0 || mode >= basis.sites()) {
    throw DomainError("mode index " + std::to_string(mode) + " outside [0, " +
                      std::to_string(basis.sites() - 1) + "]");
  }
}

// ---------------------------------------------------------------------------
// Expression parser for operator_polynomial.

struct Node {
  enum class Kind { Number, Generator, Add, Sub, Mul, Div, Neg, Pow } kind;
  double number = 0.0;
  std::function<double(std::span<const Occupation>)> generator;
  int exponent = 0;
  std::unique_ptr<Node> lhs, rhs;

  double eval(std::span<const Occupation> s) const {
    switch (kind) {
      case Kind::Number: return number;
      case Kind::Generator: return generator(s);
      case Kind::Add: return lhs->eval(s) + rhs->eval(s);
      case Kind::Sub: return lhs->eval(s) - rhs->eval(s);
      case Kind::Mul: return lhs->eval(s) * rhs->eval(s);
      case Kind::Div: return lhs->eval(s) / rhs->eval(s);
      case Kind::Neg: return -lhs->eval(s);
      case Kind::Pow: {
        const double base = lhs->eval(s);
        double out = 1.0;
        for (int k = 0; k < exponent; ++k) out *= base;
        return out;
      }
    }
    return 0.0;
  }
};

class Parser {
 public:
  Parser(const FockBasis& basis, std::string_view text) : basis_(basis), text_(text) {}

  std::unique_ptr<Node> parse() {
    auto node = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("operator expression \"" + std::string(text_) + "\" at position " +
                      std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static std::unique_ptr<Node> binary(Node::Kind kind, std::unique_ptr<Node> a, std::unique_ptr<Node> b) {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  std::unique_ptr<Node> expression() {
    auto node = term();
    for (;;) {
      if (accept('+')) node = binary(Node::Kind::Add, std::move(node), term());
      else if (accept('-')) node = binary(Node::Kind::Sub, std::move(node), term());
      else return node;
    }
  }

  std::unique_ptr<Node> term() {
    auto node = unary();
    for (;;) {
      if (accept('*')) node = binary(Node::Kind::Mul, std::move(node), unary());
      else if (accept('/')) node = binary(Node::Kind::Div, std::move(node), unary());
      else return node;
    }
  }

  std::unique_ptr<Node> unary() {
    if (accept('-')) {
      auto n = std::make_unique<Node>();
      n->kind = Node::Kind::Neg;
      n->lhs = unary();
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  std::unique_ptr<Node> power() {
    auto base = primary();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be a non-negative integer");
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::Pow;
    n->exponent = std::stoi(std::string(text_.substr(start, pos_ - start)));
    n->lhs = std::move(base);
    return n;
  }

  std::unique_ptr<Node> primary() {
    skip_space();
    if (accept('(')) {
      auto node = expression();
      if (!accept(')')) fail("missing ')'");
      return node;
    }
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return generator();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::unique_ptr<Node> number() {
    const std::string rest(text_.substr(pos_));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::Number;
    n->number = value;
    return n;
  }

  std::unique_ptr<Node> generator() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::Generator;
    const double particles = basis_.particles();

    if (name == "N") {
      n->kind = Node::Kind::Number;
      n->number = particles;
      return n;
    }
    if (name == "z") {
      if (basis_.sites() != 2) fail("generator 'z' is defined for the dimer only");
      const double scale = 1.0 / (2.0 * (particles + 1.0));
      n->generator = [scale](std::span<const Occupation> s) {
        return (static_cast<double>(s[0]) - static_cast<double>(s[1])) * scale;
      };
      return n;
    }
    if ((name[0] == 'n' || name[0] == 'z') && name.size() > 1) {
      const std::string digits = name.substr(1);
      const bool numeric = std::all_of(digits.begin(), digits.end(),
                                       [](char d) { return std::isdigit(static_cast<unsigned char>(d)); });
      if (numeric) {
        const int site = std::stoi(digits);
        if (site < 1 || site > basis_.sites()) fail("site index out of range in '" + name + "'");
        const double scale = name[0] == 'z' ? 1.0 / particles : 1.0;
        const auto j = static_cast<std::size_t>(site - 1);
        n->generator = [j, scale](std::span<const Occupation> s) { return s[j] * scale; };
        return n;
      }
    }
    fail("unknown generator '" + name + "'");
  }

  const FockBasis& basis_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

SparseOperator build_hamiltonian(const FockBasis& basis, double hopping, double interaction,
                                 bool periodic) {
  const auto bond_list = bonds(basis.sites(), periodic);
  std::vector<Triplet> triplets;
  triplets.reserve(basis.size() * (2 * bond_list.size() + 1));
  std::vector<Occupation> scratch;

  for (std::size_t i = 0; i < basis.size(); ++i) {
    double diag = 0.0;
    for (auto n : basis.state(i)) {
      const double nd = n;
      diag += 0.5 * interaction * nd * (nd - 1.0);
    }
    const auto k = static_cast<std::ptrdiff_t>(i);
    triplets.emplace_back(k, k, Complex(diag, 0.0));
    for (auto [a, b] : bond_list) {
      add_hop(basis, i, a, b, Complex(-hopping, 0.0), scratch, triplets);
      add_hop(basis, i, b, a, Complex(-hopping, 0.0), scratch, triplets);
    }
  }
  return SparseOperator::from_triplets(basis.size(), triplets, true);
}

SparseOperator interaction_operator(const FockBasis& basis) {
  return diagonal_from(basis, [](std::span<const Occupation> s) {
    double v = 0.0;
    for (auto n : s) v += 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1.0);
    return v;
  });
}

SparseOperator z_operator(const FockBasis& basis) {
  if (basis.sites() != 2) {
    throw GeometryError("z_operator: defined for the dimer (L=2) only, got L=" +
                        std::to_string(basis.sites()));
  }
  const double scale = 1.0 / (2.0 * (basis.particles() + 1.0));
  return diagonal_from(basis, [scale](std::span<const Occupation> s) {
    return (static_cast<double>(s[0]) - static_cast<double>(s[1])) * scale;
  });
}

SparseOperator site_number_operator(const FockBasis& basis, int site, bool scaled) {
  if (site < 1 || site > basis.sites()) {
    throw DomainError("site_number_operator: site " + std::to_string(site) + " outside [1, " +
                      std::to_string(basis.sites()) + "]");
  }
  const double scale = scaled ? 1.0 / basis.particles() : 1.0;
  const auto j = static_cast<std::size_t>(site - 1);
  return diagonal_from(basis, [j, scale](std::span<const Occupation> s) { return s[j] * scale; });
}

SparseOperator mode_occupation_operator(const FockBasis& basis, int mode) {
  check_mode(basis, mode);
  const int sites = basis.sites();
  const double q = 2.0 * std::numbers::pi * mode / sites;
  std::vector<Triplet> triplets;
  std::vector<Occupation> scratch;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    triplets.emplace_back(k, k, Complex(static_cast<double>(basis.particles()) / sites, 0.0));
    for (int a = 0; a < sites; ++a) {
      for (int b = 0; b < sites; ++b) {
        if (a == b) continue;
        add_hop(basis, i, a, b, std::polar(1.0 / sites, q * (a - b)), scratch, triplets);
      }
    }
  }
  return SparseOperator::from_triplets(basis.size(), triplets, true);
}

SparseOperator mode_raising_operator(const FockBasis& basis, int mode) {
  check_mode(basis, mode);
  const int sites = basis.sites();
  const double q = 2.0 * std::numbers::pi * mode / sites;
  std::vector<Triplet> triplets;
  std::vector<Occupation> scratch;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (int a = 0; a < sites; ++a) {
      const Complex phase = std::polar(1.0 / sites, q * (a + 1));
      for (int b = 0; b < sites; ++b) {
        if (a == b) {
          const auto k = static_cast<std::ptrdiff_t>(i);
          triplets.emplace_back(k, k, phase * static_cast<double>(basis.state(i)[a]));
        } else {
          add_hop(basis, i, a, b, phase, scratch, triplets);
        }
      }
    }
  }
  return SparseOperator::from_triplets(basis.size(), triplets, false);
}

SparseOperator cyclic_shift_operator(const FockBasis& basis) {
  std::vector<Triplet> triplets;
  std::vector<Occupation> shifted(static_cast<std::size_t>(basis.sites()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto s = basis.state(i);
    for (int j = 0; j < basis.sites(); ++j) shifted[(j + 1) % basis.sites()] = s[j];
    const auto target = basis.index(shifted);
    triplets.emplace_back(static_cast<std::ptrdiff_t>(*target), static_cast<std::ptrdiff_t>(i), 1.0);
  }
  return SparseOperator::from_triplets(basis.size(), triplets, false);
}

SparseOperator operator_polynomial(const FockBasis& basis, std::string_view expression) {
  const auto root = Parser(basis, expression).parse();
  return diagonal_from(basis, [&root](std::span<const Occupation> s) { return root->eval(s); });
}

}  // namespace bhq
