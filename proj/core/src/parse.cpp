#include "distort/parse.hpp"

#include <cctype>
#include <cstdlib>
#include <string>
#include <vector>

#include "distort/cases.hpp"
#include "distort/copula.hpp"
#include "distort/errors.hpp"

namespace distort {

namespace {

class Cursor {
 public:
  explicit Cursor(const std::string& s) : s_(s) {}

  [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    throw parse_error(msg, 1, static_cast<int>(at) + 1);
  }

  bool done() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead >= s_.size() ? '\0' : s_[pos_ + ahead];
  }
  std::size_t pos() const { return pos_; }

  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    std::size_t start = pos_;
    while (!done() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) ||
                       s_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected a name");
    return s_.substr(start, pos_ - start);
  }

  double number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

DistortionFn parse_spec(Cursor& c);

Copula make_copula(const std::string& fam, const std::vector<double>& params,
                   std::size_t at, Cursor& c) {
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      c.fail_at(at, "copula family '" + fam + "' needs " + std::to_string(n) +
                        " parameter(s)");
  };
  try {
    if (fam == "independence") {
      need(0);
      return Copula::independence();
    }
    if (fam == "comonotone") {
      need(0);
      return Copula::comonotone();
    }
    if (fam == "countermonotone") {
      need(0);
      return Copula::countermonotone();
    }
    if (fam == "clayton") {
      need(1);
      return Copula::clayton(params[0]);
    }
    if (fam == "frank") {
      need(1);
      return Copula::frank(params[0]);
    }
    if (fam == "pareto" || fam == "paretosurvival") {
      need(1);
      return Copula::pareto_survival(params[0]);
    }
    if (fam == "amh") {
      need(1);
      return Copula::amh(params[0]);
    }
    if (fam == "gumbel" || fam == "gumbelhougaard") {
      need(1);
      return Copula::gumbel_hougaard(params[0]);
    }
    if (fam == "fgm") {
      need(1);
      return Copula::fgm(params[0]);
    }
    if (fam == "mo" || fam == "marshallolkin") {
      need(2);
      return Copula::marshall_olkin(params[0], params[1]);
    }
    if (fam == "gaussian") {
      need(1);
      return Copula::gaussian(params[0]);
    }
  } catch (const parse_error&) {
    throw;
  } catch (const std::exception& e) {
    c.fail_at(at, std::string("invalid copula parameters: ") + e.what());
  }
  c.fail_at(at, "unknown copula family '" + fam + "'");
}

// Inside "copula(" ... ")": family [":" num ("," num)*] ",v=" num
// ["," "side=" ("first"|"second")].
DistortionFn parse_copula_atom(Cursor& c, std::size_t at) {
  std::string fam = c.ident();
  std::vector<double> params;
  if (c.consume(':')) {
    params.push_back(c.number());
    // Further commas introduce either another parameter or the v= keyword.
    while (c.peek() == ',' &&
           !std::isalpha(static_cast<unsigned char>(c.peek(1)))) {
      c.consume(',');
      params.push_back(c.number());
    }
  }
  c.expect(',');
  if (c.ident() != "v") c.fail("expected v=<level>");
  c.expect('=');
  double v = c.number();
  Side side = Side::first;
  if (c.consume(',')) {
    if (c.ident() != "side") c.fail("expected side=first|second");
    c.expect('=');
    std::string which = c.ident();
    if (which == "second")
      side = Side::second;
    else if (which != "first")
      c.fail("side must be first or second");
  }
  c.expect(')');
  Copula cop = make_copula(fam, params, at, c);
  try {
    return derived_distortion(cop, v, side);
  } catch (const std::exception& e) {
    c.fail_at(at, std::string("invalid copula distortion: ") + e.what());
  }
}

DistortionFn parse_atom(Cursor& c) {
  std::size_t at = c.pos();
  std::string name = c.ident();

  if (name == "compose") {
    c.expect('(');
    DistortionFn outer = parse_spec(c);
    c.expect(',');
    DistortionFn inner = parse_spec(c);
    c.expect(')');
    return compose(outer, inner);
  }
  if (name == "dual") {
    c.expect('(');
    DistortionFn g = parse_spec(c);
    c.expect(')');
    return dual(g);
  }
  if (name == "tail") {
    c.expect('(');
    DistortionFn g = parse_spec(c);
    c.expect(',');
    double p = c.number();
    c.expect(')');
    try {
      return tail_distortion(g, p);
    } catch (const std::exception& e) {
      c.fail_at(at, std::string("invalid tail level: ") + e.what());
    }
  }
  if (name == "esssup") {
    c.expect('(');
    double lambda = c.number();
    c.expect(',');
    DistortionFn g = parse_spec(c);
    c.expect(')');
    try {
      return esssup_combo(lambda, g);
    } catch (const std::exception& e) {
      c.fail_at(at, std::string("invalid esssup weight: ") + e.what());
    }
  }
  if (name == "mix") {
    c.expect('(');
    std::vector<std::pair<double, DistortionFn>> terms;
    do {
      double w = c.number();
      c.expect('*');
      terms.emplace_back(w, parse_spec(c));
    } while (c.consume(','));
    c.expect(')');
    try {
      return mix_finite(terms);
    } catch (const std::exception& e) {
      c.fail_at(at, std::string("invalid mixture: ") + e.what());
    }
  }
  if (name == "copula") {
    c.expect('(');
    return parse_copula_atom(c, at);
  }

  try {
    if (name == "identity") return identity_distortion();
    if (name == "beta") {
      c.expect(':');
      double a = c.number();
      c.expect(',');
      double b = c.number();
      return beta_distortion(a, b);
    }
    if (name == "glue") {
      c.expect(':');
      double h1 = c.number();
      c.expect(',');
      double h2 = c.number();
      c.expect(',');
      double alpha = c.number();
      c.expect(',');
      double beta = c.number();
      return glue_distortion(h1, h2, alpha, beta);
    }
    if (name == "var" || name == "tvar" || name == "power" ||
        name == "dualpower" || name == "wang" || name == "lookback") {
      c.expect(':');
      double x = c.number();
      if (name == "var") return var_distortion(x);
      if (name == "tvar") return tvar_distortion(x);
      if (name == "power") return power_distortion(x);
      if (name == "dualpower") return dual_power_distortion(x);
      if (name == "wang") return wang_distortion(x);
      return lookback_distortion(x);
    }
  } catch (const parse_error&) {
    throw;
  } catch (const std::exception& e) {
    c.fail_at(at, std::string("invalid ") + name + " parameters: " + e.what());
  }
  c.fail_at(at, "unknown distortion '" + name + "'");
}

DistortionFn parse_spec(Cursor& c) { return parse_atom(c); }

}  // namespace

DistortionFn parse_distortion(const std::string& spec) {
  Cursor c(spec);
  DistortionFn g = parse_spec(c);
  if (!c.done()) c.fail("trailing characters after distortion spec");
  return g;
}

Copula parse_copula(const std::string& spec) {
  Cursor c(spec);
  std::size_t at = c.pos();
  std::string fam = c.ident();
  std::vector<double> params;
  if (c.consume(':')) {
    params.push_back(c.number());
    while (c.consume(',')) params.push_back(c.number());
  }
  if (!c.done()) c.fail("trailing characters after copula spec");
  return make_copula(fam, params, at, c);
}

Distribution parse_distribution(const std::string& descriptor) {
  auto colon = descriptor.find(':');
  if (colon == std::string::npos)
    throw parse_error("distribution descriptor needs kind:params", 1, 1);
  std::string kind = descriptor.substr(0, colon);
  std::string rest = descriptor.substr(colon + 1);
  const int rest_col = static_cast<int>(colon) + 2;

  if (kind == "csv") {
    if (rest.empty()) throw parse_error("csv: needs a path", 1, rest_col);
    return load_samples_csv(rest);
  }
  if (kind == "example") {
    try {
      return example_distribution(rest);
    } catch (const std::exception& e) {
      throw parse_error(e.what(), 1, rest_col);
    }
  }

  Cursor c(rest);
  try {
    if (kind == "discrete") {
      std::vector<double> vals, probs;
      do {
        vals.push_back(c.number());
        c.expect(':');
        probs.push_back(c.number());
      } while (c.consume(','));
      if (!c.done()) c.fail("trailing characters in discrete descriptor");
      return Distribution::discrete(vals, probs);
    }
    auto nums = [&](std::size_t n) {
      std::vector<double> out;
      out.push_back(c.number());
      while (out.size() < n) {
        c.expect(',');
        out.push_back(c.number());
      }
      if (!c.done()) c.fail("trailing characters in distribution descriptor");
      return out;
    };
    if (kind == "uniform") {
      auto v = nums(2);
      return Distribution::uniform(v[0], v[1]);
    }
    if (kind == "pareto") {
      auto v = nums(2);
      return Distribution::pareto(v[0], v[1]);
    }
    if (kind == "bernoulli") {
      auto v = nums(1);
      return Distribution::bernoulli(v[0]);
    }
    if (kind == "exponential") {
      auto v = nums(1);
      return Distribution::exponential(v[0]);
    }
    if (kind == "lognormal") {
      auto v = nums(2);
      return Distribution::lognormal(v[0], v[1]);
    }
    if (kind == "normal") {
      auto v = nums(2);
      return Distribution::normal(v[0], v[1]);
    }
  } catch (const parse_error& e) {
    // Re-anchor inside the full descriptor string.
    throw parse_error(e.message(), 1, rest_col + e.column() - 1);
  } catch (const std::exception& e) {
    throw parse_error(std::string("invalid ") + kind + " parameters: " + e.what(),
                      1, rest_col);
  }
  throw parse_error("unknown distribution kind '" + kind + "'", 1, 1);
}

}  // namespace distort
