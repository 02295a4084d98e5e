#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "tphase/expression.hpp"
#include "tphase/rng.hpp"

using namespace tphase;

namespace {

double ev(const char* src, Event at = {}) {
  return eval_expression(parse_expression(src), at);
}

std::string roundtrip(const char* src) {
  return print_expression(parse_expression(src));
}

// Random canonical tree: finite non-negative literals, explicit negation
// nodes, correct call arities -- the tree space the parser itself produces.
ExprNode random_ast(RngStream& rng, int depth) {
  ExprNode n;
  const double pick = rng.uniform();
  if (depth <= 0 || pick < 0.3) {
    if (rng.uniform() < 0.5) {
      n.kind = ExprKind::number;
      n.value = rng.uniform(0.0, 100.0);
    } else {
      n.kind = ExprKind::variable;
      n.index = static_cast<int>(rng.uniform(0.0, 6.0));
      if (n.index > 5) n.index = 5;
    }
    return n;
  }
  const int op = static_cast<int>(rng.uniform(0.0, 7.0));
  switch (op) {
    case 0:
      n.kind = ExprKind::negate;
      n.args.push_back(random_ast(rng, depth - 1));
      return n;
    case 1: n.kind = ExprKind::add; break;
    case 2: n.kind = ExprKind::sub; break;
    case 3: n.kind = ExprKind::mul; break;
    case 4: n.kind = ExprKind::div; break;
    case 5: n.kind = ExprKind::pow; break;
    default: {
      n.kind = ExprKind::call;
      n.index = static_cast<int>(rng.uniform(0.0, 7.0));
      if (n.index > 6) n.index = 6;
      n.args.push_back(random_ast(rng, depth - 1));
      if (kExprFunctions[n.index].arity == 2)
        n.args.push_back(random_ast(rng, depth - 1));
      return n;
    }
  }
  n.args.push_back(random_ast(rng, depth - 1));
  n.args.push_back(random_ast(rng, depth - 1));
  return n;
}

}  // namespace

TEST_CASE("arithmetic precedence and associativity") {
  REQUIRE(ev("1+2*3") == 7.0);
  REQUIRE(ev("(1+2)*3") == 9.0);
  REQUIRE(ev("2+3*4") == 14.0);
  REQUIRE(ev("10/4/5") == 0.5);
  REQUIRE(ev("1-2-3") == -4.0);
  REQUIRE(ev("2^3^2") == 512.0);
  REQUIRE(ev("2^(3^2)") == 512.0);
  REQUIRE(ev("(2^3)^2") == 64.0);
  REQUIRE(ev("-2^2") == -4.0);
  REQUIRE(ev("(-2)^2") == 4.0);
  REQUIRE(ev("2^-3") == 0.125);
  REQUIRE(ev("2*-3") == -6.0);
  REQUIRE(ev("--4") == 4.0);
  REQUIRE(ev("  1 + 2 * sin ( 0 ) ") == 1.0);
}

TEST_CASE("number literals") {
  REQUIRE(ev("1e3") == 1000.0);
  REQUIRE(ev("2.5e-2") == 0.025);
  REQUIRE(ev(".5") == 0.5);
  REQUIRE(ev("2.") == 2.0);
  REQUIRE(ev("0") == 0.0);
}

TEST_CASE("variables and constants") {
  const Event at{2.0, {3.0, 4.0, 5.0}};
  REQUIRE(ev("t*1000+x*100+y*10+z", at) == 2345.0);
  REQUIRE(ev("rho", at) == 5.0);
  REQUIRE(ev("phi", at) == std::atan2(4.0, 3.0));
  REQUIRE(ev("pi") == std::numbers::pi);
  REQUIRE(ev("e") == std::numbers::e);
  REQUIRE(ev("rho*cos(phi)", at) == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("function evaluation") {
  REQUIRE(ev("sin(pi/2)") == Catch::Approx(1.0).margin(1e-15));
  REQUIRE(ev("sin(pi/2)*x", {0, {3, 0, 0}}) == Catch::Approx(3.0).margin(1e-14));
  REQUIRE(ev("atan2(y,x)", {0, {0, 2, 0}}) ==
          Catch::Approx(std::numbers::pi / 2).margin(1e-15));
  REQUIRE(ev("sqrt(4)") == 2.0);
  REQUIRE(ev("log(e)") == Catch::Approx(1.0).margin(1e-15));
  REQUIRE(ev("tan(0)") == 0.0);
  REQUIRE(ev("exp(0)") == 1.0);
}

TEST_CASE("syntax errors carry offsets and expectations") {
  auto offset_of = [](const char* src) {
    try {
      parse_expression(src);
    } catch (const SyntaxError& e) {
      return e.offset;
    }
    FAIL("expected SyntaxError for: " << src);
    return std::size_t{0};
  };

  REQUIRE(offset_of("2+") == 2);
  REQUIRE(offset_of("") == 0);
  REQUIRE(offset_of("(1+2") == 4);
  REQUIRE(offset_of("bogus(3)") == 0);
  REQUIRE(offset_of("sin 3") == 4);
  REQUIRE(offset_of("2 @ 3") == 2);
  REQUIRE(offset_of("1++2") == 2);
  REQUIRE(offset_of("1.2.3") == 3);
  REQUIRE(offset_of("atan2(1)") == 0);
  REQUIRE(offset_of("sin(1,2)") == 0);
  REQUIRE(offset_of("sin()") == 0);

  try {
    parse_expression("(1+2");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    REQUIRE(e.expected == "')'");
  }
  try {
    parse_expression("atan2(1)");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    REQUIRE(e.expected == "2 argument(s)");
  }
  try {
    parse_expression("nope");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    REQUIRE(e.expected == "variable, constant, or function name");
  }
}

TEST_CASE("domain errors carry the offending node offset") {
  auto domain_offset = [](const char* src, Event at) {
    try {
      ev(src, at);
    } catch (const ExpressionDomain& e) {
      return e.offset;
    }
    FAIL("expected ExpressionDomain for: " << src);
    return std::size_t{0};
  };

  REQUIRE(domain_offset("log(x)", {0, {0, 0, 0}}) == 0);
  REQUIRE(domain_offset("sqrt(x)", {0, {-1, 0, 0}}) == 0);
  REQUIRE(domain_offset("1/(x-1)", {0, {1, 0, 0}}) == 1);
  REQUIRE(domain_offset("exp(1e6)", {}) == 0);
  REQUIRE(domain_offset("(0-2)^0.5", {}) == 5);
  REQUIRE_NOTHROW(ev("log(x)", {0, {2, 0, 0}}));
}

TEST_CASE("canonical printing") {
  REQUIRE(roundtrip("1+2*3") == "1+2*3");
  REQUIRE(roundtrip(" ( 1 + 2 ) * 3 ") == "(1+2)*3");
  REQUIRE(roundtrip("-2^2") == "-2^2");
  REQUIRE(roundtrip("2^-3") == "2^-3");
  REQUIRE(roundtrip("2^3^2") == "2^3^2");
  REQUIRE(roundtrip("(2^3)^2") == "(2^3)^2");
  REQUIRE(roundtrip("x*(y+z)") == "x*(y+z)");
  REQUIRE(roundtrip("atan2(y,x)+sqrt(rho)") == "atan2(y,x)+sqrt(rho)");
  REQUIRE(roundtrip("0.5") == "0.5");
  REQUIRE(roundtrip("1e3") == "1000");
  REQUIRE(roundtrip("x/(y*z)") == "x/(y*z)");
  REQUIRE(roundtrip("x/y*z") == "x/y*z");
  REQUIRE(roundtrip("x-(y-z)") == "x-(y-z)");
  REQUIRE(roundtrip("x- -y") == "x--y");
  REQUIRE(roundtrip("-(x+y)") == "-(x+y)");
}

TEST_CASE("print / parse round-trip on 1000 random trees") {
  RngStream rng(2024, "ast-roundtrip");
  const Event at{0.7, {1.3, -0.4, 2.1}};
  for (int trial = 0; trial < 1000; ++trial) {
    const ExprNode ast = random_ast(rng, 4);
    const std::string printed = print_expression(ast);

    ExprNode reparsed;
    REQUIRE_NOTHROW(reparsed = parse_expression(printed));
    REQUIRE(expr_equal(ast, reparsed));
    REQUIRE(print_expression(reparsed) == printed);

    // identical structure must evaluate identically (or fail identically)
    bool threw_a = false, threw_b = false;
    double va = 0, vb = 0;
    try {
      va = eval_expression(ast, at);
    } catch (const ExpressionDomain&) {
      threw_a = true;
    }
    try {
      vb = eval_expression(reparsed, at);
    } catch (const ExpressionDomain&) {
      threw_b = true;
    }
    REQUIRE(threw_a == threw_b);
    if (!threw_a) {
      REQUIRE(va == vb);
    }
  }
}
