// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dpasr/symbolic.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "dpasr/error.hpp"
#include "dpasr/operators.hpp"

namespace dpasr {

namespace {

expr_kind kind_of(op_kind op)
{
  switch (op) {
  case op_kind::sin: return expr_kind::sin;
  case op_kind::exp: return expr_kind::exp;
  case op_kind::log: return expr_kind::log;
  case op_kind::pow2: return expr_kind::pow2;
  case op_kind::pow3: return expr_kind::pow3;
  default: throw config_error("not a unary operator: " + std::string(op_name(op)));
  }
}

bool is_unary(expr_kind k)
{
  return k == expr_kind::sin || k == expr_kind::exp || k == expr_kind::log ||
         k == expr_kind::pow2 || k == expr_kind::pow3;
}

op_kind op_of(expr_kind k)
{
  switch (k) {
  case expr_kind::sin: return op_kind::sin;
  case expr_kind::exp: return op_kind::exp;
  case expr_kind::log: return op_kind::log;
  case expr_kind::pow2: return op_kind::pow2;
  default: return op_kind::pow3;
  }
}

std::string_view prefix_name(expr_kind k)
{
  switch (k) {
  case expr_kind::constant: return "const";
  case expr_kind::variable: return "var";
  case expr_kind::sin: return "sin";
  case expr_kind::exp: return "exp";
  case expr_kind::log: return "log";
  case expr_kind::pow2: return "pow2";
  case expr_kind::pow3: return "pow3";
  case expr_kind::sum: return "sum";
  case expr_kind::product: return "prod";
  case expr_kind::scale: return "scale";
  }
  return "?";
}

} // namespace

sym_expr sym_expr::constant(double v)
{
  sym_expr e;
  e.kind = expr_kind::constant;
  e.value = v;
  return e;
}

sym_expr sym_expr::variable(std::string n)
{
  sym_expr e;
  e.kind = expr_kind::variable;
  e.name = std::move(n);
  return e;
}

sym_expr sym_expr::unary(op_kind op, sym_expr child)
{
  sym_expr e;
  e.kind = kind_of(op);
  e.children.push_back(std::move(child));
  return e;
}

sym_expr sym_expr::sum(std::vector<sym_expr> terms)
{
  sym_expr e;
  e.kind = expr_kind::sum;
  e.children = std::move(terms);
  return e;
}

sym_expr sym_expr::product(std::vector<sym_expr> factors)
{
  sym_expr e;
  e.kind = expr_kind::product;
  e.children = std::move(factors);
  return e;
}

sym_expr sym_expr::scale(double factor, sym_expr child)
{
  sym_expr e;
  e.kind = expr_kind::scale;
  e.value = factor;
  e.children.push_back(std::move(child));
  return e;
}

bool sym_expr::has_variables() const
{
  if (kind == expr_kind::variable) return true;
  for (auto const &c : children)
    if (c.has_variables()) return true;
  return false;
}

std::size_t sym_expr::node_count() const
{
  std::size_t n = 1;
  for (auto const &c : children) n += c.node_count();
  return n;
}

double evaluate(sym_expr const &expr, std::map<std::string, double> const &point)
{
  switch (expr.kind) {
  case expr_kind::constant: return expr.value;
  case expr_kind::variable: {
    auto it = point.find(expr.name);
    if (it == point.end()) throw config_error("no value for variable '" + expr.name + "'");
    return it->second;
  }
  case expr_kind::sum: {
    double acc = 0.0;
    for (auto const &c : expr.children) acc += evaluate(c, point);
    return acc;
  }
  case expr_kind::product: {
    double acc = 1.0;
    for (auto const &c : expr.children) acc *= evaluate(c, point);
    return acc;
  }
  case expr_kind::scale: return expr.value * evaluate(expr.children.at(0), point);
  default: return apply_unary(op_of(expr.kind), evaluate(expr.children.at(0), point));
  }
}

namespace {

// Replaces variable-free subtrees by their value and drops zero terms.
sym_expr fold_zero(sym_expr e)
{
  for (auto &c : e.children) c = fold_zero(std::move(c));
  if (!e.has_variables() && e.kind != expr_kind::constant) {
    double const v = evaluate(e, {});
    if (std::isfinite(v)) return sym_expr::constant(v);
  }
  switch (e.kind) {
  case expr_kind::sum: {
    std::vector<sym_expr> kept;
    for (auto &c : e.children)
      if (!(c.is_constant() && c.value == 0.0)) kept.push_back(std::move(c));
    if (kept.empty()) return sym_expr::constant(0.0);
    e.children = std::move(kept);
    return e;
  }
  case expr_kind::product:
    for (auto const &c : e.children)
      if (c.is_constant() && c.value == 0.0) return sym_expr::constant(0.0);
    return e;
  case expr_kind::scale:
    if (e.value == 0.0 || (e.children[0].is_constant() && e.children[0].value == 0.0))
      return sym_expr::constant(0.0);
    return e;
  default: return e;
  }
}

sym_expr extract_node(program_graph const &graph, weight_store const &weights, std::size_t node)
{
  auto const &terminals = graph.spec().terminals;
  std::vector<sym_expr> terms;
  for (auto const &s : graph.summands_of(node)) {
    if (weights.is_pruned(s.weight)) continue;
    double const w = weights[s.weight];
    if (w == 0.0) continue;
    switch (s.kind) {
    case summand_kind::unary:
      terms.push_back(sym_expr::scale(
          w, sym_expr::unary(s.op, extract_node(graph, weights,
                                                static_cast<std::size_t>(s.children[0])))));
      break;
    case summand_kind::binary: {
      std::vector<sym_expr> args;
      args.push_back(extract_node(graph, weights, static_cast<std::size_t>(s.children[0])));
      args.push_back(extract_node(graph, weights, static_cast<std::size_t>(s.children[1])));
      terms.push_back(sym_expr::scale(w, s.op == op_kind::add ? sym_expr::sum(std::move(args))
                                                              : sym_expr::product(std::move(args))));
      break;
    }
    case summand_kind::terminal:
      terms.push_back(sym_expr::scale(w, sym_expr::variable(terminals[s.terminal])));
      break;
    case summand_kind::constant: terms.push_back(sym_expr::constant(w)); break;
    }
  }
  if (terms.empty()) return sym_expr::constant(0.0);
  return sym_expr::sum(std::move(terms));
}

sym_expr simplify_once(sym_expr const &in)
{
  sym_expr e = in;
  for (auto &c : e.children) c = simplify_once(c);

  if (is_unary(e.kind)) {
    if (e.children[0].is_constant()) {
      double const v = apply_unary(op_of(e.kind), e.children[0].value);
      if (std::isfinite(v)) return sym_expr::constant(v);
    }
    return e;
  }

  switch (e.kind) {
  case expr_kind::scale: {
    auto &child = e.children[0];
    if (e.value == 0.0) return sym_expr::constant(0.0);
    if (child.is_constant()) return sym_expr::constant(e.value * child.value);
    if (child.kind == expr_kind::scale)
      return sym_expr::scale(e.value * child.value, std::move(child.children[0]));
    if (e.value == 1.0) return std::move(child);
    return e;
  }
  case expr_kind::sum: {
    std::vector<sym_expr> terms;
    double k = 0.0;
    bool have_k = false;
    auto take = [&](sym_expr &t) {
      if (t.is_constant()) {
        k += t.value;
        have_k = true;
      } else {
        terms.push_back(std::move(t));
      }
    };
    for (auto &c : e.children) {
      if (c.kind == expr_kind::sum) {
        for (auto &cc : c.children) take(cc);
      } else {
        take(c);
      }
    }
    if (have_k && k != 0.0) terms.push_back(sym_expr::constant(k));
    if (terms.empty()) return sym_expr::constant(0.0);
    if (terms.size() == 1) return std::move(terms.front());
    return sym_expr::sum(std::move(terms));
  }
  case expr_kind::product: {
    std::vector<sym_expr> factors;
    double coef = 1.0;
    auto take = [&](sym_expr &f) {
      if (f.is_constant()) {
        coef *= f.value;
      } else if (f.kind == expr_kind::scale) {
        coef *= f.value;
        factors.push_back(std::move(f.children[0]));
      } else {
        factors.push_back(std::move(f));
      }
    };
    for (auto &c : e.children) {
      if (c.kind == expr_kind::product) {
        for (auto &cc : c.children) take(cc);
      } else {
        take(c);
      }
    }
    if (coef == 0.0) return sym_expr::constant(0.0);
    if (factors.empty()) return sym_expr::constant(coef);
    sym_expr body = factors.size() == 1 ? std::move(factors.front())
                                        : sym_expr::product(std::move(factors));
    if (coef == 1.0) return body;
    return sym_expr::scale(coef, std::move(body));
  }
  default: return e;
  }
}

std::string format_number(double v, int precision)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

bool needs_parens(sym_expr const &e, std::string const &text)
{
  return (e.kind == expr_kind::sum && e.children.size() > 1) || (!text.empty() && text[0] == '-');
}

std::string render_impl(sym_expr const &e, int precision)
{
  auto wrapped = [&](sym_expr const &c) {
    auto t = render_impl(c, precision);
    return needs_parens(c, t) ? "(" + t + ")" : t;
  };
  switch (e.kind) {
  case expr_kind::constant: return format_number(e.value, precision);
  case expr_kind::variable: return e.name;
  case expr_kind::sin: return "sin(" + render_impl(e.children[0], precision) + ")";
  case expr_kind::exp: return "exp(" + render_impl(e.children[0], precision) + ")";
  case expr_kind::log: return "log(" + render_impl(e.children[0], precision) + ")";
  case expr_kind::pow2: return "(" + render_impl(e.children[0], precision) + ")^2";
  case expr_kind::pow3: return "(" + render_impl(e.children[0], precision) + ")^3";
  case expr_kind::scale: return format_number(e.value, precision) + "*" + wrapped(e.children[0]);
  case expr_kind::sum: {
    if (e.children.empty()) return "0";
    std::string out = render_impl(e.children[0], precision);
    for (std::size_t i = 1; i < e.children.size(); ++i) {
      auto t = render_impl(e.children[i], precision);
      if (!t.empty() && t[0] == '-')
        out += " - " + t.substr(1);
      else
        out += " + " + t;
    }
    return out;
  }
  case expr_kind::product: {
    if (e.children.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < e.children.size(); ++i) {
      if (i) out += "*";
      out += wrapped(e.children[i]);
    }
    return out;
  }
  }
  return {};
}

void prefix_impl(sym_expr const &e, std::string &out)
{
  char buf[64];
  out += '(';
  out += prefix_name(e.kind);
  switch (e.kind) {
  case expr_kind::constant:
  case expr_kind::scale:
    std::snprintf(buf, sizeof buf, " %.17g", e.value);
    out += buf;
    break;
  case expr_kind::variable:
    out += ' ';
    out += e.name;
    break;
  default: break;
  }
  for (auto const &c : e.children) {
    out += ' ';
    prefix_impl(c, out);
  }
  out += ')';
}

class prefix_parser
{
public:
  explicit prefix_parser(std::string_view text) : text_(text) {}

  sym_expr parse_all()
  {
    auto e = parse();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing text");
    return e;
  }

private:
  [[noreturn]] void fail(std::string const &what) const
  {
    throw config_error("malformed prefix expression at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char ch)
  {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != ch) fail(std::string("expected '") + ch + "'");
    ++pos_;
  }

  std::string token()
  {
    skip_ws();
    auto const start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_) fail("expected token");
    return std::string(text_.substr(start, pos_ - start));
  }

  double number()
  {
    auto const t = token();
    char *end = nullptr;
    double const v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) fail("bad number '" + t + "'");
    return v;
  }

  bool at_close()
  {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == ')';
  }

  sym_expr parse()
  {
    expect('(');
    auto const head = token();
    sym_expr e;
    if (head == "const") {
      e = sym_expr::constant(number());
    } else if (head == "var") {
      e = sym_expr::variable(token());
    } else if (head == "scale") {
      double const f = number();
      e = sym_expr::scale(f, parse());
    } else if (head == "sum" || head == "prod") {
      std::vector<sym_expr> items;
      while (!at_close()) items.push_back(parse());
      e = head == "sum" ? sym_expr::sum(std::move(items)) : sym_expr::product(std::move(items));
    } else if (auto op = parse_op_name(head); op && arity(*op) == 1) {
      e = sym_expr::unary(*op, parse());
    } else {
      fail("unknown head '" + head + "'");
    }
    expect(')');
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace

sym_expr extract(program_graph const &graph, weight_store const &weights)
{
  if (weights.size() != graph.weight_count()) throw config_error("weight store size mismatch");
  return fold_zero(extract_node(graph, weights, 0));
}

sym_expr simplify(sym_expr const &expr)
{
  sym_expr cur = expr;
  for (int i = 0; i < 64; ++i) {
    auto next = simplify_once(cur);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

std::string render(sym_expr const &expr, int precision)
{
  if (precision < 1) throw config_error("render precision must be at least 1");
  return render_impl(expr, precision);
}

std::string render_prefix(sym_expr const &expr)
{
  std::string out;
  prefix_impl(expr, out);
  return out;
}

sym_expr parse_prefix(std::string_view text)
{
  return prefix_parser(text).parse_all();
}

} // namespace dpasr
