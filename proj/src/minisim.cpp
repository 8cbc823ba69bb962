// Copyright 2026 The rtleval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rtleval/minisim.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include "rtleval/verilog.hpp"

namespace rtleval::minisim {

using verilog::TokKind;
using verilog::Token;

namespace {

// ---------------------------------------------------------------- values

constexpr int kMaxWidth = 64;

uint64_t mask_of(int width) {
  return width >= 64 ? ~0ull : ((1ull << width) - 1);
}

// Four-state lite: per-bit known/unknown. Unknown bits have bits==0 so that
// equal values compare equal structurally.
struct Value {
  int width = 1;
  uint64_t bits = 0;
  uint64_t xmask = 0;

  bool operator==(const Value&) const = default;
};

Value make_value(int width, uint64_t bits, uint64_t xmask = 0) {
  Value v;
  v.width = width;
  v.xmask = xmask & mask_of(width);
  v.bits = bits & mask_of(width) & ~v.xmask;
  return v;
}

Value all_x(int width) { return make_value(width, 0, ~0ull); }

bool is_known(const Value& v) { return v.xmask == 0; }

// zero-extend or truncate
Value resize(const Value& v, int width) {
  return make_value(width, v.bits, v.xmask);
}

enum class Bool3 { f, t, x };

Bool3 bool3(const Value& v) {
  if (v.bits & ~v.xmask) return Bool3::t;  // some known 1
  if (v.xmask) return Bool3::x;
  return Bool3::f;
}

Value from_bool3(Bool3 b) {
  switch (b) {
    case Bool3::t: return make_value(1, 1);
    case Bool3::f: return make_value(1, 0);
    case Bool3::x: return all_x(1);
  }
  return all_x(1);
}

Value bit_and(const Value& a, const Value& b, int w) {
  Value x = resize(a, w), y = resize(b, w);
  uint64_t a0 = ~x.bits & ~x.xmask, a1 = x.bits & ~x.xmask;
  uint64_t b0 = ~y.bits & ~y.xmask, b1 = y.bits & ~y.xmask;
  uint64_t known1 = a1 & b1;
  uint64_t known0 = a0 | b0;
  return make_value(w, known1, ~(known0 | known1));
}

Value bit_or(const Value& a, const Value& b, int w) {
  Value x = resize(a, w), y = resize(b, w);
  uint64_t a0 = ~x.bits & ~x.xmask, a1 = x.bits & ~x.xmask;
  uint64_t b0 = ~y.bits & ~y.xmask, b1 = y.bits & ~y.xmask;
  uint64_t known1 = a1 | b1;
  uint64_t known0 = a0 & b0;
  return make_value(w, known1, ~(known0 | known1));
}

Value bit_xor(const Value& a, const Value& b, int w) {
  Value x = resize(a, w), y = resize(b, w);
  return make_value(w, x.bits ^ y.bits, x.xmask | y.xmask);
}

Value bit_not(const Value& a, int w) {
  Value x = resize(a, w);
  return make_value(w, ~x.bits, x.xmask);
}

Value merge(const Value& a, const Value& b, int w) {
  Value x = resize(a, w), y = resize(b, w);
  uint64_t agree = ~(x.bits ^ y.bits) & ~x.xmask & ~y.xmask;
  return make_value(w, x.bits, ~agree);
}

uint64_t to_uint(const Value& v) { return v.bits & mask_of(v.width); }

}  // namespace

// ---------------------------------------------------------------- AST

namespace {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind { number, ident, unary, binary, ternary, concat, repl, index, slice };
  Kind kind = Kind::number;
  Value literal;          // number
  bool literal_sized = false;
  std::string name;       // ident
  std::string op;         // unary/binary
  std::vector<ExprPtr> args;
  int msb = 0, lsb = 0;   // slice
  size_t line = 0;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  enum class Kind { block, assign, if_, for_, delay, display, finish };
  Kind kind = Kind::block;
  std::vector<StmtPtr> body;       // block
  ExprPtr lhs, rhs;                // assign (lhs: ident/index/slice/concat)
  ExprPtr cond;                    // if/for
  StmtPtr then_branch, else_branch;
  StmtPtr init, step;              // for
  std::string format;              // display
  std::vector<ExprPtr> args;       // display
  size_t line = 0;
};

enum class NetKind { wire, reg, integer_ };

struct Net {
  std::string name;
  NetKind kind = NetKind::wire;
  int msb = 0, lsb = 0;
  int width() const { return msb - lsb + 1; }
};

struct Connection {
  std::string port;  // empty for positional
  ExprPtr expr;      // null for unconnected
};

struct Instance {
  std::string module_type;
  std::string instance_name;
  bool named = false;
  std::vector<Connection> conns;
  size_t line = 0;
};

struct PortDecl {
  std::string name;
  verilog::PortDir dir = verilog::PortDir::in;
};

struct Module {
  std::string name;
  std::vector<PortDecl> ports;  // header order
  std::map<std::string, Net> nets;
  std::vector<std::pair<ExprPtr, ExprPtr>> assigns;  // lhs, rhs
  std::vector<Instance> instances;
  std::vector<StmtPtr> initials;
  std::string file;
};

// ---------------------------------------------------------------- parser

struct Parser {
  const std::vector<Token>& toks;
  size_t i = 0;
  std::string file;

  explicit Parser(const std::vector<Token>& t, std::string f) : toks(t), file(std::move(f)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw CompileError(file + ":" + std::to_string(cur().line) + ": " + msg);
  }
  const Token& cur() const { return toks[i]; }
  bool is_ident(std::string_view s) const {
    return cur().kind == TokKind::ident && cur().text == s;
  }
  bool is_sym(std::string_view s) const {
    return cur().kind == TokKind::symbol && cur().text == s;
  }
  void advance() { if (i + 1 < toks.size()) i++; }
  void expect_sym(std::string_view s) {
    if (!is_sym(s)) fail("expected '" + std::string(s) + "', got '" + cur().text + "'");
    advance();
  }
  std::string expect_ident() {
    if (cur().kind != TokKind::ident) fail("expected identifier, got '" + cur().text + "'");
    std::string name = cur().text;
    advance();
    return name;
  }

  Value parse_literal_value(const std::string& text, bool* sized) {
    auto tick = text.find('\'');
    *sized = tick != std::string::npos;
    if (!*sized) {
      unsigned long long v = 0;
      for (char c : text)
        if (c != '_') v = v * 10 + (unsigned)(c - '0');
      return make_value(32, v);
    }
    int width = 32;
    if (tick > 0) width = std::stoi(text.substr(0, tick));
    if (width < 1 || width > kMaxWidth) fail("literal width out of range: " + text);
    size_t p = tick + 1;
    if (p < text.size() && (text[p] == 's' || text[p] == 'S')) p++;
    char base = (char)std::tolower((unsigned char)text[p]);
    p++;
    uint64_t bits = 0, xm = 0;
    auto push_bits = [&](int nbits, uint64_t val, bool is_x) {
      bits = (bits << nbits) | (is_x ? 0 : val);
      uint64_t m = nbits >= 64 ? ~0ull : ((1ull << nbits) - 1);
      xm = (xm << nbits) | (is_x ? m : 0);
    };
    if (base == 'd') {
      unsigned long long v = 0;
      for (size_t q = p; q < text.size(); q++)
        if (text[q] != '_') v = v * 10 + (unsigned)(text[q] - '0');
      bits = v;
    } else {
      int per = base == 'b' ? 1 : base == 'o' ? 3 : base == 'h' ? 4 : 0;
      if (per == 0) fail("bad literal base: " + text);
      for (size_t q = p; q < text.size(); q++) {
        char ch = (char)std::tolower((unsigned char)text[q]);
        if (ch == '_') continue;
        if (ch == 'x' || ch == 'z' || ch == '?') {
          push_bits(per, 0, true);
        } else {
          int d = ch <= '9' ? ch - '0' : 10 + ch - 'a';
          if (d < 0 || d >= (1 << per)) fail("bad digit in literal: " + text);
          push_bits(per, (uint64_t)d, false);
        }
      }
    }
    return make_value(width, bits, xm);
  }

  ExprPtr make_number() {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::number;
    e->line = cur().line;
    bool sized = false;
    e->literal = parse_literal_value(cur().text, &sized);
    e->literal_sized = sized;
    advance();
    return e;
  }

  ExprPtr parse_primary() {
    if (cur().kind == TokKind::number) return make_number();
    if (is_sym("(")) {
      advance();
      auto e = parse_expr();
      expect_sym(")");
      return e;
    }
    if (is_sym("{")) {
      size_t line = cur().line;
      advance();
      auto first = parse_expr();
      if (is_sym("{")) {
        // replication {N{expr}}
        advance();
        auto inner = parse_expr();
        expect_sym("}");
        expect_sym("}");
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::repl;
        e->line = line;
        e->args.push_back(std::move(first));
        e->args.push_back(std::move(inner));
        return e;
      }
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::concat;
      e->line = line;
      e->args.push_back(std::move(first));
      while (is_sym(",")) {
        advance();
        e->args.push_back(parse_expr());
      }
      expect_sym("}");
      return e;
    }
    if (cur().kind == TokKind::ident) {
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::ident;
      e->line = cur().line;
      e->name = expect_ident();
      while (is_sym("[")) {
        advance();
        auto idx = parse_expr();
        if (is_sym(":")) {
          advance();
          auto low = parse_expr();
          if (idx->kind != Expr::Kind::number || low->kind != Expr::Kind::number)
            fail("part select bounds must be constants");
          auto slice = std::make_unique<Expr>();
          slice->kind = Expr::Kind::slice;
          slice->line = e->line;
          slice->msb = (int)to_uint(idx->literal);
          slice->lsb = (int)to_uint(low->literal);
          slice->args.push_back(std::move(e));
          e = std::move(slice);
        } else {
          auto sel = std::make_unique<Expr>();
          sel->kind = Expr::Kind::index;
          sel->line = e->line;
          sel->args.push_back(std::move(e));
          sel->args.push_back(std::move(idx));
          e = std::move(sel);
        }
        expect_sym("]");
      }
      return e;
    }
    fail("expected expression, got '" + cur().text + "'");
  }

  ExprPtr parse_unary() {
    static const std::set<std::string> unary_syms = {"~", "!", "&", "|", "^", "-", "+", "~^", "^~"};
    if (cur().kind == TokKind::symbol) {
      std::string op = cur().text;
      // reduction ~& and ~| appear as '~' '&' pairs in the lexer only if not
      // matched as two-char ops; handle "~&" / "~|" via lookahead.
      if (op == "~" && i + 1 < toks.size() && toks[i + 1].kind == TokKind::symbol &&
          (toks[i + 1].text == "&" || toks[i + 1].text == "|")) {
        advance();
        op += cur().text;
        advance();
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::unary;
        e->op = op;
        e->args.push_back(parse_unary());
        return e;
      }
      if (unary_syms.count(op)) {
        advance();
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::unary;
        e->op = op;
        e->args.push_back(parse_unary());
        return e;
      }
    }
    return parse_primary();
  }

  // precedence climbing
  int binary_prec(const std::string& op) {
    if (op == "*" || op == "/" || op == "%") return 10;
    if (op == "+" || op == "-") return 9;
    if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>") return 8;
    if (op == "<" || op == "<=" || op == ">" || op == ">=") return 7;
    if (op == "==" || op == "!=" || op == "===" || op == "!==") return 6;
    if (op == "&") return 5;
    if (op == "^" || op == "~^" || op == "^~") return 4;
    if (op == "|") return 3;
    if (op == "&&") return 2;
    if (op == "||") return 1;
    return -1;
  }

  ExprPtr parse_binary(int min_prec) {
    auto lhs = parse_unary();
    while (cur().kind == TokKind::symbol) {
      int prec = binary_prec(cur().text);
      if (prec < min_prec) break;
      std::string op = cur().text;
      advance();
      auto rhs = parse_binary(prec + 1);
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::binary;
      e->op = op;
      e->args.push_back(std::move(lhs));
      e->args.push_back(std::move(rhs));
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr parse_expr() {
    auto cond = parse_binary(1);
    if (is_sym("?")) {
      advance();
      auto t = parse_expr();
      expect_sym(":");
      auto f = parse_expr();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::ternary;
      e->args.push_back(std::move(cond));
      e->args.push_back(std::move(t));
      e->args.push_back(std::move(f));
      return e;
    }
    return cond;
  }

  ExprPtr parse_lvalue() {
    if (is_sym("{")) {
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::concat;
      e->line = cur().line;
      advance();
      e->args.push_back(parse_lvalue());
      while (is_sym(",")) {
        advance();
        e->args.push_back(parse_lvalue());
      }
      expect_sym("}");
      return e;
    }
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::ident;
    e->line = cur().line;
    e->name = expect_ident();
    if (is_sym("[")) {
      advance();
      auto idx = parse_expr();
      if (is_sym(":")) {
        advance();
        auto low = parse_expr();
        if (idx->kind != Expr::Kind::number || low->kind != Expr::Kind::number)
          fail("part select bounds must be constants");
        auto slice = std::make_unique<Expr>();
        slice->kind = Expr::Kind::slice;
        slice->line = e->line;
        slice->msb = (int)to_uint(idx->literal);
        slice->lsb = (int)to_uint(low->literal);
        slice->args.push_back(std::move(e));
        expect_sym("]");
        return slice;
      }
      auto sel = std::make_unique<Expr>();
      sel->kind = Expr::Kind::index;
      sel->line = e->line;
      sel->args.push_back(std::move(e));
      sel->args.push_back(std::move(idx));
      expect_sym("]");
      return sel;
    }
    return e;
  }

  std::pair<int, int> parse_range_opt() {
    if (!is_sym("[")) return {0, 0};
    advance();
    auto msb_e = parse_expr();
    expect_sym(":");
    auto lsb_e = parse_expr();
    expect_sym("]");
    if (msb_e->kind != Expr::Kind::number || lsb_e->kind != Expr::Kind::number)
      fail("net ranges must be constant");
    int msb = (int)to_uint(msb_e->literal);
    int lsb = (int)to_uint(lsb_e->literal);
    if (msb < lsb) fail("ascending ranges are not supported");
    if (msb - lsb + 1 > kMaxWidth) fail("nets wider than 64 bits are not supported");
    return {msb, lsb};
  }

  StmtPtr parse_statement() {
    auto s = std::make_unique<Stmt>();
    s->line = cur().line;
    if (is_ident("begin")) {
      advance();
      s->kind = Stmt::Kind::block;
      while (!is_ident("end")) {
        if (cur().kind == TokKind::eof) fail("unterminated begin/end block");
        s->body.push_back(parse_statement());
      }
      advance();
      return s;
    }
    if (is_ident("if")) {
      advance();
      s->kind = Stmt::Kind::if_;
      expect_sym("(");
      s->cond = parse_expr();
      expect_sym(")");
      s->then_branch = parse_statement();
      if (is_ident("else")) {
        advance();
        s->else_branch = parse_statement();
      }
      return s;
    }
    if (is_ident("for")) {
      advance();
      s->kind = Stmt::Kind::for_;
      expect_sym("(");
      s->init = parse_assign_core();
      expect_sym(";");
      s->cond = parse_expr();
      expect_sym(";");
      s->step = parse_assign_core();
      expect_sym(")");
      s->then_branch = parse_statement();
      return s;
    }
    if (is_sym("#")) {
      advance();
      if (cur().kind != TokKind::number) fail("expected delay amount after '#'");
      advance();
      s->kind = Stmt::Kind::delay;
      if (is_sym(";")) {
        advance();
        return s;
      }
      // delayed statement: execute delay, then the statement
      auto block = std::make_unique<Stmt>();
      block->kind = Stmt::Kind::block;
      block->line = s->line;
      block->body.push_back(std::move(s));
      block->body.push_back(parse_statement());
      return block;
    }
    if (is_ident("$display") || is_ident("$write")) {
      bool newline = cur().text == "$display";
      advance();
      s->kind = Stmt::Kind::display;
      expect_sym("(");
      if (cur().kind != TokKind::string) fail("$display needs a format string");
      s->format = cur().text + (newline ? "\n" : "");
      advance();
      while (is_sym(",")) {
        advance();
        s->args.push_back(parse_expr());
      }
      expect_sym(")");
      expect_sym(";");
      return s;
    }
    if (is_ident("$finish") || is_ident("$stop")) {
      advance();
      s->kind = Stmt::Kind::finish;
      if (is_sym("(")) {
        advance();
        if (cur().kind == TokKind::number) advance();
        expect_sym(")");
      }
      expect_sym(";");
      return s;
    }
    // assignment
    s = parse_assign_core();
    expect_sym(";");
    return s;
  }

  StmtPtr parse_assign_core() {
    auto s = std::make_unique<Stmt>();
    s->line = cur().line;
    s->kind = Stmt::Kind::assign;
    s->lhs = parse_lvalue();
    if (is_sym("=")) {
      advance();
    } else if (is_sym("<=")) {
      advance();  // treated as blocking; single-process testbenches only
    } else {
      fail("expected '=' in assignment");
    }
    s->rhs = parse_expr();
    return s;
  }

  void parse_net_decl(Module& m, NetKind kind,
                      std::optional<verilog::PortDir> dir) {
    // direction may be followed by a net keyword
    if (dir && (is_ident("wire") || is_ident("reg") || is_ident("logic"))) {
      kind = cur().text == "wire" ? NetKind::wire : NetKind::reg;
      advance();
    }
    if (is_ident("signed")) fail("signed nets are not supported");
    auto [msb, lsb] = kind == NetKind::integer_ ? std::pair<int, int>{31, 0} : parse_range_opt();
    while (true) {
      std::string name = expect_ident();
      auto it = m.nets.find(name);
      if (it == m.nets.end()) {
        m.nets[name] = Net{name, kind, msb, lsb};
      } else {
        // merging a port direction decl with an existing wire/reg decl (or
        // vice versa); widths must agree when both specify one
        if ((it->second.msb != msb || it->second.lsb != lsb) && (msb != 0 || lsb != 0) &&
            (it->second.msb != 0 || it->second.lsb != 0))
          fail("conflicting widths for net '" + name + "'");
        if (msb != 0 || lsb != 0) { it->second.msb = msb; it->second.lsb = lsb; }
        if (kind != NetKind::wire) it->second.kind = kind;
      }
      if (dir) {
        bool found = false;
        for (auto& p : m.ports)
          if (p.name == name) { p.dir = *dir; found = true; }
        if (!found)
          fail("'" + name + "' declared " +
               (*dir == verilog::PortDir::in ? "input" : "output") +
               " but is not in the port list of module '" + m.name + "'");
      }
      if (is_sym(",")) { advance(); continue; }
      break;
    }
    expect_sym(";");
  }

  Module parse_module() {
    Module m;
    m.file = file;
    if (!is_ident("module")) fail("expected 'module'");
    advance();
    m.name = expect_ident();
    if (is_sym("#")) fail("parameterized modules are not supported");
    if (is_sym("(")) {
      advance();
      std::optional<verilog::PortDir> cur_dir;
      std::pair<int, int> cur_range{0, 0};
      NetKind cur_kind = NetKind::wire;
      while (!is_sym(")")) {
        if (cur().kind == TokKind::eof) fail("unterminated port list");
        if (is_ident("input") || is_ident("output") || is_ident("inout")) {
          cur_dir = cur().text == "input" ? verilog::PortDir::in
                   : cur().text == "output" ? verilog::PortDir::out
                                            : verilog::PortDir::inout;
          advance();
          cur_kind = NetKind::wire;
          if (is_ident("wire") || is_ident("reg") || is_ident("logic")) {
            cur_kind = cur().text == "reg" ? NetKind::reg : NetKind::wire;
            advance();
          }
          cur_range = parse_range_opt();
          continue;
        }
        if (cur().kind == TokKind::ident) {
          std::string name = expect_ident();
          m.ports.push_back({name, cur_dir.value_or(verilog::PortDir::in)});
          if (cur_dir)
            m.nets[name] = Net{name, cur_kind, cur_range.first, cur_range.second};
          continue;
        }
        if (is_sym(",")) { advance(); continue; }
        fail("unexpected token '" + cur().text + "' in port list");
      }
      advance();
    }
    expect_sym(";");

    while (!is_ident("endmodule")) {
      if (cur().kind == TokKind::eof) fail("missing endmodule in module '" + m.name + "'");
      if (is_ident("input") || is_ident("output") || is_ident("inout")) {
        verilog::PortDir d = cur().text == "input" ? verilog::PortDir::in
                            : cur().text == "output" ? verilog::PortDir::out
                                                     : verilog::PortDir::inout;
        advance();
        parse_net_decl(m, NetKind::wire, d);
        continue;
      }
      if (is_ident("wire")) { advance(); parse_net_decl(m, NetKind::wire, std::nullopt); continue; }
      if (is_ident("reg")) { advance(); parse_net_decl(m, NetKind::reg, std::nullopt); continue; }
      if (is_ident("integer")) { advance(); parse_net_decl(m, NetKind::integer_, std::nullopt); continue; }
      if (is_ident("assign")) {
        advance();
        auto lhs = parse_lvalue();
        expect_sym("=");
        auto rhs = parse_expr();
        expect_sym(";");
        m.assigns.emplace_back(std::move(lhs), std::move(rhs));
        continue;
      }
      if (is_ident("initial")) {
        advance();
        m.initials.push_back(parse_statement());
        continue;
      }
      if (is_ident("always")) fail("always blocks are not supported (combinational subset)");
      if (cur().kind == TokKind::ident) {
        // instantiation: <type> <name> ( ... );
        Instance inst;
        inst.line = cur().line;
        inst.module_type = expect_ident();
        inst.instance_name = expect_ident();
        expect_sym("(");
        if (is_sym(".")) {
          inst.named = true;
          while (true) {
            expect_sym(".");
            Connection c;
            c.port = expect_ident();
            expect_sym("(");
            if (!is_sym(")")) c.expr = parse_expr();
            expect_sym(")");
            inst.conns.push_back(std::move(c));
            if (is_sym(",")) { advance(); continue; }
            break;
          }
        } else if (!is_sym(")")) {
          while (true) {
            Connection c;
            c.expr = parse_expr();
            inst.conns.push_back(std::move(c));
            if (is_sym(",")) { advance(); continue; }
            break;
          }
        }
        expect_sym(")");
        expect_sym(";");
        m.instances.push_back(std::move(inst));
        continue;
      }
      fail("unsupported construct at '" + cur().text + "'");
    }
    advance();  // endmodule
    return m;
  }

  std::vector<Module> parse_source() {
    std::vector<Module> out;
    while (cur().kind != TokKind::eof) {
      if (is_ident("module")) {
        out.push_back(parse_module());
        continue;
      }
      if (!cur().text.empty() && cur().text[0] == '`')
        fail("compiler directives are not supported");
      fail("expected 'module', got '" + cur().text + "'");
    }
    return out;
  }
};

// ---------------------------------------------------------------- program

struct Signal {
  std::string name;  // hierarchical, for diagnostics
  int msb = 0, lsb = 0;
  bool is_reg = false;
  int width() const { return msb - lsb + 1; }
};

// expression bound to flat signal ids
struct BExpr {
  Expr::Kind kind = Expr::Kind::number;
  Value literal;
  int signal = -1;
  std::string op;
  std::vector<std::unique_ptr<BExpr>> args;
  int msb = 0, lsb = 0;
  int self_width = 1;
  size_t line = 0;
};
using BExprPtr = std::unique_ptr<BExpr>;

struct BAssign {
  BExprPtr lhs;
  BExprPtr rhs;
};

struct BStmt {
  Stmt::Kind kind = Stmt::Kind::block;
  std::vector<std::unique_ptr<BStmt>> body;
  BExprPtr lhs, rhs, cond;
  std::unique_ptr<BStmt> then_branch, else_branch, init, step;
  std::string format;
  std::vector<BExprPtr> args;
  size_t line = 0;
};
using BStmtPtr = std::unique_ptr<BStmt>;

struct Program {
  std::vector<Signal> signals;
  std::vector<BAssign> assigns;
  std::vector<BStmtPtr> initials;
  std::string top;
};

struct Elaborator {
  const std::map<std::string, const Module*>& modules;
  Program prog;

  explicit Elaborator(const std::map<std::string, const Module*>& mods) : modules(mods) {}

  [[noreturn]] void fail(const Module& m, size_t line, const std::string& msg) const {
    throw CompileError(m.file + ":" + std::to_string(line) + ": in module '" + m.name +
                       "': " + msg);
  }

  struct Scope {
    const Module* module;
    std::string prefix;
    std::map<std::string, int> signal_ids;
  };

  int add_signal(const std::string& name, const Net& net) {
    prog.signals.push_back(
        {name, net.msb, net.lsb, net.kind != NetKind::wire});
    return (int)prog.signals.size() - 1;
  }

  BExprPtr bind(const Scope& sc, const Expr& e) {
    auto b = std::make_unique<BExpr>();
    b->kind = e.kind;
    b->op = e.op;
    b->line = e.line;
    b->msb = e.msb;
    b->lsb = e.lsb;
    switch (e.kind) {
      case Expr::Kind::number:
        b->literal = e.literal;
        b->self_width = e.literal.width;
        break;
      case Expr::Kind::ident: {
        auto it = sc.signal_ids.find(e.name);
        if (it == sc.signal_ids.end())
          fail(*sc.module, e.line, "unknown identifier '" + e.name + "'");
        b->signal = it->second;
        b->self_width = prog.signals[b->signal].width();
        break;
      }
      default:
        for (const auto& a : e.args) b->args.push_back(bind(sc, *a));
        b->self_width = compute_self_width(*b, sc, e);
        break;
    }
    return b;
  }

  int compute_self_width(const BExpr& b, const Scope& sc, const Expr& e) {
    switch (b.kind) {
      case Expr::Kind::number:
      case Expr::Kind::ident:
        return b.self_width;
      case Expr::Kind::unary: {
        if (b.op == "!" || b.op == "&" || b.op == "|" || b.op == "^" || b.op == "~&" ||
            b.op == "~|" || b.op == "~^" || b.op == "^~")
          return 1;
        return b.args[0]->self_width;
      }
      case Expr::Kind::binary: {
        const std::string& op = b.op;
        if (op == "==" || op == "!=" || op == "===" || op == "!==" || op == "<" ||
            op == "<=" || op == ">" || op == ">=" || op == "&&" || op == "||")
          return 1;
        if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>")
          return b.args[0]->self_width;
        return std::max(b.args[0]->self_width, b.args[1]->self_width);
      }
      case Expr::Kind::ternary:
        return std::max(b.args[1]->self_width, b.args[2]->self_width);
      case Expr::Kind::concat: {
        int w = 0;
        for (const auto& a : b.args) w += a->self_width;
        if (w > kMaxWidth) fail(*sc.module, e.line, "concatenation wider than 64 bits");
        return w;
      }
      case Expr::Kind::repl: {
        if (b.args[0]->kind != Expr::Kind::number)
          fail(*sc.module, e.line, "replication count must be constant");
        int count = (int)to_uint(b.args[0]->literal);
        int w = count * b.args[1]->self_width;
        if (count < 1 || w > kMaxWidth)
          fail(*sc.module, e.line, "bad replication width");
        return w;
      }
      case Expr::Kind::index:
        return 1;
      case Expr::Kind::slice: {
        const auto& base = *b.args[0];
        if (base.kind != Expr::Kind::ident)
          fail(*sc.module, e.line, "part select base must be a net");
        const Signal& s = prog.signals[base.signal];
        if (b.msb < b.lsb || b.lsb < s.lsb || b.msb > s.msb)
          fail(*sc.module, e.line,
               "part select [" + std::to_string(b.msb) + ":" + std::to_string(b.lsb) +
                   "] out of range for '" + s.name + "'");
        return b.msb - b.lsb + 1;
      }
    }
    return 1;
  }

  // check an lvalue shape
  void check_lvalue(const Scope& sc, const BExpr& b, size_t line, bool reg_required) {
    switch (b.kind) {
      case Expr::Kind::ident: {
        const Signal& s = prog.signals[b.signal];
        if (reg_required && !s.is_reg)
          fail(*sc.module, line, "'" + s.name + "' is a wire; behavioral assignments need a reg");
        if (!reg_required && s.is_reg)
          fail(*sc.module, line, "'" + s.name + "' is a reg; continuous assigns drive wires");
        return;
      }
      case Expr::Kind::index:
      case Expr::Kind::slice:
        check_lvalue(sc, *b.args[0], line, reg_required);
        return;
      case Expr::Kind::concat:
        for (const auto& a : b.args) check_lvalue(sc, *a, line, reg_required);
        return;
      default:
        fail(*sc.module, line, "invalid assignment target");
    }
  }

  Scope make_scope(const Module& m, const std::string& prefix) {
    Scope sc;
    sc.module = &m;
    sc.prefix = prefix;
    for (const auto& [name, net] : m.nets)
      sc.signal_ids[name] = add_signal(prefix + name, net);
    return sc;
  }

  void elaborate_module(const Module& m, const std::string& prefix, int depth,
                        Scope* out_scope) {
    if (depth > 20) fail(m, 0, "instantiation too deep (recursive modules?)");
    Scope sc = make_scope(m, prefix);

    for (const auto& [lhs, rhs] : m.assigns) {
      BAssign a;
      a.lhs = bind(sc, *lhs);
      a.rhs = bind(sc, *rhs);
      check_lvalue(sc, *a.lhs, lhs->line, /*reg_required=*/false);
      prog.assigns.push_back(std::move(a));
    }

    for (const auto& inst : m.instances) {
      auto mit = modules.find(inst.module_type);
      if (mit == modules.end())
        fail(m, inst.line, "unknown module '" + inst.module_type + "'");
      const Module& child = *mit->second;
      std::string child_prefix = prefix + inst.instance_name + ".";
      Scope child_scope;
      elaborate_module(child, child_prefix, depth + 1, &child_scope);

      // bind connections
      std::vector<std::pair<const PortDecl*, const Expr*>> bound;
      if (inst.named) {
        std::set<std::string> seen;
        for (const auto& c : inst.conns) {
          const PortDecl* port = nullptr;
          for (const auto& p : child.ports)
            if (p.name == c.port) port = &p;
          if (!port)
            fail(m, inst.line, "module '" + child.name + "' has no port '" + c.port + "'");
          if (!seen.insert(c.port).second)
            fail(m, inst.line, "port '" + c.port + "' connected twice");
          bound.emplace_back(port, c.expr.get());
        }
      } else {
        if (inst.conns.size() > child.ports.size())
          fail(m, inst.line, "too many connections for module '" + child.name + "'");
        for (size_t k = 0; k < inst.conns.size(); k++)
          bound.emplace_back(&child.ports[k], inst.conns[k].expr.get());
      }

      for (auto& [port, expr] : bound) {
        if (!expr) continue;  // unconnected
        auto cit = child_scope.signal_ids.find(port->name);
        if (cit == child_scope.signal_ids.end())
          fail(child, inst.line, "port '" + port->name + "' has no net");
        auto port_ref = std::make_unique<BExpr>();
        port_ref->kind = Expr::Kind::ident;
        port_ref->signal = cit->second;
        port_ref->self_width = prog.signals[cit->second].width();
        if (port->dir == verilog::PortDir::in) {
          BAssign a;
          a.lhs = std::move(port_ref);
          a.rhs = bind(sc, *expr);
          prog.assigns.push_back(std::move(a));
        } else {
          // output (or inout, treated as output): parent expression must be
          // an lvalue
          BAssign a;
          a.lhs = bind(sc, *expr);
          a.rhs = std::move(port_ref);
          check_lvalue(sc, *a.lhs, inst.line, /*reg_required=*/false);
          prog.assigns.push_back(std::move(a));
        }
      }
    }

    if (out_scope) *out_scope = std::move(sc);
  }

  BStmtPtr bind_stmt(const Scope& sc, const Stmt& s) {
    auto b = std::make_unique<BStmt>();
    b->kind = s.kind;
    b->format = s.format;
    b->line = s.line;
    switch (s.kind) {
      case Stmt::Kind::block:
        for (const auto& child : s.body) b->body.push_back(bind_stmt(sc, *child));
        break;
      case Stmt::Kind::assign:
        b->lhs = bind(sc, *s.lhs);
        b->rhs = bind(sc, *s.rhs);
        check_lvalue(sc, *b->lhs, s.line, /*reg_required=*/true);
        break;
      case Stmt::Kind::if_:
        b->cond = bind(sc, *s.cond);
        b->then_branch = bind_stmt(sc, *s.then_branch);
        if (s.else_branch) b->else_branch = bind_stmt(sc, *s.else_branch);
        break;
      case Stmt::Kind::for_:
        b->init = bind_stmt(sc, *s.init);
        b->cond = bind(sc, *s.cond);
        b->step = bind_stmt(sc, *s.step);
        b->then_branch = bind_stmt(sc, *s.then_branch);
        break;
      case Stmt::Kind::delay:
      case Stmt::Kind::finish:
        break;
      case Stmt::Kind::display:
        for (const auto& a : s.args) b->args.push_back(bind(sc, *a));
        break;
    }
    return b;
  }

  Program elaborate(const Module& top) {
    prog.top = top.name;
    Scope top_scope;
    elaborate_module(top, "", 0, &top_scope);
    for (const auto& ini : top.initials)
      prog.initials.push_back(bind_stmt(top_scope, *ini));
    // initial blocks anywhere else are unsupported
    for (const auto& [name, mod] : modules)
      if (mod != &top && !mod->initials.empty() && used_from(top, *mod))
        throw CompileError("module '" + name + "': initial blocks are only supported in the top module");
    return std::move(prog);
  }

  bool used_from(const Module& top, const Module& target) {
    std::set<std::string> visited;
    return search_uses(top, target.name, visited);
  }
  bool search_uses(const Module& m, const std::string& target, std::set<std::string>& visited) {
    if (!visited.insert(m.name).second) return false;
    for (const auto& inst : m.instances) {
      if (inst.module_type == target) return true;
      auto it = modules.find(inst.module_type);
      if (it != modules.end() && search_uses(*it->second, target, visited)) return true;
    }
    return false;
  }
};

// ---------------------------------------------------------------- interp

struct Interp {
  const Program& prog;
  std::vector<Value> values;
  std::string out;
  long statements = 0;
  long max_statements;
  bool finished = false;

  Interp(const Program& p, long max_stmts) : prog(p), max_statements(max_stmts) {
    values.reserve(prog.signals.size());
    for (const auto& s : prog.signals) values.push_back(all_x(s.width()));
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SimRuntimeError(msg); }

  Value eval(const BExpr& e, int context_width) {
    int w = std::max(context_width, e.self_width);
    switch (e.kind) {
      case Expr::Kind::number:
        return resize(e.literal, w);
      case Expr::Kind::ident:
        return resize(values[e.signal], w);
      case Expr::Kind::unary: {
        if (e.op == "~") return bit_not(eval(*e.args[0], w), w);
        if (e.op == "-") {
          Value a = eval(*e.args[0], w);
          if (!is_known(a)) return all_x(w);
          return make_value(w, ~a.bits + 1);
        }
        if (e.op == "+") return eval(*e.args[0], w);
        // reductions and logical not: operand self-determined
        Value a = eval(*e.args[0], e.args[0]->self_width);
        uint64_t m = mask_of(a.width);
        uint64_t known1 = a.bits & ~a.xmask;
        uint64_t known0 = ~a.bits & ~a.xmask & m;
        if (e.op == "!") {
          Bool3 b = bool3(a);
          return resize(from_bool3(b == Bool3::t ? Bool3::f : b == Bool3::f ? Bool3::t : Bool3::x), w);
        }
        Bool3 r;
        if (e.op == "&" ) r = known0 ? Bool3::f : a.xmask ? Bool3::x : Bool3::t;
        else if (e.op == "|") r = known1 ? Bool3::t : a.xmask ? Bool3::x : Bool3::f;
        else if (e.op == "^" || e.op == "~^" || e.op == "^~") {
          if (a.xmask) r = Bool3::x;
          else r = (__builtin_popcountll(a.bits & m) % 2) ? Bool3::t : Bool3::f;
          if (e.op != "^" && r != Bool3::x) r = r == Bool3::t ? Bool3::f : Bool3::t;
        }
        else if (e.op == "~&") { r = known0 ? Bool3::t : a.xmask ? Bool3::x : Bool3::f; }
        else if (e.op == "~|") { r = known1 ? Bool3::f : a.xmask ? Bool3::x : Bool3::t; }
        else fail("unsupported unary operator " + e.op);
        return resize(from_bool3(r), w);
      }
      case Expr::Kind::binary:
        return eval_binary(e, w);
      case Expr::Kind::ternary: {
        Bool3 c = bool3(eval(*e.args[0], e.args[0]->self_width));
        if (c == Bool3::t) return eval(*e.args[1], w);
        if (c == Bool3::f) return eval(*e.args[2], w);
        return merge(eval(*e.args[1], w), eval(*e.args[2], w), w);
      }
      case Expr::Kind::concat: {
        uint64_t bits = 0, xm = 0;
        int total = 0;
        for (const auto& a : e.args) {
          Value v = eval(*a, a->self_width);
          v = resize(v, a->self_width);
          bits = (bits << v.width) | v.bits;
          xm = (xm << v.width) | v.xmask;
          total += v.width;
        }
        return resize(make_value(total, bits, xm), w);
      }
      case Expr::Kind::repl: {
        int count = (int)to_uint(e.args[0]->literal);
        Value v = eval(*e.args[1], e.args[1]->self_width);
        v = resize(v, e.args[1]->self_width);
        uint64_t bits = 0, xm = 0;
        for (int k = 0; k < count; k++) {
          bits = (bits << v.width) | v.bits;
          xm = (xm << v.width) | v.xmask;
        }
        return resize(make_value(count * v.width, bits, xm), w);
      }
      case Expr::Kind::index: {
        const BExpr& base = *e.args[0];
        if (base.kind != Expr::Kind::ident) fail("bit select base must be a net");
        const Signal& s = prog.signals[base.signal];
        Value idx = eval(*e.args[1], e.args[1]->self_width);
        if (!is_known(idx)) return resize(all_x(1), w);
        int64_t bit = (int64_t)to_uint(idx);
        if (bit < s.lsb || bit > s.msb) return resize(all_x(1), w);
        int off = (int)(bit - s.lsb);
        const Value& v = values[base.signal];
        return resize(make_value(1, (v.bits >> off) & 1, (v.xmask >> off) & 1), w);
      }
      case Expr::Kind::slice: {
        const BExpr& base = *e.args[0];
        const Signal& s = prog.signals[base.signal];
        int off = e.lsb - s.lsb;
        int sw = e.msb - e.lsb + 1;
        const Value& v = values[base.signal];
        return resize(make_value(sw, v.bits >> off, v.xmask >> off), w);
      }
    }
    fail("unreachable expression kind");
  }

  Value eval_binary(const BExpr& e, int w) {
    const std::string& op = e.op;
    if (op == "&&" || op == "||") {
      Bool3 a = bool3(eval(*e.args[0], e.args[0]->self_width));
      Bool3 b = bool3(eval(*e.args[1], e.args[1]->self_width));
      Bool3 r;
      if (op == "&&")
        r = (a == Bool3::f || b == Bool3::f) ? Bool3::f
            : (a == Bool3::t && b == Bool3::t) ? Bool3::t : Bool3::x;
      else
        r = (a == Bool3::t || b == Bool3::t) ? Bool3::t
            : (a == Bool3::f && b == Bool3::f) ? Bool3::f : Bool3::x;
      return resize(from_bool3(r), w);
    }
    if (op == "==" || op == "!=" || op == "===" || op == "!==" || op == "<" || op == "<=" ||
        op == ">" || op == ">=") {
      int cw = std::max(e.args[0]->self_width, e.args[1]->self_width);
      Value a = eval(*e.args[0], cw), b = eval(*e.args[1], cw);
      if (op == "===" || op == "!==") {
        bool eq = a.bits == b.bits && a.xmask == b.xmask;
        return resize(make_value(1, (op == "===") == eq), w);
      }
      if (!is_known(a) || !is_known(b)) return resize(all_x(1), w);
      bool r;
      if (op == "==") r = a.bits == b.bits;
      else if (op == "!=") r = a.bits != b.bits;
      else if (op == "<") r = a.bits < b.bits;
      else if (op == "<=") r = a.bits <= b.bits;
      else if (op == ">") r = a.bits > b.bits;
      else r = a.bits >= b.bits;
      return resize(make_value(1, r), w);
    }
    if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>") {
      Value a = eval(*e.args[0], w);
      Value n = eval(*e.args[1], e.args[1]->self_width);
      if (!is_known(n)) return all_x(w);
      uint64_t sh = to_uint(n);
      if (sh >= 64) return make_value(w, 0, 0);
      if (op == "<<" || op == "<<<")
        return make_value(w, a.bits << sh, a.xmask << sh);
      return make_value(w, a.bits >> sh, a.xmask >> sh);
    }
    if (op == "&") return bit_and(eval(*e.args[0], w), eval(*e.args[1], w), w);
    if (op == "|") return bit_or(eval(*e.args[0], w), eval(*e.args[1], w), w);
    if (op == "^") return bit_xor(eval(*e.args[0], w), eval(*e.args[1], w), w);
    if (op == "~^" || op == "^~")
      return bit_not(bit_xor(eval(*e.args[0], w), eval(*e.args[1], w), w), w);
    // arithmetic: x poisons the whole result
    Value a = eval(*e.args[0], w), b = eval(*e.args[1], w);
    if (!is_known(a) || !is_known(b)) return all_x(w);
    uint64_t r;
    if (op == "+") r = a.bits + b.bits;
    else if (op == "-") r = a.bits - b.bits;
    else if (op == "*") r = a.bits * b.bits;
    else if (op == "/") { if (b.bits == 0) return all_x(w); r = a.bits / b.bits; }
    else if (op == "%") { if (b.bits == 0) return all_x(w); r = a.bits % b.bits; }
    else fail("unsupported binary operator " + op);
    return make_value(w, r);
  }

  int lvalue_width(const BExpr& lhs) {
    switch (lhs.kind) {
      case Expr::Kind::ident: return prog.signals[lhs.signal].width();
      case Expr::Kind::index: return 1;
      case Expr::Kind::slice: return lhs.msb - lhs.lsb + 1;
      case Expr::Kind::concat: {
        int w = 0;
        for (const auto& a : lhs.args) w += lvalue_width(*a);
        return w;
      }
      default: fail("bad lvalue");
    }
  }

  // returns true if any stored bit changed
  bool write_lvalue(const BExpr& lhs, const Value& val) {
    switch (lhs.kind) {
      case Expr::Kind::ident: {
        const Signal& s = prog.signals[lhs.signal];
        Value v = resize(val, s.width());
        if (values[lhs.signal] == v) return false;
        values[lhs.signal] = v;
        return true;
      }
      case Expr::Kind::index: {
        const Signal& s = prog.signals[lhs.args[0]->signal];
        Value idx = eval(*lhs.args[1], lhs.args[1]->self_width);
        if (!is_known(idx)) return false;  // write to unknown index is lost
        int64_t bit = (int64_t)to_uint(idx);
        if (bit < s.lsb || bit > s.msb) return false;
        int off = (int)(bit - s.lsb);
        Value cur = values[lhs.args[0]->signal];
        Value b = resize(val, 1);
        uint64_t bm = 1ull << off;
        uint64_t nbits = (cur.bits & ~bm) | ((b.bits & 1) << off);
        uint64_t nx = (cur.xmask & ~bm) | ((b.xmask & 1) << off);
        Value nv = make_value(s.width(), nbits, nx);
        if (values[lhs.args[0]->signal] == nv) return false;
        values[lhs.args[0]->signal] = nv;
        return true;
      }
      case Expr::Kind::slice: {
        const Signal& s = prog.signals[lhs.args[0]->signal];
        int off = lhs.lsb - s.lsb;
        int sw = lhs.msb - lhs.lsb + 1;
        Value cur = values[lhs.args[0]->signal];
        Value b = resize(val, sw);
        uint64_t m = mask_of(sw) << off;
        uint64_t nbits = (cur.bits & ~m) | (b.bits << off);
        uint64_t nx = (cur.xmask & ~m) | (b.xmask << off);
        Value nv = make_value(s.width(), nbits, nx);
        if (values[lhs.args[0]->signal] == nv) return false;
        values[lhs.args[0]->signal] = nv;
        return true;
      }
      case Expr::Kind::concat: {
        // MSB-first split
        int total = lvalue_width(lhs);
        Value v = resize(val, total);
        bool changed = false;
        int pos = total;
        for (const auto& part : lhs.args) {
          int pw = lvalue_width(*part);
          pos -= pw;
          Value slice = make_value(pw, v.bits >> pos, v.xmask >> pos);
          changed |= write_lvalue(*part, slice);
        }
        return changed;
      }
      default:
        fail("bad lvalue");
    }
  }

  void settle() {
    const int max_sweeps = 200;
    for (int sweep = 0; sweep < max_sweeps; sweep++) {
      bool changed = false;
      for (const auto& a : prog.assigns) {
        int w = lvalue_width(*a.lhs);
        Value v = eval(*a.rhs, w);
        changed |= write_lvalue(*a.lhs, resize(v, w));
      }
      if (!changed) return;
    }
    fail("combinational network did not settle (feedback loop?)");
  }

  void format_display(const BStmt& s) {
    std::string result;
    size_t arg = 0;
    const std::string& f = s.format;
    for (size_t k = 0; k < f.size(); k++) {
      char c = f[k];
      if (c == '\\' && k + 1 < f.size()) {
        char n = f[k + 1];
        if (n == 'n') { result += '\n'; k++; continue; }
        if (n == 't') { result += '\t'; k++; continue; }
        if (n == '\\' || n == '"') { result += n; k++; continue; }
        result += c;
        continue;
      }
      if (c != '%') { result += c; continue; }
      if (k + 1 >= f.size()) { result += c; continue; }
      k++;
      std::string spec;
      while (k < f.size() && std::isdigit((unsigned char)f[k])) spec += f[k++];
      char conv = k < f.size() ? (char)std::tolower((unsigned char)f[k]) : '%';
      if (conv == '%') { result += '%'; continue; }
      if (arg >= s.args.size()) fail("$display: not enough arguments for format");
      Value v = eval(*s.args[arg], s.args[arg]->self_width);
      arg++;
      if (conv == 'd') {
        result += is_known(v) ? std::to_string(to_uint(v)) : "x";
      } else if (conv == 'b') {
        for (int bit = v.width - 1; bit >= 0; bit--)
          result += (v.xmask >> bit) & 1 ? 'x' : ((v.bits >> bit) & 1 ? '1' : '0');
      } else if (conv == 'h') {
        int digits = (v.width + 3) / 4;
        for (int d = digits - 1; d >= 0; d--) {
          uint64_t xm = (v.xmask >> (4 * d)) & 0xf;
          uint64_t bits = (v.bits >> (4 * d)) & 0xf;
          result += xm ? 'x' : "0123456789abcdef"[bits];
        }
      } else if (conv == 's') {
        result += is_known(v) ? std::to_string(to_uint(v)) : "x";
      } else {
        fail(std::string("$display: unsupported format %") + conv);
      }
    }
    out += result;
  }

  // returns false when $finish was hit
  bool exec(const BStmt& s) {
    if (finished) return false;
    if (++statements > max_statements)
      fail("statement budget exhausted (runaway testbench loop?)");
    switch (s.kind) {
      case Stmt::Kind::block:
        for (const auto& child : s.body)
          if (!exec(*child)) return false;
        return true;
      case Stmt::Kind::assign: {
        int w = lvalue_width(*s.lhs);
        write_lvalue(*s.lhs, resize(eval(*s.rhs, w), w));
        return true;
      }
      case Stmt::Kind::if_: {
        Bool3 c = bool3(eval(*s.cond, s.cond->self_width));
        if (c == Bool3::t) return exec(*s.then_branch);
        if (s.else_branch) return exec(*s.else_branch);
        return true;
      }
      case Stmt::Kind::for_: {
        if (!exec(*s.init)) return false;
        while (true) {
          if (++statements > max_statements)
            fail("statement budget exhausted (runaway for loop?)");
          Bool3 c = bool3(eval(*s.cond, s.cond->self_width));
          if (c != Bool3::t) return true;
          if (!exec(*s.then_branch)) return false;
          if (!exec(*s.step)) return false;
        }
      }
      case Stmt::Kind::delay:
        settle();
        return true;
      case Stmt::Kind::display:
        format_display(s);
        return true;
      case Stmt::Kind::finish:
        finished = true;
        return false;
    }
    return true;
  }

  SimOutput run() {
    settle();
    for (const auto& ini : prog.initials)
      if (!exec(*ini)) break;
    SimOutput result;
    result.display_output = out;
    result.statements = statements;
    result.finished = finished;
    return result;
  }
};

}  // namespace

// ---------------------------------------------------------------- Design

struct Design::Impl {
  std::vector<Module> modules;
  std::map<std::string, const Module*> by_name;
  const Module* top = nullptr;
  Program program;
};

Design::Design() : impl_(new Impl) {}
Design::Design(Design&&) noexcept = default;
Design& Design::operator=(Design&&) noexcept = default;
Design::~Design() = default;

const std::string& Design::top() const { return impl_->top->name; }

Design Design::compile(const std::vector<SourceFile>& files, const std::string& top_hint) {
  Design d;
  for (const auto& f : files) {
    std::vector<Token> toks;
    try {
      toks = verilog::lex(f.content);
    } catch (const std::exception& e) {
      throw CompileError(f.name + ": " + e.what());
    }
    Parser parser(toks, f.name);
    for (auto& m : parser.parse_source()) d.impl_->modules.push_back(std::move(m));
  }
  if (d.impl_->modules.empty()) throw CompileError("no modules found");
  for (const auto& m : d.impl_->modules) {
    if (d.impl_->by_name.count(m.name))
      throw CompileError("duplicate module '" + m.name + "'");
    d.impl_->by_name[m.name] = &m;
  }

  if (!top_hint.empty()) {
    auto it = d.impl_->by_name.find(top_hint);
    if (it == d.impl_->by_name.end())
      throw CompileError("requested top module '" + top_hint + "' not found");
    d.impl_->top = it->second;
  } else {
    std::set<std::string> instantiated;
    for (const auto& m : d.impl_->modules)
      for (const auto& inst : m.instances) instantiated.insert(inst.module_type);
    std::vector<const Module*> roots;
    for (const auto& m : d.impl_->modules)
      if (!instantiated.count(m.name)) roots.push_back(&m);
    std::vector<const Module*> with_initial;
    for (const Module* r : roots)
      if (!r->initials.empty()) with_initial.push_back(r);
    if (with_initial.size() == 1) {
      d.impl_->top = with_initial[0];
    } else if (with_initial.empty()) {
      throw CompileError("no top module with an initial block found; pass --top");
    } else {
      std::string names;
      for (auto* r : with_initial) names += " " + r->name;
      throw CompileError("ambiguous top module, candidates:" + names);
    }
  }

  Elaborator elab(d.impl_->by_name);
  d.impl_->program = elab.elaborate(*d.impl_->top);
  return d;
}

SimOutput Design::run(long max_statements) const {
  Interp interp(impl_->program, max_statements);
  return interp.run();
}

}  // namespace rtleval::minisim
