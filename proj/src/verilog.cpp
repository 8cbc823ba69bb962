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

#include "rtleval/verilog.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>

namespace rtleval::verilog {

static bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_' || c == '$' || c == '`'; }
static bool ident_char(char c) { return std::isalnum((unsigned char)c) || c == '_' || c == '$'; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  size_t i = 0, line = 1;
  auto peek = [&](size_t off) -> char { return i + off < src.size() ? src[i + off] : '\0'; };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') { line++; i++; continue; }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') { i++; continue; }
    if (c == '/' && peek(1) == '/') {
      while (i < src.size() && src[i] != '\n') i++;
      continue;
    }
    if (c == '/' && peek(1) == '*') {
      i += 2;
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) {
        if (src[i] == '\n') line++;
        i++;
      }
      if (i + 1 >= src.size()) throw std::runtime_error("unterminated block comment");
      i += 2;
      continue;
    }
    Token t;
    t.pos = i;
    t.line = line;
    if (c == '"') {
      t.kind = TokKind::string;
      size_t b = ++i;
      std::string text;
      while (i < src.size() && src[i] != '"') {
        if (src[i] == '\\' && i + 1 < src.size()) { text += src[i]; text += src[i + 1]; i += 2; continue; }
        if (src[i] == '\n') throw std::runtime_error("unterminated string at line " + std::to_string(line));
        text += src[i++];
      }
      if (i >= src.size()) throw std::runtime_error("unterminated string at line " + std::to_string(line));
      (void)b;
      i++;  // closing quote
      t.text = text;
      out.push_back(t);
      continue;
    }
    if (ident_start(c)) {
      size_t b = i;
      i++;
      while (i < src.size() && ident_char(src[i])) i++;
      t.kind = TokKind::ident;
      t.text = std::string(src.substr(b, i - b));
      out.push_back(t);
      continue;
    }
    if (std::isdigit((unsigned char)c) || c == '\'') {
      // number: [size]'[base]digits  or plain decimal
      size_t b = i;
      while (i < src.size() && (std::isdigit((unsigned char)src[i]) || src[i] == '_')) i++;
      if (i < src.size() && src[i] == '\'') {
        i++;
        if (i < src.size() && (src[i] == 's' || src[i] == 'S')) i++;
        if (i >= src.size()) throw std::runtime_error("truncated number literal");
        char base = (char)std::tolower((unsigned char)src[i]);
        if (base != 'b' && base != 'd' && base != 'h' && base != 'o')
          throw std::runtime_error("bad number base at line " + std::to_string(line));
        i++;
        while (i < src.size() && (std::isalnum((unsigned char)src[i]) || src[i] == '_' ||
                                  src[i] == 'x' || src[i] == 'z' || src[i] == '?'))
          i++;
      }
      t.kind = TokKind::number;
      t.text = std::string(src.substr(b, i - b));
      out.push_back(t);
      continue;
    }
    // multi-char operators, longest first
    static const char* ops3[] = {"===", "!==", "<<<", ">>>"};
    static const char* ops2[] = {"==", "!=", "<=", ">=", "<<", ">>", "&&", "||", "~^", "^~", "**"};
    std::string sym;
    for (const char* op : ops3)
      if (src.substr(i, 3) == op) { sym = op; break; }
    if (sym.empty())
      for (const char* op : ops2)
        if (src.substr(i, 2) == op) { sym = op; break; }
    if (sym.empty()) {
      static const std::string singles = "()[]{};:,.#?=+-*/%&|^~!<>@";
      if (singles.find(c) == std::string::npos)
        throw std::runtime_error(std::string("unexpected character '") + c + "' at line " +
                                 std::to_string(line));
      sym = std::string(1, c);
    }
    t.kind = TokKind::symbol;
    t.text = sym;
    i += sym.size();
    out.push_back(t);
    continue;
  }
  Token eof;
  eof.kind = TokKind::eof;
  eof.pos = src.size();
  eof.line = line;
  out.push_back(eof);
  return out;
}

namespace {

struct Cursor {
  const std::vector<Token>& toks;
  size_t i = 0;
  const Token& cur() const { return toks[i]; }
  bool is_ident(std::string_view s) const {
    return cur().kind == TokKind::ident && cur().text == s;
  }
  bool is_sym(std::string_view s) const {
    return cur().kind == TokKind::symbol && cur().text == s;
  }
  void next() { if (i + 1 < toks.size()) i++; }
  bool at_end() const { return cur().kind == TokKind::eof; }
};

int eval_const_int(Cursor& c) {
  // constant expressions in ranges: integer literals, possibly negated
  bool neg = false;
  if (c.is_sym("-")) { neg = true; c.next(); }
  if (c.cur().kind != TokKind::number)
    throw std::runtime_error("expected constant in range at line " + std::to_string(c.cur().line));
  const std::string& t = c.cur().text;
  if (t.find('\'') != std::string::npos)
    throw std::runtime_error("based literal not supported in port range");
  int v = std::stoi(t);
  c.next();
  return neg ? -v : v;
}

// Parses "[msb:lsb]" if present; returns {0,0} otherwise.
std::pair<int, int> maybe_range(Cursor& c) {
  if (!c.is_sym("[")) return {0, 0};
  c.next();
  int msb = eval_const_int(c);
  if (!c.is_sym(":")) throw std::runtime_error("expected ':' in range at line " + std::to_string(c.cur().line));
  c.next();
  int lsb = eval_const_int(c);
  if (!c.is_sym("]")) throw std::runtime_error("expected ']' in range at line " + std::to_string(c.cur().line));
  c.next();
  return {msb, lsb};
}

std::optional<PortDir> dir_keyword(const Token& t) {
  if (t.kind != TokKind::ident) return std::nullopt;
  if (t.text == "input") return PortDir::in;
  if (t.text == "output") return PortDir::out;
  if (t.text == "inout") return PortDir::inout;
  return std::nullopt;
}

void skip_balanced_parens(Cursor& c) {
  // c is at '('
  int depth = 0;
  do {
    if (c.is_sym("(")) depth++;
    if (c.is_sym(")")) depth--;
    c.next();
  } while (depth > 0 && !c.at_end());
}

}  // namespace

std::vector<std::string> module_names(std::string_view source) {
  auto toks = lex(source);
  std::vector<std::string> names;
  for (size_t i = 0; i + 1 < toks.size(); i++) {
    if (toks[i].kind == TokKind::ident &&
        (toks[i].text == "module" || toks[i].text == "macromodule") &&
        toks[i + 1].kind == TokKind::ident)
      names.push_back(toks[i + 1].text);
  }
  return names;
}

ModuleHeader parse_module_header(std::string_view source, std::string_view module_name) {
  auto toks = lex(source);
  Cursor c{toks};
  // find "module <name>"
  while (!c.at_end()) {
    if (c.is_ident("module") || c.is_ident("macromodule")) {
      c.next();
      if (c.cur().kind == TokKind::ident && c.cur().text == module_name) break;
      continue;
    }
    c.next();
  }
  if (c.at_end())
    throw std::runtime_error("module '" + std::string(module_name) + "' not found");
  c.next();  // past name

  ModuleHeader h;
  h.name = std::string(module_name);

  if (c.is_sym("#")) {  // parameter list
    c.next();
    if (c.is_sym("(")) skip_balanced_parens(c);
  }

  std::vector<std::string> header_order;
  std::map<std::string, Port> decls;
  bool ansi = false;

  if (c.is_sym("(")) {
    c.next();
    PortDir cur_dir = PortDir::in;
    std::pair<int, int> cur_range{0, 0};
    bool have_dir = false;
    while (!c.is_sym(")")) {
      if (c.at_end()) throw std::runtime_error("unterminated port list of '" + h.name + "'");
      if (auto d = dir_keyword(c.cur())) {
        ansi = true;
        cur_dir = *d;
        have_dir = true;
        c.next();
        // optional net type / signedness
        while (c.is_ident("wire") || c.is_ident("reg") || c.is_ident("logic") || c.is_ident("signed"))
          c.next();
        cur_range = maybe_range(c);
        continue;
      }
      if (c.cur().kind == TokKind::ident) {
        std::string name = c.cur().text;
        header_order.push_back(name);
        if (ansi) {
          if (!have_dir)
            throw std::runtime_error("port '" + name + "' lacks a direction in ANSI list");
          decls[name] = Port{name, cur_dir, cur_range.first, cur_range.second};
        }
        c.next();
        continue;
      }
      if (c.is_sym(",")) { c.next(); continue; }
      throw std::runtime_error("unexpected token '" + c.cur().text + "' in port list of '" +
                               h.name + "' at line " + std::to_string(c.cur().line));
    }
    c.next();  // ')'
  }
  if (c.is_sym(";")) c.next();

  if (!ansi && !header_order.empty()) {
    // scan body declarations until endmodule
    while (!c.at_end() && !c.is_ident("endmodule")) {
      if (auto d = dir_keyword(c.cur())) {
        c.next();
        while (c.is_ident("wire") || c.is_ident("reg") || c.is_ident("logic") || c.is_ident("signed"))
          c.next();
        auto range = maybe_range(c);
        while (c.cur().kind == TokKind::ident) {
          decls[c.cur().text] = Port{c.cur().text, *d, range.first, range.second};
          c.next();
          if (c.is_sym(",")) { c.next(); continue; }
          break;
        }
        continue;
      }
      c.next();
    }
  }

  for (const auto& name : header_order) {
    auto it = decls.find(name);
    if (it == decls.end())
      throw std::runtime_error("port '" + name + "' of module '" + h.name +
                               "' has no input/output declaration");
    h.ports.push_back(it->second);
  }
  return h;
}

std::string rename_identifier(std::string_view source, std::string_view from,
                              std::string_view to) {
  auto toks = lex(source);
  std::string out;
  size_t copied = 0;
  for (const auto& t : toks) {
    if (t.kind == TokKind::ident && t.text == from) {
      out += source.substr(copied, t.pos - copied);
      out += to;
      copied = t.pos + from.size();
    }
  }
  out += source.substr(copied);
  return out;
}

std::string format_module_interface(const ModuleHeader& h) {
  std::string out = "module " + h.name + "(";
  for (size_t i = 0; i < h.ports.size(); i++) {
    const Port& p = h.ports[i];
    if (i) out += ", ";
    out += p.dir == PortDir::in ? "input" : p.dir == PortDir::out ? "output" : "inout";
    if (p.msb != 0 || p.lsb != 0)
      out += " [" + std::to_string(p.msb) + ":" + std::to_string(p.lsb) + "]";
    out += " " + p.name;
  }
  out += ");";
  return out;
}

}  // namespace rtleval::verilog
