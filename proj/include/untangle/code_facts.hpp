#pragma once

// Parser for the Smalltalk method subset recorded in change events, plus
// the facts the voters read off a method: sent selectors, accessed
// variables, and a whitespace/comment-free canonical form.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <iterator>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "untangle/error.hpp"

namespace untangle {

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("syntax error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

enum class LiteralKind { Number, String, Symbol, Character, Boolean, Nil, Array };

enum class NodeKind { Literal, Variable, Assignment, Send, Cascade, CascadeMessage, Block, Return };

/// Expression node. The meaning of `text` and `children` depends on kind:
///   Literal        text = normalized literal text, children = array elements
///   Variable       text = name
///   Assignment     text = target name, children = [value]
///   Send           text = selector, children = [receiver, args...]
///   Cascade        children = [receiver, CascadeMessage...]
///   CascadeMessage text = selector, children = [args...]
///   Block          args/temps, children = statements
///   Return         children = [value]
struct AstNode {
  NodeKind kind = NodeKind::Literal;
  LiteralKind literal = LiteralKind::Number;
  std::string text;
  std::vector<AstNode> children;
  std::vector<std::string> args;
  std::vector<std::string> temps;
};

inline bool operator==(const AstNode& a, const AstNode& b) {
  if (a.kind != b.kind || a.text != b.text || a.args != b.args || a.temps != b.temps) return false;
  if (a.kind == NodeKind::Literal && a.literal != b.literal) return false;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!(a.children[i] == b.children[i])) return false;
  }
  return true;
}

enum class PatternKind { Unary, Binary, Keyword };

struct MethodAst {
  PatternKind pattern = PatternKind::Unary;
  std::string selector;
  std::vector<std::string> argNames;
  std::vector<std::string> temps;
  std::vector<AstNode> body;

  bool operator==(const MethodAst&) const = default;
};

struct MethodFacts {
  std::string selector;
  std::set<std::string> sends;
  std::set<std::string> accesses;
  std::string canonicalForm;

  bool operator==(const MethodFacts&) const = default;
};

inline bool is_pseudo_variable(std::string_view name) {
  return name == "self" || name == "super" || name == "thisContext" || name == "true" ||
         name == "false" || name == "nil";
}

inline std::vector<std::string> keyword_parts(std::string_view selector) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i < selector.size(); ++i) {
    if (selector[i] == ':') {
      parts.emplace_back(selector.substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  return parts;
}

namespace detail {

enum class Tok {
  Identifier,
  Keyword,
  Binary,
  Number,
  String,
  Symbol,
  Character,
  ArrayOpen,  // #(
  Assign,
  Caret,
  Period,
  Semicolon,
  Colon,
  Bar,
  LParen,
  RParen,
  LBracket,
  RBracket,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

inline bool is_binary_char(char c) {
  switch (c) {
    case '+': case '-': case '*': case '/': case '\\': case '<': case '>':
    case '=': case '~': case '@': case '%': case '&': case '?': case ',':
      return true;
    default:
      return false;
  }
}

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blanks_and_comments();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", pos_});
        return out;
      }
      out.push_back(next(out.empty() ? Tok::End : out.back().kind));
    }
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void skip_blanks_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '"') {
        const std::size_t start = pos_;
        auto close = src_.find('"', pos_ + 1);
        if (close == std::string_view::npos) throw ParseError(start, "unterminated comment");
        pos_ = close + 1;
      } else {
        return;
      }
    }
  }

  static bool ends_operand(Tok t) {
    return t == Tok::Identifier || t == Tok::Number || t == Tok::String || t == Tok::Symbol ||
           t == Tok::Character || t == Tok::RParen || t == Tok::RBracket;
  }

  std::string read_identifier() {
    const std::size_t start = pos_;
    while (is_ident_char(peek())) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string read_quoted() {
    const std::size_t start = pos_;
    ++pos_;
    std::string text;
    for (;;) {
      if (pos_ >= src_.size()) throw ParseError(start, "unterminated string");
      char c = src_[pos_++];
      if (c == '\'') {
        if (peek() == '\'') {
          text += '\'';
          ++pos_;
        } else {
          return text;
        }
      } else {
        text += c;
      }
    }
  }

  Token read_number(std::size_t start) {
    while (is_digit(peek())) ++pos_;
    if (peek() == '.' && is_digit(peek(1))) {
      ++pos_;
      while (is_digit(peek())) ++pos_;
    }
    if (peek() == 'e' && (is_digit(peek(1)) || (peek(1) == '-' && is_digit(peek(2))))) {
      pos_ += peek(1) == '-' ? 2 : 1;
      while (is_digit(peek())) ++pos_;
    }
    return {Tok::Number, std::string(src_.substr(start, pos_ - start)), start};
  }

  Token next(Tok previous) {
    const std::size_t start = pos_;
    const char c = peek();
    if (is_ident_start(c)) {
      std::string name = read_identifier();
      if (peek() == ':' && peek(1) != '=') {
        ++pos_;
        return {Tok::Keyword, name + ":", start};
      }
      return {Tok::Identifier, std::move(name), start};
    }
    if (is_digit(c)) return read_number(start);
    if (c == '-' && is_digit(peek(1)) && !ends_operand(previous)) {
      ++pos_;
      return read_number(start);
    }
    if (c == '\'') return {Tok::String, read_quoted(), start};
    if (c == '$') {
      if (pos_ + 1 >= src_.size()) throw ParseError(start, "character literal without character");
      pos_ += 2;
      return {Tok::Character, std::string(1, src_[start + 1]), start};
    }
    if (c == '#') return read_hash(start);
    if (c == ':') {
      if (peek(1) == '=') {
        pos_ += 2;
        return {Tok::Assign, ":=", start};
      }
      ++pos_;
      return {Tok::Colon, ":", start};
    }
    if (is_binary_char(c)) {
      while (is_binary_char(peek())) ++pos_;
      return {Tok::Binary, std::string(src_.substr(start, pos_ - start)), start};
    }
    ++pos_;
    switch (c) {
      case '^': return {Tok::Caret, "^", start};
      case '.': return {Tok::Period, ".", start};
      case ';': return {Tok::Semicolon, ";", start};
      case '|': return {Tok::Bar, "|", start};
      case '(': return {Tok::LParen, "(", start};
      case ')': return {Tok::RParen, ")", start};
      case '[': return {Tok::LBracket, "[", start};
      case ']': return {Tok::RBracket, "]", start};
      default: break;
    }
    throw ParseError(start, std::string("unexpected character '") + c + "'");
  }

  Token read_hash(std::size_t start) {
    ++pos_;
    const char c = peek();
    if (c == '(') {
      ++pos_;
      return {Tok::ArrayOpen, "#(", start};
    }
    if (c == '\'') return {Tok::Symbol, read_quoted(), start};
    if (is_ident_start(c)) {
      std::string name = read_identifier();
      // keyword symbols such as #at:put:
      while (peek() == ':') {
        ++pos_;
        name += ':';
        if (!is_ident_start(peek())) break;
        name += read_identifier();
        if (peek() != ':') throw ParseError(start, "malformed keyword symbol");
      }
      return {Tok::Symbol, std::move(name), start};
    }
    if (is_binary_char(c) || c == '|') {
      const std::size_t from = pos_;
      while (is_binary_char(peek()) || peek() == '|') ++pos_;
      return {Tok::Symbol, std::string(src_.substr(from, pos_ - from)), start};
    }
    throw ParseError(start, "unsupported '#' literal");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(Lexer(src).run()) {}

  MethodAst method() {
    MethodAst m;
    const Token& first = peek();
    if (first.kind == Tok::Identifier) {
      m.pattern = PatternKind::Unary;
      m.selector = take().text;
    } else if (first.kind == Tok::Binary || first.kind == Tok::Bar) {
      m.pattern = PatternKind::Binary;
      m.selector = take().text;
      m.argNames.push_back(expect(Tok::Identifier, "argument name").text);
    } else if (first.kind == Tok::Keyword) {
      m.pattern = PatternKind::Keyword;
      while (peek().kind == Tok::Keyword) {
        m.selector += take().text;
        m.argNames.push_back(expect(Tok::Identifier, "argument name").text);
      }
    } else {
      throw ParseError(first.offset, "expected method pattern");
    }
    m.temps = temporaries();
    m.body = statements(Tok::End);
    expect(Tok::End, "end of method");
    return m;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  Token take() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
  bool at(Tok kind) const { return peek().kind == kind; }

  Token expect(Tok kind, const char* what) {
    if (!at(kind)) throw ParseError(peek().offset, std::string("expected ") + what);
    return take();
  }

  std::vector<std::string> temporaries() {
    std::vector<std::string> names;
    if (!at(Tok::Bar)) return names;
    take();
    while (at(Tok::Identifier)) names.push_back(take().text);
    expect(Tok::Bar, "'|' closing temporaries");
    return names;
  }

  std::vector<AstNode> statements(Tok terminator) {
    std::vector<AstNode> out;
    while (!at(terminator)) {
      if (at(Tok::Caret)) {
        take();
        AstNode ret{NodeKind::Return};
        ret.children.push_back(expression());
        out.push_back(std::move(ret));
      } else {
        out.push_back(expression());
      }
      if (at(Tok::Period)) {
        while (at(Tok::Period)) take();
      } else {
        break;
      }
    }
    return out;
  }

  AstNode expression() {
    if (at(Tok::Identifier) && peek(1).kind == Tok::Assign) {
      AstNode assign{NodeKind::Assignment};
      assign.text = take().text;
      take();
      assign.children.push_back(expression());
      return assign;
    }
    AstNode head = keyword_expression();
    if (!at(Tok::Semicolon)) return head;
    if (head.kind != NodeKind::Send) throw ParseError(peek().offset, "cascade without a message");
    AstNode cascade{NodeKind::Cascade};
    AstNode first{NodeKind::CascadeMessage};
    first.text = head.text;
    first.children.assign(std::make_move_iterator(head.children.begin() + 1),
                          std::make_move_iterator(head.children.end()));
    cascade.children.push_back(std::move(head.children.front()));
    cascade.children.push_back(std::move(first));
    while (at(Tok::Semicolon)) {
      take();
      cascade.children.push_back(cascade_message());
    }
    return cascade;
  }

  AstNode cascade_message() {
    AstNode msg{NodeKind::CascadeMessage};
    if (at(Tok::Identifier)) {
      msg.text = take().text;
    } else if (at(Tok::Binary) || at(Tok::Bar)) {
      msg.text = take().text;
      msg.children.push_back(unary_expression());
    } else if (at(Tok::Keyword)) {
      while (at(Tok::Keyword)) {
        msg.text += take().text;
        msg.children.push_back(binary_expression());
      }
    } else {
      throw ParseError(peek().offset, "expected cascaded message");
    }
    return msg;
  }

  AstNode keyword_expression() {
    AstNode receiver = binary_expression();
    if (!at(Tok::Keyword)) return receiver;
    AstNode send{NodeKind::Send};
    send.children.push_back(std::move(receiver));
    while (at(Tok::Keyword)) {
      send.text += take().text;
      send.children.push_back(binary_expression());
    }
    return send;
  }

  AstNode binary_expression() {
    AstNode left = unary_expression();
    while (at(Tok::Binary) || at(Tok::Bar)) {
      const Token op = take();
      if (!starts_primary()) throw ParseError(peek().offset, "binary message '" + op.text + "' missing argument");
      AstNode send{NodeKind::Send};
      send.text = op.text;
      send.children.push_back(std::move(left));
      send.children.push_back(unary_expression());
      left = std::move(send);
    }
    return left;
  }

  AstNode unary_expression() {
    AstNode node = primary();
    while (at(Tok::Identifier)) {
      AstNode send{NodeKind::Send};
      send.text = take().text;
      send.children.push_back(std::move(node));
      node = std::move(send);
    }
    return node;
  }

  bool starts_primary() const {
    switch (peek().kind) {
      case Tok::Identifier: case Tok::Number: case Tok::String: case Tok::Symbol:
      case Tok::Character: case Tok::ArrayOpen: case Tok::LParen: case Tok::LBracket:
        return true;
      default:
        return false;
    }
  }

  static AstNode literal(LiteralKind kind, std::string text) {
    AstNode node{NodeKind::Literal, kind};
    node.text = std::move(text);
    return node;
  }

  AstNode primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Identifier: {
        std::string name = take().text;
        if (name == "true" || name == "false") return literal(LiteralKind::Boolean, name);
        if (name == "nil") return literal(LiteralKind::Nil, name);
        AstNode var{NodeKind::Variable};
        var.text = std::move(name);
        return var;
      }
      case Tok::Number: return literal(LiteralKind::Number, take().text);
      case Tok::String: return literal(LiteralKind::String, take().text);
      case Tok::Symbol: return literal(LiteralKind::Symbol, take().text);
      case Tok::Character: return literal(LiteralKind::Character, take().text);
      case Tok::ArrayOpen: take(); return literal_array();
      case Tok::LParen: {
        take();
        AstNode inner = expression();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::LBracket: take(); return block();
      default: break;
    }
    throw ParseError(t.offset, t.kind == Tok::End ? "unexpected end of method" : "expected expression");
  }

  AstNode literal_array() {
    AstNode array = literal(LiteralKind::Array, "");
    for (;;) {
      const Token& t = peek();
      switch (t.kind) {
        case Tok::RParen: take(); return array;
        case Tok::Number: array.children.push_back(literal(LiteralKind::Number, take().text)); break;
        case Tok::String: array.children.push_back(literal(LiteralKind::String, take().text)); break;
        case Tok::Character: array.children.push_back(literal(LiteralKind::Character, take().text)); break;
        case Tok::Symbol:
        case Tok::Keyword:
        case Tok::Binary:
          array.children.push_back(literal(LiteralKind::Symbol, take().text));
          break;
        case Tok::Identifier: {
          std::string name = take().text;
          if (name == "true" || name == "false") array.children.push_back(literal(LiteralKind::Boolean, name));
          else if (name == "nil") array.children.push_back(literal(LiteralKind::Nil, name));
          else array.children.push_back(literal(LiteralKind::Symbol, name));
          break;
        }
        case Tok::LParen:
        case Tok::ArrayOpen:
          take();
          array.children.push_back(literal_array());
          break;
        default:
          throw ParseError(t.offset, "unexpected token in literal array");
      }
    }
  }

  AstNode block() {
    AstNode node{NodeKind::Block};
    while (at(Tok::Colon)) {
      take();
      node.args.push_back(expect(Tok::Identifier, "block argument").text);
    }
    if (!node.args.empty()) {
      if (at(Tok::Bar)) take();
      else if (!at(Tok::RBracket)) throw ParseError(peek().offset, "expected '|' after block arguments");
    }
    node.temps = temporaries();
    node.children = statements(Tok::RBracket);
    expect(Tok::RBracket, "']'");
    return node;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// Printing ranks: a sub-expression whose rank exceeds what its slot admits
// gets parenthesized.
constexpr int kRankPrimary = 0;
constexpr int kRankUnary = 1;
constexpr int kRankBinary = 2;
constexpr int kRankKeyword = 3;
constexpr int kRankStatement = 4;

inline int selector_rank(std::string_view selector) {
  if (!selector.empty() && selector.back() == ':') return kRankKeyword;
  if (!selector.empty() && is_ident_start(selector.front())) return kRankUnary;
  return kRankBinary;
}

inline bool is_plain_symbol(std::string_view s) {
  if (s.empty()) return false;
  if (std::all_of(s.begin(), s.end(), [](char c) { return is_binary_char(c) || c == '|'; })) return true;
  if (!is_ident_start(s.front())) return false;
  bool after_colon = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ':') {
      after_colon = true;
      continue;
    }
    if (!is_ident_char(s[i])) return false;
    if (after_colon && !is_ident_start(s[i])) return false;
    after_colon = false;
  }
  // keyword symbols must end with ':' once they contain one
  return s.find(':') == std::string_view::npos || s.back() == ':';
}

inline std::string quote(std::string_view text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

inline void print_node(const AstNode& node, int max_rank, std::string& out);

inline void print_literal(const AstNode& node, std::string& out) {
  switch (node.literal) {
    case LiteralKind::Number:
    case LiteralKind::Boolean:
    case LiteralKind::Nil:
      out += node.text;
      return;
    case LiteralKind::String: out += quote(node.text); return;
    case LiteralKind::Character: out += '$'; out += node.text; return;
    case LiteralKind::Symbol:
      out += '#';
      out += is_plain_symbol(node.text) ? node.text : quote(node.text);
      return;
    case LiteralKind::Array:
      out += "#(";
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i > 0) out += ' ';
        print_literal(node.children[i], out);
      }
      out += ')';
      return;
  }
}

inline void print_message(std::string_view selector, const std::vector<AstNode>& args, std::size_t first,
                          std::string& out) {
  const int rank = selector_rank(selector);
  if (rank == kRankUnary) {
    out += ' ';
    out += selector;
  } else if (rank == kRankBinary) {
    out += ' ';
    out += selector;
    out += ' ';
    print_node(args[first], kRankUnary, out);
  } else {
    const auto parts = keyword_parts(selector);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      out += ' ';
      out += parts[i];
      out += ' ';
      print_node(args[first + i], kRankBinary, out);
    }
  }
}

inline void print_statements(const std::vector<AstNode>& stmts, std::string& out) {
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    if (i > 0) out += ". ";
    print_node(stmts[i], kRankStatement, out);
  }
}

inline void print_node(const AstNode& node, int max_rank, std::string& out) {
  int rank = kRankPrimary;
  switch (node.kind) {
    case NodeKind::Send: rank = selector_rank(node.text); break;
    case NodeKind::Cascade:
    case NodeKind::Assignment:
    case NodeKind::Return: rank = kRankStatement; break;
    default: break;
  }
  const bool parens = rank > max_rank;
  if (parens) out += '(';
  switch (node.kind) {
    case NodeKind::Literal: print_literal(node, out); break;
    case NodeKind::Variable: out += node.text; break;
    case NodeKind::Assignment:
      out += node.text;
      out += " := ";
      print_node(node.children[0], kRankStatement, out);
      break;
    case NodeKind::Return:
      out += "^ ";
      print_node(node.children[0], kRankStatement, out);
      break;
    case NodeKind::Send: {
      const int receiver_rank = rank == kRankUnary ? kRankUnary : kRankBinary;
      print_node(node.children[0], receiver_rank, out);
      print_message(node.text, node.children, 1, out);
      break;
    }
    case NodeKind::Cascade: {
      const auto& first = node.children[1];
      const int receiver_rank = selector_rank(first.text) == kRankUnary ? kRankUnary : kRankBinary;
      print_node(node.children[0], receiver_rank, out);
      for (std::size_t i = 1; i < node.children.size(); ++i) {
        if (i > 1) out += ';';
        print_message(node.children[i].text, node.children[i].children, 0, out);
      }
      break;
    }
    case NodeKind::CascadeMessage: break;  // printed by its cascade
    case NodeKind::Block:
      out += '[';
      for (const auto& a : node.args) {
        out += ':';
        out += a;
        out += ' ';
      }
      if (!node.args.empty()) out += "| ";
      if (!node.temps.empty()) {
        out += '|';
        for (const auto& t : node.temps) {
          out += ' ';
          out += t;
        }
        out += " | ";
      }
      print_statements(node.children, out);
      out += ']';
      break;
  }
  if (parens) out += ')';
}

inline void collect_facts(const AstNode& node, std::vector<std::string>& scope, MethodFacts& facts) {
  auto visible = [&](const std::string& name) {
    return std::find(scope.begin(), scope.end(), name) != scope.end();
  };
  auto note_access = [&](const std::string& name) {
    if (!is_pseudo_variable(name) && !visible(name)) facts.accesses.insert(name);
  };
  switch (node.kind) {
    case NodeKind::Literal: return;
    case NodeKind::Variable: note_access(node.text); return;
    case NodeKind::Assignment: note_access(node.text); break;
    case NodeKind::Send:
    case NodeKind::CascadeMessage: facts.sends.insert(node.text); break;
    case NodeKind::Block: {
      const std::size_t mark = scope.size();
      scope.insert(scope.end(), node.args.begin(), node.args.end());
      scope.insert(scope.end(), node.temps.begin(), node.temps.end());
      for (const auto& child : node.children) collect_facts(child, scope, facts);
      scope.resize(mark);
      return;
    }
    default: break;
  }
  for (const auto& child : node.children) collect_facts(child, scope, facts);
}

}  // namespace detail

/// Parses one method. Throws ParseError carrying the character offset.
inline MethodAst parse_method(std::string_view source) {
  if (source.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ParseError(0, "empty method source");
  return detail::Parser(source).method();
}

/// Single-line source text for `m`; parsing it again yields an equal AST.
inline std::string canonical_print(const MethodAst& m) {
  std::string out;
  if (m.pattern == PatternKind::Keyword) {
    const auto parts = keyword_parts(m.selector);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) out += ' ';
      out += parts[i];
      out += ' ';
      out += m.argNames[i];
    }
  } else {
    out += m.selector;
    if (m.pattern == PatternKind::Binary) {
      out += ' ';
      out += m.argNames[0];
    }
  }
  if (!m.temps.empty()) {
    out += " |";
    for (const auto& t : m.temps) {
      out += ' ';
      out += t;
    }
    out += " |";
  }
  if (!m.body.empty()) {
    out += ' ';
    detail::print_statements(m.body, out);
  }
  return out;
}

inline MethodFacts extract_facts(const MethodAst& m) {
  MethodFacts facts;
  facts.selector = m.selector;
  std::vector<std::string> scope = m.argNames;
  scope.insert(scope.end(), m.temps.begin(), m.temps.end());
  for (const auto& stmt : m.body) detail::collect_facts(stmt, scope, facts);
  facts.canonicalForm = canonical_print(m);
  return facts;
}

inline MethodFacts extract_facts(std::string_view source) { return extract_facts(parse_method(source)); }

/// Same canonical form, i.e. the two sources differ only cosmetically.
inline bool ast_equal(std::string_view a, std::string_view b) {
  return canonical_print(parse_method(a)) == canonical_print(parse_method(b));
}

/// Facts of a possibly empty source; empty text (an added or removed
/// method's missing side) has no facts.
inline MethodFacts facts_or_empty(std::string_view source) {
  if (source.empty()) return {};
  return extract_facts(source);
}

template <typename T>
std::set<T> symmetric_difference(const std::set<T>& a, const std::set<T>& b) {
  std::set<T> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

template <typename T>
std::size_t intersection_size(const std::set<T>& a, const std::set<T>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

struct FactDelta {
  std::set<std::string> sends;
  std::set<std::string> accesses;
};

inline FactDelta fact_delta(std::string_view before, std::string_view after) {
  const MethodFacts b = facts_or_empty(before);
  const MethodFacts a = facts_or_empty(after);
  return {symmetric_difference(b.sends, a.sends), symmetric_difference(b.accesses, a.accesses)};
}

}  // namespace untangle
