#include <cctype>
#include <charconv>
#include <cstring>

#include "flowalg/error.hpp"
#include "flowalg/expr.hpp"

namespace flowalg {

namespace {

enum class Tok {
  Ident, Int, Float, String,
  LParen, RParen, Comma, Dot, Arrow, Colon,
  Plus, Minus, Star, Slash, Percent,
  EqEq, NotEq, Lt, Le, Gt, Ge,
  Bang, AndAnd, OrOr, BagOpen, BagClose,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t intValue = 0;
  double floatValue = 0.0;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skipSpace();
      Token t;
      t.pos = {line_, col_};
      if (at_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      const bool afterDot = !out.empty() && out.back().kind == Tok::Dot;
      lexOne(t, afterDot);
      out.push_back(std::move(t));
    }
  }

 private:
  void lexOne(Token& t, bool afterDot) {
    const char c = src_[at_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = at_;
      while (at_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[at_])) || src_[at_] == '_')) {
        advance();
      }
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(start, at_ - start));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lexNumber(t, afterDot);
      return;
    }
    if (c == '"') {
      lexString(t);
      return;
    }
    auto two = [&](const char* s) { return src_.substr(at_, 2) == s; };
    struct Punct { const char* text; Tok kind; };
    static const Punct puncts[] = {
        {"->", Tok::Arrow}, {"==", Tok::EqEq}, {"!=", Tok::NotEq}, {"<=", Tok::Le},
        {">=", Tok::Ge},    {"&&", Tok::AndAnd}, {"||", Tok::OrOr}, {"{{", Tok::BagOpen},
        {"}}", Tok::BagClose},
    };
    for (const auto& p : puncts) {
      if (two(p.text)) {
        t.kind = p.kind;
        t.text = p.text;
        advance();
        advance();
        return;
      }
    }
    switch (c) {
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case ',': t.kind = Tok::Comma; break;
      case '.': t.kind = Tok::Dot; break;
      case ':': t.kind = Tok::Colon; break;
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '*': t.kind = Tok::Star; break;
      case '/': t.kind = Tok::Slash; break;
      case '%': t.kind = Tok::Percent; break;
      case '<': t.kind = Tok::Lt; break;
      case '>': t.kind = Tok::Gt; break;
      case '!': t.kind = Tok::Bang; break;
      case '=': fail("unexpected '=' (use '==' for equality)");
      default: fail(std::string("unexpected character '") + c + "'");
    }
    t.text = std::string(1, c);
    advance();
  }

  void lexNumber(Token& t, bool integerOnly) {
    const std::size_t start = at_;
    while (at_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[at_]))) advance();
    bool isFloat = false;
    if (!integerOnly) {
      if (at_ + 1 < src_.size() && src_[at_] == '.' &&
          std::isdigit(static_cast<unsigned char>(src_[at_ + 1]))) {
        isFloat = true;
        advance();
        while (at_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[at_]))) advance();
      }
      if (at_ < src_.size() && (src_[at_] == 'e' || src_[at_] == 'E')) {
        std::size_t look = at_ + 1;
        if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
        if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
          isFloat = true;
          while (at_ < look) advance();
          while (at_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[at_]))) advance();
        }
      }
    }
    const std::string_view text = src_.substr(start, at_ - start);
    t.text = std::string(text);
    if (isFloat) {
      t.kind = Tok::Float;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t.floatValue);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        failAt(t.pos, "float literal out of range");
      }
    } else {
      t.kind = Tok::Int;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), t.intValue);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        failAt(t.pos, "integer literal out of range");
      }
    }
  }

  void lexString(Token& t) {
    advance();
    std::string out;
    for (;;) {
      if (at_ >= src_.size()) failAt(t.pos, "unterminated string literal");
      char c = src_[at_];
      advance();
      if (c == '"') break;
      if (c == '\\') {
        if (at_ >= src_.size()) failAt(t.pos, "unterminated string literal");
        char esc = src_[at_];
        advance();
        switch (esc) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unknown escape '\\") + esc + "'");
        }
        continue;
      }
      out += c;
    }
    t.kind = Tok::String;
    t.text = std::move(out);
  }

  void skipSpace() {
    while (at_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[at_]))) advance();
  }

  void advance() {
    if (src_[at_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++at_;
  }

  [[noreturn]] void fail(const std::string& what) { throw SyntaxError(line_, col_, what); }
  [[noreturn]] void failAt(SourcePos p, const std::string& what) {
    throw SyntaxError(p.line, p.column, what);
  }

  std::string_view src_;
  std::size_t at_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool isKeyword(const std::string& s) {
  static const char* const words[] = {"if", "then", "else", "true", "false", "and", "or", "not", "emptyBag", "bmap"};
  for (const char* w : words) {
    if (s == w) return true;
  }
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(Lexer(src).run()) {}

  ExprPtr parseWholeExpr() {
    ExprPtr e = expr();
    expectEnd();
    return e;
  }

  FuncDef parseWholeFunc() {
    FuncDef f;
    if (peek().kind == Tok::Ident && peekAt(1).kind == Tok::Arrow) {
      f.params.push_back({identName(next()), std::nullopt});
    } else {
      expect(Tok::LParen, "'(' or a parameter name");
      if (peek().kind != Tok::RParen) {
        f.params.push_back(param());
        while (accept(Tok::Comma)) f.params.push_back(param());
      }
      expect(Tok::RParen, "')'");
    }
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (f.params[i].name == f.params[j].name) {
          fail(peek(), "duplicate parameter '" + f.params[i].name + "'");
        }
      }
    }
    expect(Tok::Arrow, "'->'");
    f.body = expr();
    expectEnd();
    return f;
  }

 private:
  Param param() {
    Param p{identName(next()), std::nullopt};
    if (accept(Tok::Colon)) p.type = type();
    return p;
  }

  ElemType type() {
    const Token start = peek();
    std::string text = typeText();
    try {
      return parseType(text);
    } catch (const SyntaxError& e) {
      fail(start, e.what());
    }
  }

  std::string typeText() {
    const Token& name = next();
    if (name.kind != Tok::Ident) fail(name, "expected a type name");
    std::string text = name.text;
    if (accept(Tok::Lt)) {
      text += "<" + typeText();
      while (accept(Tok::Comma)) text += "," + typeText();
      expect(Tok::Gt, "'>'");
      text += ">";
    }
    return text;
  }

  ExprPtr expr() {
    if (peekWord("if")) return ifExpr();
    return orExpr();
  }

  ExprPtr ifExpr() {
    const SourcePos at = next().pos;
    ExprPtr cond = expr();
    expectWord("then");
    ExprPtr then = expr();
    expectWord("else");
    ExprPtr otherwise = expr();
    return located(Expr::ifThenElse(cond, then, otherwise), at);
  }

  ExprPtr orExpr() {
    ExprPtr lhs = andExpr();
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::OrOr || isWord(t, "or")) {
        next();
        lhs = located(Expr::binaryOp(BinaryOp::Or, lhs, andExpr()), t.pos);
      } else {
        return lhs;
      }
    }
  }

  ExprPtr andExpr() {
    ExprPtr lhs = cmpExpr();
    for (;;) {
      const Token& t = peek();
      if (t.kind == Tok::AndAnd || isWord(t, "and")) {
        next();
        lhs = located(Expr::binaryOp(BinaryOp::And, lhs, cmpExpr()), t.pos);
      } else {
        return lhs;
      }
    }
  }

  ExprPtr cmpExpr() {
    ExprPtr lhs = addExpr();
    for (;;) {
      const Token& t = peek();
      BinaryOp op;
      switch (t.kind) {
        case Tok::EqEq: op = BinaryOp::Eq; break;
        case Tok::NotEq: op = BinaryOp::Ne; break;
        case Tok::Lt: op = BinaryOp::Lt; break;
        case Tok::Le: op = BinaryOp::Le; break;
        case Tok::Gt: op = BinaryOp::Gt; break;
        case Tok::Ge: op = BinaryOp::Ge; break;
        default: return lhs;
      }
      next();
      lhs = located(Expr::binaryOp(op, lhs, addExpr()), t.pos);
    }
  }

  ExprPtr addExpr() {
    ExprPtr lhs = mulExpr();
    for (;;) {
      const Token& t = peek();
      if (t.kind != Tok::Plus && t.kind != Tok::Minus) return lhs;
      next();
      const BinaryOp op = t.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      lhs = located(Expr::binaryOp(op, lhs, mulExpr()), t.pos);
    }
  }

  ExprPtr mulExpr() {
    ExprPtr lhs = unaryExpr();
    for (;;) {
      const Token& t = peek();
      BinaryOp op;
      switch (t.kind) {
        case Tok::Star: op = BinaryOp::Mul; break;
        case Tok::Slash: op = BinaryOp::Div; break;
        case Tok::Percent: op = BinaryOp::Mod; break;
        default: return lhs;
      }
      next();
      lhs = located(Expr::binaryOp(op, lhs, unaryExpr()), t.pos);
    }
  }

  ExprPtr unaryExpr() {
    const Token& t = peek();
    if (t.kind == Tok::Bang || isWord(t, "not")) {
      next();
      return located(Expr::unaryOp(UnaryOp::Not, unaryExpr()), t.pos);
    }
    if (t.kind == Tok::Minus) {
      next();
      // A minus directly in front of a numeric literal is part of the literal.
      const Token& lit = peek();
      if ((lit.kind == Tok::Int || lit.kind == Tok::Float) && peekAt(1).kind != Tok::Dot) {
        next();
        if (lit.kind == Tok::Int) return located(Expr::litInt(-lit.intValue), t.pos);
        return located(Expr::litFloat(-lit.floatValue), t.pos);
      }
      return located(Expr::unaryOp(UnaryOp::Neg, unaryExpr()), t.pos);
    }
    return postfixExpr();
  }

  ExprPtr postfixExpr() {
    ExprPtr e = atom();
    while (peek().kind == Tok::Dot) {
      const Token& dot = next();
      const Token& idx = next();
      if (idx.kind != Tok::Int || idx.intValue < 1) {
        fail(idx, "projection index must be a positive integer literal");
      }
      e = located(Expr::proj(e, idx.intValue), dot.pos);
    }
    return e;
  }

  ExprPtr atom() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Int: return located(Expr::litInt(t.intValue), t.pos);
      case Tok::Float: return located(Expr::litFloat(t.floatValue), t.pos);
      case Tok::String: return located(Expr::litStr(t.text), t.pos);
      case Tok::LParen: {
        std::vector<ExprPtr> parts{expr()};
        while (accept(Tok::Comma)) parts.push_back(expr());
        expect(Tok::RParen, "')'");
        if (parts.size() == 1) return parts[0];
        return located(Expr::tuple(std::move(parts)), t.pos);
      }
      case Tok::BagOpen: {
        std::vector<ExprPtr> elems;
        if (peek().kind != Tok::BagClose) {
          elems.push_back(expr());
          while (accept(Tok::Comma)) elems.push_back(expr());
        }
        expect(Tok::BagClose, "'}}'");
        return located(Expr::bagLit(std::move(elems)), t.pos);
      }
      case Tok::Ident: return identAtom(t);
      default: fail(t, "unexpected " + describe(t));
    }
  }

  ExprPtr identAtom(const Token& t) {
    if (t.text == "true" || t.text == "false") {
      return located(Expr::litBool(t.text == "true"), t.pos);
    }
    if (t.text == "if") {
      --at_;
      return ifExpr();
    }
    if (t.text == "emptyBag") {
      if (accept(Tok::LParen)) expect(Tok::RParen, "')'");
      return located(Expr::call(Builtin::EmptyBag, {}), t.pos);
    }
    if (t.text == "bmap") {
      expect(Tok::LParen, "'('");
      std::string binder = identName(next());
      expect(Tok::Arrow, "'->'");
      ExprPtr body = expr();
      expect(Tok::Comma, "','");
      ExprPtr coll = expr();
      expect(Tok::RParen, "')'");
      return located(Expr::bmap(std::move(binder), body, coll), t.pos);
    }
    if (peek().kind == Tok::LParen) {
      struct Fn { const char* name; Builtin fn; std::size_t arity; };
      static const Fn fns[] = {
          {"startsWith", Builtin::StartsWith, 2}, {"contains", Builtin::Contains, 2},
          {"concat", Builtin::Concat, 2},         {"size", Builtin::Size, 1},
          {"singleton", Builtin::Singleton, 1},
      };
      for (const auto& fn : fns) {
        if (t.text != fn.name) continue;
        next();
        std::vector<ExprPtr> args;
        if (peek().kind != Tok::RParen) {
          args.push_back(expr());
          while (accept(Tok::Comma)) args.push_back(expr());
        }
        expect(Tok::RParen, "')'");
        if (args.size() != fn.arity) {
          fail(t, std::string(fn.name) + " takes " + std::to_string(fn.arity) + " argument(s)");
        }
        return located(Expr::call(fn.fn, std::move(args)), t.pos);
      }
      fail(t, "unknown function '" + t.text + "'");
    }
    if (isKeyword(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
    return located(Expr::var(t.text), t.pos);
  }

  static ExprPtr located(ExprPtr e, SourcePos pos) {
    Expr copy = *e;
    copy.pos = pos;
    return std::make_shared<const Expr>(std::move(copy));
  }

  std::string identName(const Token& t) {
    if (t.kind != Tok::Ident || isKeyword(t.text)) fail(t, "expected an identifier");
    return t.text;
  }

  static bool isWord(const Token& t, const char* w) { return t.kind == Tok::Ident && t.text == w; }
  bool peekWord(const char* w) const { return isWord(peek(), w); }

  void expectWord(const char* w) {
    const Token& t = next();
    if (!isWord(t, w)) fail(t, std::string("expected '") + w + "', found " + describe(t));
  }

  const Token& peek() const { return toks_[at_]; }
  const Token& peekAt(std::size_t k) const { return toks_[std::min(at_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[at_];
    if (at_ + 1 < toks_.size()) ++at_;
    return t;
  }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  void expect(Tok k, const char* what) {
    const Token& t = next();
    if (t.kind != k) fail(t, std::string("expected ") + what + ", found " + describe(t));
  }
  void expectEnd() {
    if (peek().kind != Tok::End) fail(peek(), "unexpected " + describe(peek()));
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    if (t.kind == Tok::String) return "string literal";
    return "'" + t.text + "'";
  }

  [[noreturn]] static void fail(const Token& t, const std::string& what) {
    throw SyntaxError(t.pos.line, t.pos.column, what);
  }

  std::vector<Token> toks_;
  std::size_t at_ = 0;
};

}  // namespace

ExprPtr parseExpr(std::string_view source) { return Parser(source).parseWholeExpr(); }

FuncDef parseFunc(std::string_view source) { return Parser(source).parseWholeFunc(); }

}  // namespace flowalg
