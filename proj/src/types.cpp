#include "flowalg/types.hpp"

#include <cctype>

#include "flowalg/error.hpp"

namespace flowalg {

std::string_view errorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::InvalidValue: return "InvalidValue";
    case ErrorKind::EmptyReduce: return "EmptyReduce";
    case ErrorKind::NotEnabled: return "NotEnabled";
    case ErrorKind::NegativeIterations: return "NegativeIterations";
    case ErrorKind::NonQuiescent: return "NonQuiescent";
    case ErrorKind::InvalidProgram: return "InvalidProgram";
    case ErrorKind::BaselineFailure: return "BaselineFailure";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

bool ElemType::isConcrete() const {
  if (kind == TypeKind::Unknown) return false;
  for (const auto& a : args) {
    if (!a.isConcrete()) return false;
  }
  return true;
}

std::string ElemType::str() const {
  switch (kind) {
    case TypeKind::Int: return "Int";
    case TypeKind::Float: return "Float";
    case TypeKind::Bool: return "Bool";
    case TypeKind::Str: return "Str";
    case TypeKind::Unknown: return "?";
    case TypeKind::Bag: return "Bag<" + elem().str() + ">";
    case TypeKind::List: return "List<" + elem().str() + ">";
    case TypeKind::Tuple: {
      std::string out = "Tuple<";
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ",";
        out += args[i].str();
      }
      return out + ">";
    }
  }
  return "?";
}

namespace {

class TypeParser {
 public:
  explicit TypeParser(std::string_view text) : text_(text) {}

  ElemType parseAll() {
    ElemType t = parse();
    skipSpace();
    if (pos_ != text_.size()) fail("trailing characters");
    return t;
  }

 private:
  ElemType parse() {
    skipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    if (name.empty()) fail("expected a type name");

    if (name == "Int" || name == "Long") return ElemType::integer();
    if (name == "Float" || name == "Double") return ElemType::real();
    if (name == "Bool" || name == "Boolean") return ElemType::boolean();
    if (name == "Str" || name == "String") return ElemType::string();

    std::vector<ElemType> args;
    expect('<');
    args.push_back(parse());
    skipSpace();
    while (pos_ < text_.size() && text_[pos_] == ',') {
      ++pos_;
      args.push_back(parse());
      skipSpace();
    }
    expect('>');

    if (name == "Tuple") {
      if (args.size() < 2) fail("Tuple needs at least two components");
      return ElemType::tuple(std::move(args));
    }
    if (args.size() != 1) fail(std::string(name) + " takes exactly one argument");
    if (name == "Bag") return ElemType::bag(std::move(args[0]));
    if (name == "List") return ElemType::list(std::move(args[0]));
    fail("unknown type '" + std::string(name) + "'");
  }

  void expect(char c) {
    skipSpace();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw SyntaxError(1, static_cast<int>(pos_) + 1,
                      "bad type '" + std::string(text_) + "': " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

ElemType parseType(std::string_view text) { return TypeParser(text).parseAll(); }

std::optional<ElemType> unify(const ElemType& a, const ElemType& b) {
  if (a.kind == TypeKind::Unknown) return b;
  if (b.kind == TypeKind::Unknown) return a;
  if (a.kind != b.kind || a.args.size() != b.args.size()) return std::nullopt;
  ElemType out{a.kind, {}};
  out.args.reserve(a.args.size());
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    auto u = unify(a.args[i], b.args[i]);
    if (!u) return std::nullopt;
    out.args.push_back(std::move(*u));
  }
  return out;
}

}  // namespace flowalg
