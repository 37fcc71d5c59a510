#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowalg {

enum class TypeKind { Int, Float, Bool, Str, Tuple, Bag, List, Unknown };

/// Semantic type of a value or of a dataset's elements.
///
/// `Unknown` only appears during inference (the element type of an empty
/// bag literal); declared types never contain it.
struct ElemType {
  TypeKind kind = TypeKind::Unknown;
  std::vector<ElemType> args;

  static ElemType integer() { return {TypeKind::Int, {}}; }
  static ElemType real() { return {TypeKind::Float, {}}; }
  static ElemType boolean() { return {TypeKind::Bool, {}}; }
  static ElemType string() { return {TypeKind::Str, {}}; }
  static ElemType unknown() { return {TypeKind::Unknown, {}}; }
  static ElemType tuple(std::vector<ElemType> parts) { return {TypeKind::Tuple, std::move(parts)}; }
  static ElemType bag(ElemType elem) { return {TypeKind::Bag, {std::move(elem)}}; }
  static ElemType list(ElemType elem) { return {TypeKind::List, {std::move(elem)}}; }

  bool isNumeric() const { return kind == TypeKind::Int || kind == TypeKind::Float; }
  bool isCollection() const { return kind == TypeKind::Bag || kind == TypeKind::List; }
  const ElemType& elem() const { return args.at(0); }

  /// False if any `Unknown` remains anywhere inside.
  bool isConcrete() const;

  std::string str() const;

  friend bool operator==(const ElemType&, const ElemType&) = default;
};

/// Parses the textual grammar used by program files, e.g.
/// `Bag<Tuple<Str,Float>>`. Accepts Double/String/Boolean/Long as aliases.
ElemType parseType(std::string_view text);

/// Most specific type compatible with both, treating `Unknown` as a
/// wildcard; nullopt when the two disagree.
std::optional<ElemType> unify(const ElemType& a, const ElemType& b);

}  // namespace flowalg
