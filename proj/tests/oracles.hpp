#pragma once

// Independent reference implementations and random generators shared by the
// test binaries. Nothing here goes through the algebra kernel: the oracles
// work on plain vectors and maps so that they can check it.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "flowalg/dataflow.hpp"
#include "flowalg/value.hpp"

namespace oracle {

using flowalg::ElemType;
using flowalg::Value;

inline const std::filesystem::path kPrograms = FLOWALG_PROGRAMS_DIR;

class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(n) - 1)); }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& engine() { return rng_; }

  // Small domains so that duplicates and key collisions are common.
  Value scalar(const ElemType& t) {
    switch (t.kind) {
      case flowalg::TypeKind::Int: return Value::integer(integer(-4, 4));
      case flowalg::TypeKind::Float: return Value::real(static_cast<double>(integer(-8, 8)) / 4.0);
      case flowalg::TypeKind::Bool: return Value::boolean(coin());
      case flowalg::TypeKind::Str: {
        static const char* words[] = {"", "a", "b", "ab", "host", "bytes"};
        return Value::string(words[index(6)]);
      }
      default: return value(t);
    }
  }

  Value value(const ElemType& t, std::size_t maxSize = 4) {
    switch (t.kind) {
      case flowalg::TypeKind::Tuple: {
        std::vector<Value> parts;
        for (const auto& a : t.args) parts.push_back(value(a, maxSize));
        return Value::tuple(std::move(parts));
      }
      case flowalg::TypeKind::Bag:
      case flowalg::TypeKind::List: {
        std::vector<Value> elems;
        const std::size_t n = static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(maxSize)));
        for (std::size_t i = 0; i < n; ++i) elems.push_back(value(t.elem(), maxSize / 2 + 1));
        return t.kind == flowalg::TypeKind::Bag ? Value::bag(std::move(elems)) : Value::list(std::move(elems));
      }
      default: return scalar(t);
    }
  }

  ElemType type(int depth = 2) {
    const int pick = static_cast<int>(integer(0, depth > 0 ? 6 : 3));
    switch (pick) {
      case 0: return ElemType::integer();
      case 1: return ElemType::real();
      case 2: return ElemType::boolean();
      case 3: return ElemType::string();
      case 4: return ElemType::tuple({type(depth - 1), type(depth - 1)});
      case 5: return ElemType::bag(type(depth - 1));
      default: return ElemType::list(type(depth - 1));
    }
  }

  // Pairs (k, v) with k in 0..keys-1, as a plain vector.
  std::vector<std::pair<std::int64_t, std::int64_t>> keyed(std::size_t maxSize, std::int64_t keys) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    const std::size_t n = static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(maxSize)));
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(integer(0, keys - 1), integer(-3, 3));
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

inline Value pairBag(const std::vector<std::pair<std::int64_t, std::int64_t>>& kv) {
  std::vector<Value> elems;
  for (const auto& [k, v] : kv) elems.push_back(Value::tuple({Value::integer(k), Value::integer(v)}));
  return Value::bag(std::move(elems));
}

inline Value ints(std::initializer_list<std::int64_t> xs) {
  std::vector<Value> out;
  for (auto x : xs) out.push_back(Value::integer(x));
  return Value::bag(std::move(out));
}

inline Value strs(std::initializer_list<const char*> xs) {
  std::vector<Value> out;
  for (auto x : xs) out.push_back(Value::string(x));
  return Value::bag(std::move(out));
}

enum class JoinSide { Inner, Left, Right, Full };

// Nested-loop join over the union of keys, straight from the textbook
// definition: matched pairs for shared keys, and for outer joins a singleton
// on the preserved side paired with an empty bag on the other.
inline Value nestedLoopJoin(const std::vector<std::pair<std::int64_t, std::int64_t>>& xs,
                            const std::vector<std::pair<std::int64_t, std::int64_t>>& ys, JoinSide side) {
  const bool wrapLeft = side == JoinSide::Right || side == JoinSide::Full;
  const bool wrapRight = side == JoinSide::Left || side == JoinSide::Full;
  const auto single = [](std::int64_t v) { return Value::bag({Value::integer(v)}); };
  std::vector<std::int64_t> keys;
  for (const auto& [k, v] : xs) keys.push_back(k);
  for (const auto& [k, v] : ys) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  std::vector<Value> out;
  for (auto k : keys) {
    std::vector<std::int64_t> lv, rv;
    for (const auto& [kk, v] : xs) if (kk == k) lv.push_back(v);
    for (const auto& [kk, v] : ys) if (kk == k) rv.push_back(v);
    const auto emit = [&](Value l, Value r) {
      out.push_back(Value::tuple({Value::integer(k), Value::tuple({std::move(l), std::move(r)})}));
    };
    if (!lv.empty() && !rv.empty()) {
      for (auto a : lv) {
        for (auto b : rv) {
          emit(wrapLeft ? single(a) : Value::integer(a), wrapRight ? single(b) : Value::integer(b));
        }
      }
    } else if (!lv.empty() && wrapRight) {
      for (auto a : lv) emit(wrapLeft ? single(a) : Value::integer(a), Value::emptyBag());
    } else if (!rv.empty() && wrapLeft) {
      for (auto b : rv) emit(Value::emptyBag(), wrapRight ? single(b) : Value::integer(b));
    }
  }
  return Value::bag(std::move(out));
}

// PageRank written out by hand as the Spark program does it: join, spread
// each page's rank over its links, sum per target, damp. Pages that receive
// no contribution drop out, as they do after an inner join.
inline std::map<std::string, double> pageRank(const std::map<std::string, std::vector<std::string>>& links,
                                              int iterations) {
  std::map<std::string, double> ranks;
  for (const auto& [page, out] : links) ranks[page] = 1.0;
  for (int i = 0; i < iterations; ++i) {
    // Contributions are summed in the canonical order of the (url, share)
    // pairs so that float rounding matches a left fold over the sorted bag.
    std::vector<std::pair<std::string, double>> contribs;
    for (const auto& [page, out] : links) {
      auto r = ranks.find(page);
      if (r == ranks.end()) continue;
      for (const auto& url : out) contribs.emplace_back(url, r->second / static_cast<double>(out.size()));
    }
    std::sort(contribs.begin(), contribs.end());
    std::map<std::string, double> sums;
    for (const auto& [url, share] : contribs) {
      auto it = sums.find(url);
      if (it == sums.end()) sums[url] = share; else it->second += share;
    }
    ranks.clear();
    for (const auto& [url, c] : sums) ranks[url] = 0.15 + 0.85 * c;
  }
  return ranks;
}

inline Value linksValue(const std::map<std::string, std::vector<std::string>>& links) {
  std::vector<Value> elems;
  for (const auto& [page, out] : links) {
    std::vector<Value> targets;
    for (const auto& u : out) targets.push_back(Value::string(u));
    elems.push_back(Value::tuple({Value::string(page), Value::bag(std::move(targets))}));
  }
  return Value::bag(std::move(elems));
}

inline const std::map<std::string, std::vector<std::string>>& fourNodeGraph() {
  static const std::map<std::string, std::vector<std::string>> g{
      {"A", {"B", "C"}}, {"B", {"C"}}, {"C", {"A"}}, {"D", {"A", "C"}}};
  return g;
}

inline flowalg::ProgramGraph program(const std::string& name) { return flowalg::loadProgram(kPrograms / name); }

}  // namespace oracle
