#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace torbtsim::bencode {

// Bencoded value. Dict keys are kept in a std::map so encoding is
// canonical (keys strictly increasing) by construction.
class BValue {
  public:
    using ByteString = std::string;
    using List = std::vector<BValue>;
    using Dict = std::map<ByteString, BValue>;

    BValue() : value_(ByteString{}) {}
    BValue(ByteString s) : value_(std::move(s)) {}
    BValue(const char* s) : value_(ByteString(s)) {}
    BValue(int64_t i) : value_(i) {}
    BValue(int i) : value_(static_cast<int64_t>(i)) {}
    BValue(List l) : value_(std::move(l)) {}
    BValue(Dict d) : value_(std::move(d)) {}

    bool is_string() const { return std::holds_alternative<ByteString>(value_); }
    bool is_integer() const { return std::holds_alternative<int64_t>(value_); }
    bool is_list() const { return std::holds_alternative<List>(value_); }
    bool is_dict() const { return std::holds_alternative<Dict>(value_); }

    const ByteString& as_string() const { return std::get<ByteString>(value_); }
    int64_t as_integer() const { return std::get<int64_t>(value_); }
    const List& as_list() const { return std::get<List>(value_); }
    const Dict& as_dict() const { return std::get<Dict>(value_); }
    List& as_list() { return std::get<List>(value_); }
    Dict& as_dict() { return std::get<Dict>(value_); }

    bool operator==(const BValue& other) const = default;

  private:
    std::variant<ByteString, int64_t, List, Dict> value_;
};

// Canonical encoding; deterministic for any well-formed value.
std::string encode(const BValue& v);

// Strict inverse of encode: rejects trailing bytes, integer leading
// zeros, "-0", non-canonical string lengths, and unsorted or duplicate
// dict keys. Throws MalformedBencoding.
BValue decode(const std::string& bytes);
BValue decode(const uint8_t* data, size_t len);

} // namespace torbtsim::bencode
