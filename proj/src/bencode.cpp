#include "torbtsim/bencode.hpp"

#include "torbtsim/errors.hpp"

#include <limits>

namespace torbtsim::bencode {

namespace {

void encode_into(const BValue& v, std::string& out) {
    if (v.is_string()) {
        const auto& s = v.as_string();
        out += std::to_string(s.size());
        out += ':';
        out += s;
    } else if (v.is_integer()) {
        out += 'i';
        out += std::to_string(v.as_integer());
        out += 'e';
    } else if (v.is_list()) {
        out += 'l';
        for (const auto& item : v.as_list()) encode_into(item, out);
        out += 'e';
    } else {
        out += 'd';
        for (const auto& [key, value] : v.as_dict()) {
            out += std::to_string(key.size());
            out += ':';
            out += key;
            encode_into(value, out);
        }
        out += 'e';
    }
}

constexpr size_t kMaxDepth = 512;

class Decoder {
  public:
    Decoder(const uint8_t* data, size_t len) : data_(data), len_(len) {}

    BValue run() {
        BValue v = parse_value(0);
        if (pos_ != len_) throw MalformedBencoding("trailing bytes after value");
        return v;
    }

  private:
    uint8_t peek() const {
        if (pos_ >= len_) throw MalformedBencoding("truncated input");
        return data_[pos_];
    }
    uint8_t take() {
        uint8_t c = peek();
        ++pos_;
        return c;
    }

    BValue parse_value(size_t depth) {
        if (depth > kMaxDepth) throw MalformedBencoding("nesting too deep");
        uint8_t c = peek();
        if (c == 'i') return parse_integer();
        if (c == 'l') return parse_list(depth);
        if (c == 'd') return parse_dict(depth);
        if (c >= '0' && c <= '9') return BValue(parse_string());
        throw MalformedBencoding("unexpected byte 0x" + std::to_string(int(c)));
    }

    BValue parse_integer() {
        take(); // 'i'
        bool negative = false;
        if (peek() == '-') {
            take();
            negative = true;
        }
        std::string digits;
        while (peek() != 'e') {
            uint8_t c = take();
            if (c < '0' || c > '9') throw MalformedBencoding("non-digit in integer");
            digits.push_back(static_cast<char>(c));
        }
        take(); // 'e'
        if (digits.empty()) throw MalformedBencoding("empty integer");
        if (digits.size() > 1 && digits[0] == '0') throw MalformedBencoding("leading zero in integer");
        if (negative && digits == "0") throw MalformedBencoding("negative zero");
        // manual accumulation so overflow is caught instead of wrapping
        uint64_t magnitude = 0;
        const uint64_t limit =
            negative ? uint64_t(std::numeric_limits<int64_t>::max()) + 1 : uint64_t(std::numeric_limits<int64_t>::max());
        for (char d : digits) {
            uint64_t digit = uint64_t(d - '0');
            if (magnitude > (limit - digit) / 10) throw MalformedBencoding("integer out of 64-bit range");
            magnitude = magnitude * 10 + digit;
        }
        int64_t value;
        if (negative && magnitude == uint64_t(std::numeric_limits<int64_t>::max()) + 1)
            value = std::numeric_limits<int64_t>::min();
        else
            value = negative ? -static_cast<int64_t>(magnitude) : static_cast<int64_t>(magnitude);
        return BValue(value);
    }

    std::string parse_string() {
        std::string digits;
        while (peek() != ':') {
            uint8_t c = take();
            if (c < '0' || c > '9') throw MalformedBencoding("non-digit in string length");
            digits.push_back(static_cast<char>(c));
            if (digits.size() > 10) throw MalformedBencoding("string length too large");
        }
        take(); // ':'
        if (digits.empty()) throw MalformedBencoding("missing string length");
        if (digits.size() > 1 && digits[0] == '0') throw MalformedBencoding("leading zero in string length");
        uint64_t n = std::stoull(digits);
        if (n > len_ - pos_) throw MalformedBencoding("string length exceeds input");
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }

    BValue parse_list(size_t depth) {
        take(); // 'l'
        BValue::List items;
        while (peek() != 'e') items.push_back(parse_value(depth + 1));
        take(); // 'e'
        return BValue(std::move(items));
    }

    BValue parse_dict(size_t depth) {
        take(); // 'd'
        BValue::Dict dict;
        std::string prev_key;
        bool have_prev = false;
        while (peek() != 'e') {
            std::string key = parse_string();
            if (have_prev && !(prev_key < key))
                throw MalformedBencoding("dict keys not strictly increasing at \"" + key + "\"");
            prev_key = key;
            have_prev = true;
            dict.emplace(std::move(key), parse_value(depth + 1));
        }
        take(); // 'e'
        return BValue(std::move(dict));
    }

    const uint8_t* data_;
    size_t len_;
    size_t pos_ = 0;
};

} // namespace

std::string encode(const BValue& v) {
    std::string out;
    encode_into(v, out);
    return out;
}

BValue decode(const uint8_t* data, size_t len) { return Decoder(data, len).run(); }

BValue decode(const std::string& bytes) {
    return decode(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size());
}

} // namespace torbtsim::bencode
