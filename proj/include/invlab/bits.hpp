#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invlab/errors.hpp"

namespace invlab {

/// Append-only bit string. Fixed-width integer fields are written MSB first,
/// so a string is fully described by its field layout. Hex export pads the
/// tail with zero bits to a nibble boundary.
class BitString {
 public:
  BitString() = default;

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  bool bit(std::size_t i) const { return bits_[i]; }

  void append_bit(bool b) { bits_.push_back(b); }

  void append_uint(std::uint64_t value, unsigned width) {
    if (width > 64) throw DomainError("field width > 64");
    if (width < 64 && (value >> width) != 0) {
      throw DomainError("value does not fit in field width");
    }
    for (unsigned i = width; i-- > 0;) {
      bits_.push_back((value >> i) & 1);
    }
  }

  std::uint64_t read_uint(std::size_t pos, unsigned width) const {
    if (width > 64 || pos + width > bits_.size()) {
      throw DomainError("bit read out of range");
    }
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) {
      v = (v << 1) | static_cast<std::uint64_t>(bits_[pos + i]);
    }
    return v;
  }

  void append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  }

  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve((bits_.size() + 3) / 4);
    for (std::size_t i = 0; i < bits_.size(); i += 4) {
      unsigned nibble = 0;
      for (std::size_t j = 0; j < 4; ++j) {
        nibble <<= 1;
        if (i + j < bits_.size()) nibble |= bits_[i + j] ? 1 : 0;
      }
      out.push_back(digits[nibble]);
    }
    return out;
  }

  /// Inverse of to_hex given the exact bit count. Padding bits must be zero.
  static BitString from_hex(const std::string& hex, std::size_t nbits) {
    if (hex.size() != (nbits + 3) / 4) {
      throw DomainError("hex length does not match bit count");
    }
    BitString out;
    out.bits_.reserve(nbits);
    for (std::size_t i = 0; i < hex.size(); ++i) {
      char c = hex[i];
      unsigned nibble;
      if (c >= '0' && c <= '9') {
        nibble = static_cast<unsigned>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        nibble = static_cast<unsigned>(c - 'a') + 10;
      } else if (c >= 'A' && c <= 'F') {
        nibble = static_cast<unsigned>(c - 'A') + 10;
      } else {
        throw DomainError("bad hex digit");
      }
      for (unsigned j = 4; j-- > 0;) {
        bool b = (nibble >> j) & 1;
        if (out.bits_.size() < nbits) {
          out.bits_.push_back(b);
        } else if (b) {
          throw DomainError("nonzero padding bits");
        }
      }
    }
    return out;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<bool> bits_;
};

}  // namespace invlab
